"""Laurent coefficient extraction for the order-1 kernels.

Values are sampled on a small circle around w = 0 (radius 0.05 times the
annulus width Im tau) using strip-convergent forms of the kernels, then a
least-squares fit against the basis

    1/(2 pi i w), (2 pi i w)^0, (2 pi i w)^1, ...

recovers the pole coefficient and the series coefficients.  Columns are
norm-scaled before solving so the normal system stays well conditioned.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ..errors import FitIllConditioned
from .points import ModularPoint, Truncation
from .weierstrass import _p1_flipped, _p1_tilde_flipped, _p1_twisted_flipped

MAX_FIT_ORDER = 12

_TWO_PI_I = 2j * math.pi


@dataclass(frozen=True)
class LaurentFit:
    """Fitted expansion f(w) = pole_coefficient/(2 pi i w) + sum_j c_j (2 pi i w)^j.

    Indexing is by series position: fit[j] is the coefficient of
    (2 pi i w)^j for j = 0 .. K-1.
    """

    kind: str
    pole_coefficient: complex
    coefficients: tuple[complex, ...]

    @property
    def pole_residue(self) -> complex:
        """Residue of f at w = 0 in the w variable."""
        return self.pole_coefficient / _TWO_PI_I

    def __len__(self) -> int:
        return len(self.coefficients)

    def __getitem__(self, j: int) -> complex:
        return self.coefficients[j]

    def __iter__(self):
        return iter(self.coefficients)


def laurent_coeffs_p1(
    kind: str,
    params: dict,
    tau: ModularPoint,
    K: int,
    tr: Truncation,
) -> LaurentFit:
    """Fit the first K series coefficients of an order-1 kernel around w = 0.

    kind: "plain" (P_1), "twisted" (P_{1,lam}, params["lam"] integer), or
    "tilde" (Ptilde_1(., z), params["z"] complex).
    """
    if K < 1:
        raise ValueError("need at least one coefficient")
    if K > MAX_FIT_ORDER:
        raise ValueError(f"fit order {K} exceeds the configured maximum {MAX_FIT_ORDER}")
    if kind == "plain":
        f = lambda w: _p1_flipped(w, tau, tr)
    elif kind == "twisted":
        lam = int(params["lam"])
        f = lambda w: _p1_twisted_flipped(lam, w, tau, tr)
    elif kind == "tilde":
        z = complex(params["z"])
        f = lambda w: _p1_tilde_flipped(w, z, tau, tr)
    else:
        raise ValueError(f"unknown kernel kind {kind!r}")

    rho = 0.05 * tau.tau.imag
    if not rho > 0.0:
        raise FitIllConditioned("sample circle has nonpositive radius")
    n_samples = max(4 * K, 16)
    # a few guard orders beyond K soak up the truncated tail
    n_coeffs = min(K + 6, n_samples - 1)

    ws = [rho * cmath.exp(2j * math.pi * (s + 0.5) / n_samples) for s in range(n_samples)]
    values = np.array([f(w) for w in ws], dtype=complex)
    basis = np.empty((n_samples, n_coeffs + 1), dtype=complex)
    for i, w in enumerate(ws):
        u = _TWO_PI_I * w
        basis[i, 0] = 1.0 / u
        for j in range(n_coeffs):
            basis[i, j + 1] = u**j

    scales = np.linalg.norm(basis, axis=0)
    if np.any(scales == 0.0):
        raise FitIllConditioned("degenerate basis column")
    coeffs, _, rank, sing = np.linalg.lstsq(basis / scales, values, rcond=None)
    if rank < n_coeffs + 1 or sing[-1] / sing[0] < 1e-12:
        raise FitIllConditioned("sample circle produced a rank-deficient system")
    coeffs = coeffs / scales
    return LaurentFit(
        kind=kind,
        pole_coefficient=complex(coeffs[0]),
        coefficients=tuple(complex(c) for c in coeffs[1 : K + 1]),
    )
