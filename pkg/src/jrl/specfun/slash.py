"""Jacobi-form slash action of SL2(Z) semidirect the integer lattice."""

from __future__ import annotations

import cmath
import math
from typing import Callable

from ..errors import DomainViolation
from .points import SL2Element

_TWO_PI_I = 2j * math.pi


def jacobi_slash(
    f: Callable[[complex, complex], complex],
    k: int,
    m: complex,
    gamma: SL2Element,
    shift: tuple[float, float],
    z: complex,
    tau: complex,
) -> complex:
    """(f |_{k,m} (gamma, (lam, mu)))(z, tau) for a weight-k index-m function.

    f |_{k,m}(gamma,(lam,mu))(z,tau) =
        (c tau + d)^{-k}
        * e(-c m (z + lam tau + mu)^2/(c tau + d) + m (lam^2 tau + 2 lam z))
        * f((z + lam tau + mu)/(c tau + d), gamma.tau),

    with e(x) = exp(2 pi i x).
    """
    lam, mu = shift
    den = gamma.c * tau + gamma.d
    if den == 0:
        raise DomainViolation("c tau + d vanished")
    zs = z + lam * tau + mu
    expo = -gamma.c * m * zs * zs / den + m * (lam * lam * tau + 2.0 * lam * z)
    return den ** (-k) * cmath.exp(_TWO_PI_I * expo) * f(zs / den, gamma.act(tau))
