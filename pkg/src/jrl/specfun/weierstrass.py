"""Elliptic kernel functions on the annulus 0 < Im w < Im tau.

All variants are mode sums over an integer (or lam-shifted) index n.
Terms with negative index are rewritten through

    1/(1 - q^{-j}) = -q^j / (1 - q^j),        j >= 1,

so every retained term decays geometrically; sums run in ascending |n|
(positive branch first at each |n|) with compensated summation.

Function index convention: weier_p(m, ...) is P_m with

    P_1(w)  = -1/2 - sum_{n != 0} q_w^n / (1 - q^n)
    P_m     = ((-1)^m/(m-1)!) sum_{n != 0} n^{m-1} q_w^n / (1 - q^n),  m >= 2,

which matches P_{m+1} = ((-1)^m / m!) D_w^m P_1 with D_w = (2 pi i)^{-1} d/dw.
The twisted, flux-deformed, and two-variable variants follow the same
index convention.
"""

from __future__ import annotations

import cmath
import math

from ..errors import DomainViolation, PoleHit
from .points import TWO_PI_I, AnnulusPoint, ModularPoint, TwistPair, Truncation, phase
from .series import stable_sum


def _check_order(m: int) -> None:
    if m < 1:
        raise ValueError("kernel order must be >= 1")


def weier_p(m: int, p: AnnulusPoint, tr: Truncation) -> complex:
    """P_m(w, tau) on the annulus."""
    _check_order(m)
    q = p.tau.q
    q_w = p.q_w
    sign = -1.0 if m % 2 else 1.0
    pref = sign / math.factorial(m - 1)
    terms = []
    for n in range(1, tr.n_mode + 1):
        nk = float(n) ** (m - 1)
        den = 1.0 - q**n
        # index +n directly, index -n via the geometric rewrite
        terms.append(nk * q_w**n / den)
        terms.append(sign * nk * (q**n / q_w**n) / den)
    out = pref * stable_sum(terms)
    if m == 1:
        out += -0.5
    return out


def weier_p_twisted(m: int, lam: int, p: AnnulusPoint, tr: Truncation) -> complex:
    """P_{m,lam}(w, tau) = ((-1)^m/(m-1)!) sum_{n != -lam} n^{m-1} q_w^n / (1 - q^{n+lam})."""
    _check_order(m)
    if lam != int(lam):
        raise DomainViolation("twisted kernel requires an integer lattice parameter")
    lam = int(lam)
    q = p.tau.q
    q_w = p.q_w
    sign = -1.0 if m % 2 else 1.0
    pref = sign / math.factorial(m - 1)
    terms = []
    for a in range(0, tr.n_mode + 1):
        for n in (a, -a) if a else (0,):
            if n == -lam:
                continue
            s = n + lam
            nk = complex(n) ** (m - 1) if n else (1.0 if m == 1 else 0.0)
            if nk == 0.0:
                continue
            if s > 0:
                terms.append(nk * q_w**n / (1.0 - q**s))
            else:
                # 1/(1 - q^{s}) with s <= -1
                j = -s
                terms.append(-nk * q_w**n * q**j / (1.0 - q**j))
    return pref * stable_sum(terms)


def weier_p_tilde(m: int, p: AnnulusPoint, z: complex, tr: Truncation) -> complex:
    """Ptilde_m(w, z, tau) = ((-1)^m/(m-1)!) sum_{n in Z} n^{m-1} q_w^n / (1 - q_z q^n)."""
    _check_order(m)
    q = p.tau.q
    q_w = p.q_w
    q_z = phase(z)
    sign = -1.0 if m % 2 else 1.0
    pref = sign / math.factorial(m - 1)
    terms = []
    for a in range(0, tr.n_mode + 1):
        for n in (a, -a) if a else (0,):
            nk = complex(n) ** (m - 1) if n else (1.0 if m == 1 else 0.0)
            if nk == 0.0:
                continue
            if n >= 0:
                den = 1.0 - q_z * q**n
                if abs(den) <= tr.tol:
                    raise PoleHit(f"1 - q_z q^{n} vanished within tolerance")
                terms.append(nk * q_w**n / den)
            else:
                # 1/(1 - q_z q^{-j}) = -(q^j/q_z) / (1 - q^j/q_z)
                j = -n
                r = q**j / q_z
                den = 1.0 - r
                if abs(den) <= tr.tol:
                    raise PoleHit(f"1 - q^{j}/q_z vanished within tolerance")
                terms.append(-nk * (r / q_w**j) / den)
    return pref * stable_sum(terms)


def weier_p_deformed(k: int, twist: TwistPair, p: AnnulusPoint, tr: Truncation) -> complex:
    """P_k[theta; phi](w, tau), the two-parameter deformed kernel.

    P_k[theta;phi](w) = ((-1)^k/(k-1)!) sum'_{n in Z + lam} n^{k-1} q_w^n / (1 - theta^{-1} q^n),

    where the primed sum omits n = 0 exactly when (theta, phi) = (1, 1).
    """
    _check_order(k)
    q = p.tau.q
    lam = twist.lam
    theta_inv = 1.0 / twist.theta
    sign = -1.0 if k % 2 else 1.0
    pref = sign / math.factorial(k - 1)
    omit_zero = twist.is_trivial
    terms = []
    for a in range(0, tr.n_mode + 1):
        for j in (a, -a) if a else (0,):
            n = j + lam
            if n == 0.0 and omit_zero:
                continue
            nk = n ** (k - 1) if n else (1.0 if k == 1 else 0.0)
            if nk == 0.0:
                continue
            q_w_n = cmath.exp(TWO_PI_I * p.w * n)
            if n >= 0.0:
                den = 1.0 - theta_inv * q**n
                if abs(den) <= tr.tol:
                    raise PoleHit(f"1 - theta^{{-1}} q^{n} vanished within tolerance")
                terms.append(nk * q_w_n / den)
            else:
                # 1/(1 - theta^{-1} q^{n}) = -theta q^{-n} / (1 - theta q^{-n}), n < 0
                r = twist.theta * q ** (-n)
                den = 1.0 - r
                if abs(den) <= tr.tol:
                    raise PoleHit("1 - theta q^{|n|} vanished within tolerance")
                terms.append(-nk * q_w_n * r / den)
    return pref * stable_sum(terms)


# ---------------------------------------------------------------------------
# Double-strip evaluators used internally by the Laurent circle fits.  They
# converge for |Im w| < Im tau, w != 0, which covers small circles around
# the origin where the annulus forms do not apply.
# ---------------------------------------------------------------------------


def _p1_flipped(w: complex, tau: ModularPoint, tr: Truncation) -> complex:
    q = tau.q
    q_w = cmath.exp(TWO_PI_I * w)
    head = -0.5 - q_w / (1.0 - q_w)
    terms = []
    for n in range(1, tr.n_q + 1):
        for m_ in range(1, tr.n_q // n + 1):
            terms.append(q ** (n * m_) * (q_w**n - q_w ** (-n)))
    return head - stable_sum(terms)


def _p1_twisted_flipped(lam: int, w: complex, tau: ModularPoint, tr: Truncation) -> complex:
    # index shift identity: P_{1,lam} = q_w^{-lam} (P_1 + 1/2)
    q_w = cmath.exp(TWO_PI_I * w)
    return q_w ** (-lam) * (_p1_flipped(w, tau, tr) + 0.5)


def _p1_tilde_flipped(w: complex, z: complex, tau: ModularPoint, tr: Truncation) -> complex:
    q = tau.q
    q_w = cmath.exp(TWO_PI_I * w)
    q_z = phase(z)
    if abs(1.0 - q_z) <= tr.tol:
        raise PoleHit("Ptilde_1 strip form has a pole at q_z = 1")
    head = -1.0 / (1.0 - q_z) - q_w / (1.0 - q_w)
    terms = []
    for n in range(1, tr.n_q + 1):
        for m_ in range(1, tr.n_q // n + 1):
            terms.append(q ** (n * m_) * (q_w**n * q_z**m_ - q_w ** (-n) * q_z ** (-m_)))
    return head - stable_sum(terms)
