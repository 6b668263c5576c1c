import math

import pytest

import oracles
from jrl.errors import DomainViolation, PoleHit
from jrl.specfun import (
    AnnulusPoint,
    ModularPoint,
    SL2Element,
    Truncation,
    TwistPair,
    eisenstein,
    eisenstein_tilde,
    eisenstein_twisted,
    jacobi_slash,
    laurent_coeffs_p1,
    p1_twisted_series_coefficient,
    weier_p,
    weier_p_deformed,
    weier_p_tilde,
    weier_p_twisted,
)

TR = Truncation(n_q=48, n_mode=96, tol=1e-14)
HALF_I = ModularPoint(0.5j)
W0 = 0.1 + 0.08j
Z0 = 0.23 - 0.11j


def pt(w, tau=HALF_I):
    return AnnulusPoint(w, tau)


def test_p_family_against_theta_derivatives():
    assert abs(weier_p(1, pt(W0), TR) - oracles.P1_THETA) < 1e-13
    assert abs(weier_p(2, pt(W0), TR) - oracles.P2_THETA) < 1e-13
    assert abs(weier_p(3, pt(W0), TR) - oracles.P3_THETA) < 1e-13
    assert abs(weier_p(4, pt(W0), TR) - oracles.P4_THETA) < 1e-13


def test_p_tilde_against_theta_quotient():
    got = weier_p_tilde(1, pt(W0), Z0, TR)
    assert abs(got - oracles.P1_TILDE_THETA) < 1e-13


def test_p_periodicity_in_w():
    for m in (1, 2, 3):
        a = weier_p(m, pt(W0), TR)
        b = weier_p(m, pt(W0 + 1.0), TR)
        assert abs(a - b) < 1e-12


def test_annulus_domain_enforced():
    # evaluation points live strictly between the two torus boundaries
    with pytest.raises(DomainViolation):
        AnnulusPoint(W0 + 0.5j, HALF_I)
    with pytest.raises(DomainViolation):
        AnnulusPoint(0.0 + 0.0j, HALF_I)


def test_p_tilde_flux_periodic():
    a = weier_p_tilde(1, pt(W0), Z0, TR)
    b = weier_p_tilde(1, pt(W0), Z0 + 1.0, TR)
    assert abs(a - b) < 1e-12


def test_p_twisted_at_zero_matches_plain_plus_half():
    # the twisted family drops the constant -1/2 carried by plain P_1
    a = weier_p_twisted(1, 0, pt(W0), TR)
    b = weier_p(1, pt(W0), TR)
    assert abs(a - (b + 0.5)) < 1e-12
    for m in (2, 3):
        assert abs(weier_p_twisted(m, 0, pt(W0), TR) - weier_p(m, pt(W0), TR)) < 1e-12


def test_p_deformed_trivial_twist_matches_twisted():
    tw = TwistPair(theta=1.0 + 0.0j, phi=1.0 + 0.0j, lam=0)
    for k in (1, 2):
        a = weier_p_deformed(k, tw, pt(W0), TR)
        b = weier_p_twisted(k, 0, pt(W0), TR)
        assert abs(a - b) < 1e-12


def test_p_tilde_pole_at_lattice_flux():
    with pytest.raises(PoleHit):
        weier_p_tilde(1, pt(W0), 0.5j, TR)  # z = tau sits on the flux lattice


def test_e_tilde_pole_at_trivial_flux():
    from jrl.errors import PoleAtTrivialZ

    with pytest.raises(PoleAtTrivialZ):
        eisenstein_tilde(1, 0.0, HALF_I, TR)


def test_laurent_fit_twisted_recovers_coefficients():
    lam = 2
    fit = laurent_coeffs_p1("twisted", {"lam": lam}, HALF_I, 6, TR)
    assert fit.kind == "twisted"
    assert abs(fit.pole_coefficient - 1.0) < 1e-8
    for k in range(1, 7):
        want = -p1_twisted_series_coefficient(k, float(lam), HALF_I, TR)
        assert abs(fit.coefficients[k - 1] - want) < 1e-8


def test_laurent_fit_tilde_recovers_coefficients():
    fit = laurent_coeffs_p1("tilde", {"z": Z0}, HALF_I, 6, TR)
    assert abs(fit.pole_coefficient - 1.0) < 1e-8
    for k in range(1, 7):
        want = -eisenstein_tilde(k, Z0, HALF_I, TR)
        assert abs(fit.coefficients[k - 1] - want) < 1e-8


def test_laurent_fit_rejects_unknown_kind():
    with pytest.raises(ValueError):
        laurent_coeffs_p1("nope", {}, HALF_I, 4, TR)


def test_slash_weight_4_s_invariance():
    gamma = SL2Element(0, -1, 1, 0)
    tau = 0.1 + 1.1j

    def f(z, t):
        return eisenstein(4, ModularPoint(t), TR)

    got = jacobi_slash(f, 4, 0.0, gamma, (0.0, 0.0), 0.0, tau)
    want = eisenstein(4, ModularPoint(tau), TR)
    assert abs(got - want) < 1e-10


def test_slash_composition():
    # slash by S twice equals slash by S^2 = -1 which acts trivially
    gamma = SL2Element(0, -1, 1, 0)
    tau = 0.2 + 0.9j

    def f(z, t):
        return eisenstein(4, ModularPoint(t), TR) * (1.0 + 0.5 * z)

    once = lambda z, t: jacobi_slash(f, 4, 0.0, gamma, (0.0, 0.0), z, t)
    twice = jacobi_slash(once, 4, 0.0, gamma, (0.0, 0.0), 0.13, tau)
    direct = f(-0.13, tau)
    assert abs(twice - direct) < 1e-9


def test_e2_anomaly_shape():
    # E_2 fails weight-2 S-covariance by exactly tau/(2 pi i)
    tau = 1j
    s_tau = -1.0 / tau
    lhs = eisenstein(2, ModularPoint(s_tau), TR)
    rhs = tau**2 * eisenstein(2, ModularPoint(tau), TR) - tau / (2j * math.pi)
    assert abs(lhs - rhs) < 1e-12
