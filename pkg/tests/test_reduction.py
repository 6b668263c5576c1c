import math

import pytest

import oracles
from jrl.errors import (
    AdmissibilityViolation,
    DegenerateInsertion,
    NonIntegerWeight,
    NotOnLattice,
    UnsupportedInsertion,
)
from jrl.specfun import ModularPoint, Truncation, eisenstein, eisenstein_tilde
from jrl.voa import AlgebraSpec, current_state, oscillator_state
from jrl.reduction import (
    JacobiParams,
    NPointRequest,
    identity_rec1,
    identity_v0_sum,
    identity_zero_res,
    npoint_oracle,
    reduce_full,
    reduce_negative_mode,
    reduce_step,
)

TAU = ModularPoint(0.5j)
Z0 = 0.23 - 0.11j
HEIS = AlgebraSpec(kind="heisenberg", rank=1)
CFERM = AlgebraSpec(kind="complex_fermion", grading="charge_shifted")
RFERM = AlgebraSpec(kind="real_fermion")


def heis_request(n=1, cap=8.0, alpha=0.6):
    J = current_state(HEIS)
    ws = [0.12j, 0.31j][:n]
    return NPointRequest(
        spec=HEIS,
        sector=(alpha,),
        cap=cap,
        insertions=tuple((J, w) for w in ws),
        params=JacobiParams(z=Z0, tau=TAU),
    )


def cferm_request(cap=8.0, z=Z0):
    return NPointRequest(
        spec=CFERM,
        sector=(),
        cap=cap,
        insertions=(
            (oscillator_state("b", 1), 0.12j),
            (oscillator_state("c", 1), 0.31j),
        ),
        params=JacobiParams(z=z, tau=TAU, supertrace=True),
    )


def test_one_point_current_frozen_value():
    req = heis_request(n=1)
    got = npoint_oracle(req)
    assert abs(got - oracles.TRACE_J_HEISENBERG) < 1e-12


def test_one_point_current_reduces():
    req = heis_request(n=1)
    val, ledger = reduce_full(req)
    ref = npoint_oracle(req)
    assert abs(val - ref) / abs(ref) < 1e-10
    assert ledger.n == 0
    # a one-point current stage is a bare zero-mode scalar
    assert [t.kind for t in ledger.terms] == ["zero_scalar"]


def test_two_point_current_reduces():
    req = heis_request(n=2)
    ref = npoint_oracle(req)
    assert abs(ref - oracles.TRACE_JJ_HEISENBERG) < 1e-12
    val, ledger = reduce_full(req)
    assert abs(val - ref) / abs(ref) < 1e-8
    kinds = sorted((t.kind, t.name) for t in ledger.terms)
    assert ("kernel", "weier_p_twisted") in kinds


def test_complex_fermion_pair_reduces():
    req = cferm_request()
    ref = npoint_oracle(req)
    assert abs(ref - oracles.TRACE_BC_COMPLEX_FERMION) < 1e-12
    val, ledger = reduce_full(req)
    assert abs(val - ref) / abs(ref) < 1e-10
    # generic flux on a charged insertion selects the tilde kernel
    assert [t.name for t in ledger.terms if t.kind == "kernel"] == ["weier_p_tilde"]


def test_real_fermion_pair_reduces():
    req = NPointRequest(
        spec=RFERM,
        sector=(),
        cap=7.5,
        insertions=(
            (oscillator_state("b", 1), 0.12j),
            (oscillator_state("b", 1), 0.31j),
        ),
        params=JacobiParams(z=Z0, tau=TAU, supertrace=True),
    )
    ref = npoint_oracle(req)
    assert abs(ref - oracles.TRACE_BB_REAL_FERMION) < 1e-12
    val, ledger = reduce_full(req)
    assert abs(val - ref) / abs(ref) < 1e-9
    # half-integer weight forces the deformed kernel and kills the zero term
    assert [t.name for t in ledger.terms] == ["weier_p_deformed"]


def test_lattice_flux_routes_through_zero_trace():
    req = cferm_request(z=TAU.tau)
    ref = npoint_oracle(req)
    val, ledger = reduce_full(req)
    assert abs(val - ref) / max(1.0, abs(ref)) < 1e-8
    kinds = [t.kind for t in ledger.terms]
    assert "zero_trace" in kinds
    names = [t.name for t in ledger.terms if t.kind == "kernel"]
    assert names == ["weier_p_twisted"]


def test_negative_mode_current_squared():
    # o(J(-1)J) insertion equals (alpha^2 + E_2) times the plain trace
    req = heis_request(n=1, alpha=0.6)
    J = current_state(HEIS)
    val, _ = reduce_negative_mode(req, J, 1)
    z0 = npoint_oracle(req.with_insertions(()))
    e2 = eisenstein(2, TAU, req.truncation)
    want = (0.36 + e2) * z0
    assert abs(val - want) / abs(want) < 1e-12


def test_negative_mode_fermion_bilinear():
    req = cferm_request()
    b = oscillator_state("b", 1)
    val, _ = reduce_negative_mode(
        req.with_insertions(((oscillator_state("c", 1), 0.12j),)), b, 1
    )
    z0 = npoint_oracle(req.with_insertions(()))
    want = -eisenstein_tilde(1, Z0, TAU, req.truncation) * z0
    assert abs(val - want) / abs(want) < 1e-10


def test_negative_mode_rejects_deep_fermion_stacks():
    req = cferm_request()
    b = oscillator_state("b", 1)
    with pytest.raises(UnsupportedInsertion):
        reduce_negative_mode(req, b, 2)


def test_v0_sum_vanishes_complex_fermion():
    req = cferm_request()
    J = current_state(CFERM)
    assert identity_v0_sum(req, J) < 1e-10


def test_v0_sum_rejects_non_integer_weight():
    req = NPointRequest(
        spec=RFERM,
        sector=(),
        cap=7.5,
        insertions=((oscillator_state("b", 1), 0.12j),),
        params=JacobiParams(z=Z0, tau=TAU, supertrace=True),
    )
    with pytest.raises(NonIntegerWeight):
        identity_v0_sum(req, oscillator_state("b", 1))


def test_rec1_heisenberg():
    req = heis_request(n=1)
    J = current_state(HEIS)
    assert identity_rec1(req, J, 1) < 1e-6
    assert identity_rec1(req, J, 2) < 1e-6


def test_rec1_rejects_non_positive_mode():
    req = heis_request(n=1)
    with pytest.raises(NotOnLattice):
        identity_rec1(req, current_state(HEIS), 0)


def test_zero_res_on_lattice():
    b = oscillator_state("b", 1)
    c = oscillator_state("c", 1)
    for z in (TAU.tau, TAU.tau + 1.0):
        req = NPointRequest(
            spec=CFERM,
            sector=(),
            cap=8.0,
            insertions=((c, 0.12j),),
            params=JacobiParams(z=z, tau=TAU, supertrace=True),
        )
        assert identity_zero_res(req, b) < 1e-8


def test_zero_res_rejects_generic_flux():
    b = oscillator_state("b", 1)
    req = cferm_request()
    with pytest.raises(NotOnLattice):
        identity_zero_res(req, b)


def test_degenerate_insertion_detected():
    # sector tuned so the zero-mode square cancels the kernel contribution
    alpha = math.sqrt(0.30742299368080717)
    J = current_state(HEIS)
    req = NPointRequest(
        spec=HEIS,
        sector=(alpha,),
        cap=8.0,
        insertions=((J, 0.12j), (J, 0.5 + 0.31j)),
        params=JacobiParams(z=Z0, tau=TAU),
    )
    with pytest.raises(DegenerateInsertion):
        reduce_full(req)
    detuned = NPointRequest(
        spec=HEIS,
        sector=(alpha + 0.01,),
        cap=8.0,
        insertions=((J, 0.12j), (J, 0.5 + 0.31j)),
        params=JacobiParams(z=Z0, tau=TAU),
    )
    val, _ = reduce_full(detuned)
    assert abs(val) > 1e-4


def test_reduce_step_subset_of_full():
    req = heis_request(n=2)
    step = reduce_step(req)
    val, ledger = reduce_full(req)
    assert len(step.terms) == len(ledger.terms)
    total = 0.0 + 0.0j
    for t in step.terms:
        child = npoint_oracle(t.child) if t.child is not None else t.leaf_value
        total += t.scale * t.kernel * child
    assert abs(total - val) / abs(val) < 1e-8
