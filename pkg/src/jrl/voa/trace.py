"""Graded traces and direct Fock-space n-point functions.

Trace weights: a basis state s of weight wt, current charge ch, and
parity p contributes

    (-1)^{p * [supertrace]} * e(tau * (wt + cws * ch - c/24 * [c_shift]) + z * ch)

with e(x) = exp(2 pi i x), flux zeta = e(z), and cws an optional extra
weight per unit charge (used by the charge-regraded trace).  Keeping the
exponents additive avoids complex-power branch cuts entirely.

Vertex operators are dressed mode sums: for a single-oscillator state of
species X the insertion at position w contributes modes X(m) with
coefficient q_w^{wt_X - m - 1} (independent of derivative depth).
Operator order is left to right in the argument list, so the last
insertion acts first and must carry the largest Im w:

    0 < Im w_1 < Im w_2 < ... < Im w_n < Im tau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from ..errors import DomainViolation, TruncationLoss, UnsupportedInsertion
from ..specfun.points import ModularPoint, Truncation, phase
from .algebra import (
    VACUUM,
    AlgebraElement,
    AlgebraSpec,
    BasisState,
    ModeOp,
    ModuleSpace,
    _general_binom,
    apply_mode,
    enumerate_basis,
    state_level,
)

DEFAULT_HEADROOM = 12


def current_state(spec: AlgebraSpec) -> AlgebraElement:
    """The distinguished weight-one current as a vacuum-module element."""
    if spec.kind == "heisenberg":
        out = AlgebraElement.zero()
        for f, beta in enumerate(spec.current_coefficients()):
            if beta:
                out.add_term(BasisState(boson=((f, 1),)), beta)
        return out
    if spec.kind == "complex_fermion":
        return AlgebraElement.from_state(BasisState(ferm_b=(1,), ferm_c=(1,)))
    raise UnsupportedInsertion("no distinguished current for this algebra")


def oscillator_state(species: str, j: int = 1, flavor: int = 0) -> AlgebraElement:
    """Single-creator state X(-j)vac."""
    if j < 1:
        raise DomainViolation("creator label must be >= 1")
    if species == "a":
        return AlgebraElement.from_state(BasisState(boson=((flavor, j),)))
    if species == "b":
        return AlgebraElement.from_state(BasisState(ferm_b=(j,)))
    if species == "c":
        return AlgebraElement.from_state(BasisState(ferm_c=(j,)))
    raise DomainViolation(f"unknown species {species!r}")


def _single_components(
    spec: AlgebraSpec, v: AlgebraElement
) -> tuple[complex, list[tuple[complex, str, int, int]]]:
    """Split v into an identity multiple and single-oscillator components."""
    scalar = 0.0 + 0.0j
    comps: list[tuple[complex, str, int, int]] = []
    for state, cv in sorted(v.terms.items()):
        if state == VACUUM:
            scalar += cv
            continue
        nosc = len(state.boson) + len(state.ferm_b) + len(state.ferm_c)
        if nosc != 1:
            raise UnsupportedInsertion(
                "field insertions must be vacuum or single-oscillator states"
            )
        if state.boson:
            comps.append((cv, "a", state.boson[0][0], state.boson[0][1]))
        elif state.ferm_b:
            comps.append((cv, "b", 0, state.ferm_b[0]))
        else:
            comps.append((cv, "c", 0, state.ferm_c[0]))
    return scalar, comps


def apply_field(
    module: ModuleSpace, v: AlgebraElement, w: complex, x: AlgebraElement
) -> AlgebraElement:
    """Dressed vertex operator of v at position w applied to x."""
    spec = module.spec
    scalar, comps = _single_components(spec, v)
    out = x.scaled(scalar)
    out.truncated = out.truncated or x.truncated
    mmax = int(math.ceil(module.cap)) + 2
    for cv, species, flavor, j in comps:
        wt_x = spec.species_weight(species)
        for m in range(-mmax, mmax + 1):
            # (X(-j)vac)(n) = (-1)^{j-1} C(n, j-1) X(n-j+1) with n = m+j-1
            cc = (-1.0) ** (j - 1) * _general_binom(m + j - 1, j - 1)
            if cc == 0.0:
                continue
            term = apply_mode(ModeOp(species, m, flavor), x, module)
            out.truncated = out.truncated or term.truncated
            if term.is_zero():
                continue
            dress = phase(w * (wt_x - m - 1))
            out = out.plus(term.scaled(cv * cc * dress))
    return out


def field_callable(
    module: ModuleSpace, v: AlgebraElement, w: complex
) -> Callable[[AlgebraElement], AlgebraElement]:
    return lambda x: apply_field(module, v, w, x)


def _field_diagonal(
    module: ModuleSpace,
    v: AlgebraElement,
    w: complex,
    elem: AlgebraElement,
    target: BasisState,
    target_level: float,
) -> complex:
    """<target| Yd(v, w) |elem> without building the full image."""
    spec = module.spec
    scalar, comps = _single_components(spec, v)
    total = scalar * elem.terms.get(target, 0.0)
    for cv, species, flavor, j in comps:
        wt_x = spec.species_weight(species)
        for state2, c2 in elem.terms.items():
            # X(m) changes the level by wt_x - 1 - m; solve for m
            delta = target_level - state_level(spec, state2)
            m_f = (wt_x - 1.0) - delta
            m = round(m_f)
            if abs(m_f - m) > 1e-9:
                continue
            cc = (-1.0) ** (j - 1) * _general_binom(m + j - 1, j - 1)
            if cc == 0.0:
                continue
            img = apply_mode(ModeOp(species, m, flavor), AlgebraElement.from_state(state2), module)
            amp = img.terms.get(target)
            if not amp:
                continue
            total += cv * cc * phase(w * (wt_x - m - 1)) * c2 * amp
    return total


@dataclass(frozen=True)
class TraceWeights:
    """Flux and grading data entering the trace weight of each state."""

    flux_z: complex | None = None
    supertrace: bool = False
    include_c_shift: bool = False
    charge_weight_shift: float = 0.0


def _state_factor(
    module: ModuleSpace, tau: ModularPoint, tw: TraceWeights, state: BasisState
) -> complex:
    wt = module.weight(state) + tw.charge_weight_shift * module.charge(state)
    if tw.include_c_shift:
        wt -= module.spec.central_charge / 24.0
    expo = tau.tau * wt
    if tw.flux_z is not None:
        expo = expo + tw.flux_z * module.charge(state)
    f = phase(expo)
    if tw.supertrace and state.parity:
        f = -f
    return f


def graded_trace(
    module: ModuleSpace,
    ops: Sequence[Callable[[AlgebraElement], AlgebraElement]],
    tau: ModularPoint,
    tw: TraceWeights,
    strict: bool = False,
) -> complex:
    """Trace of ops[0] ... ops[-1] against the graded weights.

    ops[0] is the leftmost (outermost) operator.  With strict=True a
    truncation at the level cap raises TruncationLoss instead of being
    absorbed silently.
    """
    total = 0.0 + 0.0j
    for s in module.states:
        elem = AlgebraElement.from_state(s)
        for op in reversed(list(ops)):
            elem = op(elem)
            if elem.is_zero() and not elem.truncated:
                break
        if strict and elem.truncated:
            raise TruncationLoss("operator product leaked above the level cap")
        amp = elem.terms.get(s)
        if amp:
            total += _state_factor(module, tau, tw, s) * amp
    return total


def partition_function(module: ModuleSpace, tau: ModularPoint, tw: TraceWeights) -> complex:
    return graded_trace(module, (), tau, tw)


def npoint_trace(
    module: ModuleSpace,
    insertions: Sequence[tuple[AlgebraElement, complex]],
    tau: ModularPoint,
    tw: TraceWeights,
) -> complex:
    """Direct Fock-space n-point trace.

    insertions[0] is leftmost; positions must be nested,
    0 < Im w_1 < ... < Im w_n < Im tau.  The outermost insertion is
    contracted against the diagonal directly, which keeps the cost at
    one full field application per basis state.
    """
    ws = [complex(w) for _, w in insertions]
    ims = [w.imag for w in ws]
    if ims and not all(x < y for x, y in zip(ims, ims[1:])):
        raise DomainViolation("positions must have strictly increasing Im w")
    if ims and not (0.0 < ims[0] and ims[-1] < tau.tau.imag):
        raise DomainViolation("positions must satisfy 0 < Im w < Im tau")

    total = 0.0 + 0.0j
    n = len(insertions)
    for s in module.states:
        lvl = state_level(module.spec, s)
        if n == 0:
            amp = 1.0 + 0.0j
        else:
            elem = AlgebraElement.from_state(s)
            for v, w in reversed(insertions[1:]):
                elem = apply_field(module, v, w, elem)
                if elem.is_zero():
                    break
            if elem.is_zero():
                continue
            amp = _field_diagonal(module, insertions[0][0], insertions[0][1], elem, s, lvl)
        if amp:
            total += _state_factor(module, tau, tw, s) * amp
    return total


def working_module(
    spec: AlgebraSpec,
    sector: tuple[float, ...],
    cap: float,
    headroom: int = DEFAULT_HEADROOM,
) -> ModuleSpace:
    """Module enlarged by `headroom` levels so that intermediate states in
    operator products are retained.  Contributions needing more headroom
    are suppressed by (|q_{w_inner}| / |q_{w_outer}|)^headroom."""
    return enumerate_basis(spec, sector, cap + headroom)
