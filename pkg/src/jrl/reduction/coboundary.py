"""Coboundary maps built from the reduction coefficient tables.

A FunctionFamily is an n-point evaluable that can be re-evaluated with
modified insertion elements; coboundary_apply(variant, v, family)
produces the (n+1)-point family whose value at (vs, ws) is the
reduction right-hand side driven by the new insertion.  Composing two
applications gives the chain map whose residual chain_condition_residual
samples on a seeded grid.

Variants:
  simplest  branch-selected kernels, exactly the tables used by reduce_step
  main      same table, but only admissible where v[l].v_k = 0 for l >= 1
  shifted   undeformed kernels P_{m+1}, lattice-shifted modes v[m]_h, and
            the mu-shifted zero mode
  super     deformed kernels P_{m+1}[theta; phi] with the displayed
            pairwise parity factor
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..errors import AdmissibilityViolation, DomainViolation, GridDegenerate
from ..specfun.points import AnnulusPoint, TwistPair, phase
from ..specfun.weierstrass import (
    weier_p,
    weier_p_deformed,
    weier_p_tilde,
    weier_p_twisted,
)
from ..voa.algebra import AlgebraElement, state_level, zero_mode_operator
from ..voa.squarebracket import shifted_square_bracket_image, square_bracket_image
from ..voa.trace import field_callable, graded_trace
from .steps import _select_branch, reduce_full
from .types import (
    NPointRequest,
    element_weight_charge,
    npoint_oracle,
    vacuum_module,
)

VARIANTS = ("main", "simplest", "shifted", "super")


@dataclass(frozen=True)
class FunctionFamily:
    """n-point evaluable over modified insertion elements."""

    n: int
    base_elements: tuple[AlgebraElement, ...]
    fn: Callable[[tuple[AlgebraElement, ...], tuple[complex, ...]], complex]

    def evaluate(self, vs: Sequence[AlgebraElement], ws: Sequence[complex]) -> complex:
        vs = tuple(vs)
        ws = tuple(ws)
        if len(vs) != self.n or len(ws) != self.n:
            raise DomainViolation(f"family expects {self.n} insertions")
        return self.fn(vs, ws)


def oracle_family(req: NPointRequest) -> FunctionFamily:
    return FunctionFamily(
        n=req.n,
        base_elements=tuple(v for v, _ in req.insertions),
        fn=lambda vs, ws: npoint_oracle(req.with_insertions(tuple(zip(vs, ws)))),
    )


def reduction_family(req: NPointRequest) -> FunctionFamily:
    return FunctionFamily(
        n=req.n,
        base_elements=tuple(v for v, _ in req.insertions),
        fn=lambda vs, ws: reduce_full(req.with_insertions(tuple(zip(vs, ws))))[0],
    )


@dataclass(frozen=True)
class StageContribution:
    kind: str
    k: int
    m: int
    name: str
    value: complex


def _check_admissible(
    context: NPointRequest, v_d: AlgebraElement, vs: tuple[AlgebraElement, ...]
) -> None:
    vac = vacuum_module(context.spec)
    wt_d, _, _ = element_weight_charge(context.spec, v_d)
    for v_k in vs:
        level_k = max(state_level(context.spec, s) for s in v_k.terms) if not v_k.is_zero() else 0
        lmax = int(math.ceil(level_k + wt_d + 2))
        for l in range(1, lmax + 1):
            if not square_bracket_image(vac, v_d, l, v_k).is_zero():
                raise AdmissibilityViolation(
                    f"v[{l}].v_k is nonzero; the plain-coefficient variant does not apply"
                )


def stage_contributions(
    variant: str,
    context: NPointRequest,
    family: FunctionFamily,
    vs: tuple[AlgebraElement, ...],
    ws: tuple[complex, ...],
) -> list[StageContribution]:
    """Contributions of one coboundary stage at insertion data (vs, ws).

    vs/ws carry n+1 entries; the last is the distinguished insertion."""
    if variant not in VARIANTS:
        raise DomainViolation(f"unknown variant {variant!r}")
    spec = context.spec
    tr = context.truncation
    tau = context.params.tau
    v_d, w_d = vs[-1], complex(ws[-1])
    base_vs, base_ws = vs[:-1], tuple(complex(w) for w in ws[:-1])
    wt_d, ch_d, par_d = element_weight_charge(spec, v_d)
    phi = phase(complex(wt_d))
    theta = phase(-ch_d * complex(context.params.z))
    integer_weight = abs(phi - 1.0) <= 1e-12
    global_sign = -1.0 if par_d else 1.0
    vac = vacuum_module(spec)

    if variant == "main":
        _check_admissible(context, v_d, base_vs)

    force_super = variant == "super"
    branch = None
    if not force_super:
        branch = _select_branch(context, ch_d, integer_weight)
    elif integer_weight and abs(theta - 1.0) <= 1e-12:
        # super zero-mode term is gated by delta_{theta,1} delta_{phi,1}
        branch = _select_branch(context, ch_d, True)

    out: list[StageContribution] = []

    # zero-mode term
    if branch is not None and branch.kind == "lattice" and (not force_super or branch.lam == 0):
        lam = branch.lam
        if variant == "shifted":
            mu = branch.mu
            pref = global_sign
            module = context.module()
            o_op = zero_mode_operator(module, v_d, mu)
            ops = [o_op] + [field_callable(module, v, w) for v, w in zip(base_vs, base_ws)]
            val = graded_trace(module, ops, tau, context.params.trace_weights())
            out.append(StageContribution("zero_trace", 0, 0, "o_mu", pref * val))
        else:
            pref = global_sign * phase(-w_d * lam)
            scalar = None
            if lam == 0:
                scalar = 0.0 + 0.0j
                for state, cv in v_d.terms.items():
                    if not state.boson and not state.ferm_b and not state.ferm_c:
                        scalar += cv
                    elif (
                        spec.kind == "heisenberg"
                        and len(state.boson) == 1
                        and state.boson[0][1] == 1
                    ):
                        scalar += cv * context.sector[state.boson[0][0]]
                    else:
                        scalar = None
                        break
            if scalar is not None:
                val = scalar * family.evaluate(base_vs, base_ws)
                out.append(StageContribution("zero_scalar", 0, 0, "one", pref * val))
            else:
                module = context.module()
                o_op = zero_mode_operator(module, v_d, lam)
                ops = [o_op] + [
                    field_callable(module, v, w) for v, w in zip(base_vs, base_ws)
                ]
                val = graded_trace(module, ops, tau, context.params.trace_weights())
                out.append(StageContribution("zero_trace", 0, 0, "o_lam", pref * val))

    # kernel terms
    par_prefix = 0
    for k in range(1, len(base_vs) + 1):
        v_k = base_vs[k - 1]
        w_k = base_ws[k - 1]
        diff = w_d - w_k
        point = AnnulusPoint(diff, tau)
        deformed_here = force_super or (branch is None)
        if deformed_here:
            pair_sign = -1.0 if (par_d and par_prefix % 2) else 1.0
            twist = TwistPair.from_theta_phi(theta, phi)
        else:
            pair_sign = 1.0
            twist = None
        level_k = max(state_level(spec, s) for s in v_k.terms) if not v_k.is_zero() else 0
        mmax = int(math.ceil(level_k + wt_d + 2))
        for m in range(0, mmax + 1):
            if variant == "shifted":
                lam_sh = branch.lam if branch is not None else 0
                img = shifted_square_bracket_image(vac, v_d, m, lam_sh, v_k)
            else:
                img = square_bracket_image(vac, v_d, m, v_k)
            if img.is_zero():
                continue
            if variant == "shifted":
                kernel = weier_p(m + 1, point, tr)
                name = "weier_p"
            elif deformed_here:
                kernel = weier_p_deformed(m + 1, twist, point, tr)
                name = "weier_p_deformed"
            elif branch.kind == "lattice":
                kernel = weier_p_twisted(m + 1, branch.lam, point, tr)
                name = "weier_p_twisted"
            else:
                kernel = weier_p_tilde(m + 1, point, ch_d * complex(context.params.z), tr)
                name = "weier_p_tilde"
            mod_vs = base_vs[: k - 1] + (img,) + base_vs[k:]
            val = family.evaluate(mod_vs, base_ws)
            out.append(
                StageContribution(
                    "kernel", k, m, name, global_sign * pair_sign * kernel * val
                )
            )
        _, _, par_k = element_weight_charge(spec, v_k)
        par_prefix += par_k

    out.sort(key=lambda c: (c.k, c.m))
    return out


def coboundary_apply(
    variant: str,
    v_next: AlgebraElement,
    family: FunctionFamily,
    context: NPointRequest,
) -> FunctionFamily:
    """The (n+1)-point family (delta^n family) with v_next in the new slot."""

    def fn(vs: tuple[AlgebraElement, ...], ws: tuple[complex, ...]) -> complex:
        contribs = stage_contributions(variant, context, family, vs, ws)
        return sum((c.value for c in contribs), 0.0 + 0.0j)

    return FunctionFamily(
        n=family.n + 1,
        base_elements=family.base_elements + (v_next,),
        fn=fn,
    )


def sample_grid(
    n_points: int,
    tau: complex,
    n_samples: int = 8,
    seed: int = 0x4A43,
) -> list[tuple[complex, ...]]:
    """Deterministic nested-position configurations for probes."""
    rng = np.random.default_rng(seed)
    grid: list[tuple[complex, ...]] = []
    for _ in range(n_samples):
        fracs = np.sort(rng.uniform(0.08, 0.92, size=n_points))
        # keep neighbours separated so positions stay distinct
        for i in range(1, len(fracs)):
            if fracs[i] - fracs[i - 1] < 0.02:
                fracs[i] = fracs[i - 1] + 0.02
        fracs = np.clip(fracs, 0.05, 0.95)
        res = rng.uniform(-0.45, 0.45, size=n_points)
        grid.append(tuple(complex(re, fr * tau.imag) for re, fr in zip(res, fracs)))
    return grid


def chain_condition_residual(
    variant: str,
    v1: AlgebraElement,
    v2: AlgebraElement,
    family: FunctionFamily,
    context: NPointRequest,
    n_samples: int = 8,
    seed: int = 0x4A43,
) -> float:
    """max_s |(delta(v2) delta(v1) family)(ws_s)| / max(|family|, eps)."""
    once = coboundary_apply(variant, v1, family, context)
    twice = coboundary_apply(variant, v2, once, context)
    tau = context.params.tau.tau
    grid = sample_grid(family.n + 2, tau, n_samples=n_samples, seed=seed)
    num = 0.0
    den = 0.0
    for ws in grid:
        base_ws = ws[: family.n]
        if family.n:
            den = max(den, abs(family.evaluate(family.base_elements, base_ws)))
        vs = family.base_elements + (v1, v2)
        num = max(num, abs(twice.evaluate(vs, ws)))
    if family.n == 0:
        den = abs(family.evaluate((), ()))
    return num / max(den, 1e-12)


@dataclass(frozen=True)
class ProbeResult:
    rank: int
    kernel_dim: int
    singular_values: tuple[float, ...]


def cohomology_probe(
    variant: str,
    v_next: AlgebraElement,
    candidates: Sequence[FunctionFamily],
    context: NPointRequest,
    grid: Sequence[tuple[complex, ...]],
    threshold: float = 1e-8,
) -> ProbeResult:
    """Numerical rank of the coboundary applied to candidate families.

    M[i, j] = (delta(v_next) candidate_j)(grid_i); the kernel dimension is
    len(candidates) - rank at the relative SVD threshold."""
    if not candidates:
        raise GridDegenerate("no candidate families")
    n = candidates[0].n
    if any(c.n != n for c in candidates):
        raise GridDegenerate("candidate families disagree on n")
    rows = [tuple(complex(w) for w in ws) for ws in grid]
    if len(rows) < len(candidates):
        raise GridDegenerate("fewer grid configurations than candidates")
    if len(set(rows)) != len(rows):
        raise GridDegenerate("repeated grid configurations")
    if any(len(ws) != n + 1 for ws in rows):
        raise GridDegenerate(f"grid configurations must carry {n + 1} positions")

    mat = np.empty((len(rows), len(candidates)), dtype=complex)
    for j, cand in enumerate(candidates):
        image = coboundary_apply(variant, v_next, cand, context)
        vs = cand.base_elements + (v_next,)
        for i, ws in enumerate(rows):
            mat[i, j] = image.evaluate(vs, ws)
    sing = np.linalg.svd(mat, compute_uv=False)
    smax = float(sing[0]) if len(sing) else 0.0
    if smax == 0.0:
        rank = 0
    else:
        rank = int(np.sum(sing > threshold * smax))
    return ProbeResult(
        rank=rank,
        kernel_dim=len(candidates) - rank,
        singular_values=tuple(float(s) for s in sing),
    )
