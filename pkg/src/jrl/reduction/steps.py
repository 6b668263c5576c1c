"""Reduction of an (n+1)-point trace to n-point traces.

The distinguished insertion is the last one (innermost in the trace,
largest Im w).  One step rewrites the trace as

    Z(x_1, ..., x_{n+1}) = [zero-mode term]
        + sum_{k=1}^{n} sum_{m>=0} s_k * K_{m+1}(w_{n+1} - w_k) * Z((v_{n+1}[m].)_k x_n)

with kernel family K chosen by branch:

  generic     K_{m+1} = Ptilde_{m+1}(w_diff, alpha z, tau), alpha the charge
              of v_{n+1}; no zero-mode term.
  lattice     alpha z = lam tau + mu: K_{m+1} = P_{m+1,lam}(w_diff, tau) plus
              the zero-mode term e(-w_{n+1} lam) Tr(o_lam(v_{n+1}) Y(...) ...).
  deformed    non-integer weight: K_{m+1} = P_{m+1}[theta; phi](w_diff, tau)
              with theta = zeta^{-alpha}, phi = e(wt); the displayed terms
              carry the parity factor p(v_{n+1}, v_1..v_{k-1}).

All right-hand terms additionally carry the global sign (-1)^{p(v_{n+1})}
fixed by matching direct supertraces of fermion two-point functions; the
deformed branch keeps its displayed pairwise parity factor on top of it,
the other two branches have none.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import DegenerateInsertion, UnsupportedInsertion
from ..specfun.points import AnnulusPoint, TwistPair, phase
from ..specfun.weierstrass import weier_p_deformed, weier_p_tilde, weier_p_twisted
from ..specfun.eisenstein import eisenstein_tilde, eisenstein_twisted
from ..voa.algebra import VACUUM, AlgebraElement, state_level, zero_mode_operator
from ..voa.squarebracket import square_bracket_image
from ..voa.trace import field_callable, graded_trace, partition_function
from .types import (
    Branch,
    BranchSelector,
    CoefficientLedger,
    JacobiParams,
    LedgerTerm,
    NPointRequest,
    element_weight_charge,
    npoint_oracle,
    vacuum_module,
)


@dataclass(frozen=True)
class StepTerm:
    kind: str
    k: int
    m: int
    name: str
    args: dict
    scale: complex
    kernel: complex
    child: NPointRequest | None
    leaf_value: complex | None = None


@dataclass(frozen=True)
class StepResult:
    branch: Branch | None
    phi: complex
    theta: complex
    terms: tuple[StepTerm, ...]


def _select_branch(req: NPointRequest, alpha: float, integer_weight: bool) -> Branch | None:
    if not integer_weight:
        return None
    if req.params.shift is not None:
        lam, mu = req.params.shift
        return Branch(kind="lattice", lam=int(lam), mu=int(mu))
    return BranchSelector().classify(alpha, req.params.z, req.params.tau)


def _zero_mode_term(
    req: NPointRequest,
    v_d: AlgebraElement,
    w_d: complex,
    base: tuple[tuple[AlgebraElement, complex], ...],
    branch: Branch,
    global_sign: float,
) -> StepTerm:
    """Lattice-branch zero-mode term e(-w_d lam) Tr(o_lam(v) Y(...) ...)."""
    lam = branch.lam
    pref = global_sign * phase(-complex(w_d) * lam)
    spec = req.spec

    # scalar fast path: lam = 0 with v built from the vacuum and
    # weight-one boson states, whose zero modes act by sector scalars
    if lam == 0:
        scalar = 0.0 + 0.0j
        ok = True
        for state, cv in v_d.terms.items():
            if state == VACUUM:
                scalar += cv  # o_0(1) = id
            elif (
                spec.kind == "heisenberg"
                and len(state.boson) == 1
                and state.boson[0][1] == 1
            ):
                scalar += cv * req.sector[state.boson[0][0]]
            else:
                ok = False
                break
        if ok:
            child = req.with_insertions(base)
            return StepTerm(
                kind="zero_scalar",
                k=0,
                m=0,
                name="one",
                args={},
                scale=pref * scalar,
                kernel=1.0 + 0.0j,
                child=child,
            )

    # general path: direct graded trace with o_lam(v) inserted leftmost
    module = req.module()
    o_op = zero_mode_operator(module, v_d, lam)
    ops = [o_op] + [field_callable(module, v, w) for v, w in base]
    value = graded_trace(module, ops, req.params.tau, req.params.trace_weights())
    return StepTerm(
        kind="zero_trace",
        k=0,
        m=0,
        name="one",
        args={},
        scale=pref,
        kernel=1.0 + 0.0j,
        child=None,
        leaf_value=value,
    )


def reduce_step(req: NPointRequest) -> StepResult:
    """One reduction stage acting on the last insertion."""
    if req.n < 1:
        raise UnsupportedInsertion("nothing to reduce in a zero-point request")
    v_d, w_d = req.insertions[-1]
    base = req.insertions[:-1]
    spec = req.spec
    wt_d, ch_d, par_d = element_weight_charge(spec, v_d)
    phi = phase(complex(wt_d))
    theta = phase(-ch_d * complex(req.params.z))
    integer_weight = abs(phi - 1.0) <= 1e-12
    branch = _select_branch(req, ch_d, integer_weight)
    global_sign = -1.0 if par_d else 1.0
    tau = req.params.tau
    tr = req.truncation
    vac = vacuum_module(spec)

    terms: list[StepTerm] = []
    if branch is not None and branch.kind == "lattice":
        terms.append(_zero_mode_term(req, v_d, w_d, base, branch, global_sign))

    par_prefix = 0
    for k, (v_k, w_k) in enumerate(base, start=1):
        diff = complex(w_d) - complex(w_k)
        point = AnnulusPoint(diff, tau)
        if branch is None:
            # deformed branch keeps its displayed pairwise parity factor
            pair_sign = -1.0 if (par_d and par_prefix % 2) else 1.0
            twist = TwistPair.from_theta_phi(theta, phi)
        else:
            pair_sign = 1.0
            twist = None
        level_k = max(state_level(spec, s) for s in v_k.terms) if not v_k.is_zero() else 0
        mmax = int(math.ceil(level_k + wt_d + 2))
        for m in range(0, mmax + 1):
            img = square_bracket_image(vac, v_d, m, v_k)
            if img.is_zero():
                continue
            if branch is None:
                name = "weier_p_deformed"
                args = {
                    "m": m + 1,
                    "w": diff,
                    "tau": tau.tau,
                    "theta": twist.theta,
                    "phi": twist.phi,
                    "lam": twist.lam,
                }
                kernel = weier_p_deformed(m + 1, twist, point, tr)
            elif branch.kind == "lattice":
                name = "weier_p_twisted"
                args = {"m": m + 1, "w": diff, "tau": tau.tau, "lam": branch.lam}
                kernel = weier_p_twisted(m + 1, branch.lam, point, tr)
            else:
                name = "weier_p_tilde"
                args = {"m": m + 1, "w": diff, "tau": tau.tau, "z": ch_d * complex(req.params.z)}
                kernel = weier_p_tilde(m + 1, point, ch_d * complex(req.params.z), tr)
            child_insertions = base[:k - 1] + ((img, w_k),) + base[k:]
            terms.append(
                StepTerm(
                    kind="kernel",
                    k=k,
                    m=m,
                    name=name,
                    args=args,
                    scale=global_sign * pair_sign,
                    kernel=kernel,
                    child=req.with_insertions(child_insertions),
                )
            )
        _, _, par_k = element_weight_charge(spec, v_k)
        par_prefix += par_k

    terms.sort(key=lambda t: (t.k, t.m))
    return StepResult(branch=branch, phi=phi, theta=theta, terms=tuple(terms))


def reduce_full(req: NPointRequest) -> tuple[complex, CoefficientLedger]:
    """Full recursive reduction down to zero-point traces.

    Raises DegenerateInsertion when a stage with nonzero contributions
    sums to a value smaller than roundoff allows ratios to survive."""
    if req.n == 0:
        value = partition_function(req.module(), req.params.tau, req.params.trace_weights())
        return value, CoefficientLedger(n=0, value=value, terms=(), is_leaf=True)

    step = reduce_step(req)
    ledger_terms: list[LedgerTerm] = []
    total = 0.0 + 0.0j
    scale_sum = 0.0
    for t in step.terms:
        if t.child is not None:
            child_value, child_ledger = reduce_full(t.child)
        else:
            child_value, child_ledger = t.leaf_value, None
        contrib = t.scale * t.kernel * child_value
        total += contrib
        scale_sum += abs(contrib)
        ledger_terms.append(
            LedgerTerm(
                kind=t.kind,
                k=t.k,
                m=t.m,
                name=t.name,
                args=t.args,
                scale=t.scale,
                kernel=t.kernel,
                child=child_ledger,
                child_value=child_value,
            )
        )
    coeff_weight = sum(abs(t.scale * t.kernel) for t in step.terms)
    if coeff_weight > req.truncation.tol and scale_sum > 0.0 and abs(total) < 1e-12 * scale_sum:
        raise DegenerateInsertion(
            "reduction stage vanished although nonzero coefficients contributed"
        )
    return total, CoefficientLedger(
        n=req.n - 1, value=total, terms=tuple(ledger_terms), is_leaf=False
    )


def reduce_negative_mode(
    req: NPointRequest, v: AlgebraElement, l: int
) -> tuple[complex, CoefficientLedger]:
    """Evaluate Z((v[-l].x_1), x_2, ..., x_n) by pushing the negative mode out.

    generic branch (alpha z off the lattice):

        sum_{m>=0} (-1)^{m+1} C(m+l-1, m) Etilde_{m+l}(alpha z) Z(v[m].x_1, ...)
      + sum_{k>=2} sum_m (-1)^{l+1} C(m+l-1, m) Ptilde_{m+l}(w_1 - w_k, alpha z) Z(v[m].x_k ...)

    lattice branch adds the head trace
        (-1)^{l+1} (lam^{l-1}/(l-1)!) Tr(v(lam + wt - 1) Y(...) zeta^{J} q^{L})
    and replaces Etilde/Ptilde by E_{m+l,lam}/P_{m+l,lam}.

    Only even v is supported for n >= 2; the pairwise parity bookkeeping
    of odd insertions across other slots is not validated.
    """
    if l < 1:
        raise UnsupportedInsertion("negative-mode index must be >= 1")
    if req.n < 1:
        raise UnsupportedInsertion("need a slot to attach the negative mode")
    spec = req.spec
    wt_v, ch_v, par_v = element_weight_charge(spec, v)
    if par_v and req.n >= 2:
        raise UnsupportedInsertion("odd insertions with extra slots are not supported here")
    branch = _select_branch(req, ch_v, True) if abs(phase(complex(wt_v)) - 1.0) <= 1e-12 else None
    if branch is None:
        raise UnsupportedInsertion("negative-mode rules need an integer-weight insertion")
    tau = req.params.tau
    tr = req.truncation
    vac = vacuum_module(spec)
    w_1 = complex(req.insertions[0][1])

    terms: list[LedgerTerm] = []
    total = 0.0 + 0.0j

    if branch.kind == "lattice":
        lam = branch.lam
        head_scale = (-1.0) ** (l + 1) * lam ** (l - 1) / math.factorial(l - 1)
        if head_scale != 0.0:
            module = req.module()
            o_op = zero_mode_operator(module, v, lam)
            ops = [o_op] + [field_callable(module, vk, wk) for vk, wk in req.insertions]
            head = graded_trace(module, ops, tau, req.params.trace_weights())
            total += head_scale * head
            terms.append(
                LedgerTerm(
                    kind="head_trace",
                    k=0,
                    m=0,
                    name="one",
                    args={},
                    scale=complex(head_scale),
                    kernel=1.0 + 0.0j,
                    child=None,
                    child_value=head,
                )
            )

    for k, (v_k, w_k) in enumerate(req.insertions, start=1):
        level_k = max(state_level(spec, s) for s in v_k.terms) if not v_k.is_zero() else 0
        mmax = int(math.ceil(level_k + wt_v + 2))
        for m in range(0, mmax + 1):
            img = square_bracket_image(vac, v, m, v_k)
            if img.is_zero():
                continue
            binom = math.comb(m + l - 1, m)
            if k == 1:
                scale = (-1.0) ** (m + 1) * binom
                if branch.kind == "lattice":
                    name = "eisenstein_twisted"
                    args = {"m": m + l, "tau": tau.tau, "lam": branch.lam}
                    kernel = eisenstein_twisted(m + l, branch.lam, tau, tr)
                else:
                    name = "eisenstein_tilde"
                    args = {"m": m + l, "tau": tau.tau, "z": ch_v * complex(req.params.z)}
                    kernel = eisenstein_tilde(m + l, ch_v * complex(req.params.z), tau, tr)
            else:
                scale = (-1.0) ** (l + 1) * binom
                diff = w_1 - complex(w_k)
                point = AnnulusPoint(diff, tau)
                if branch.kind == "lattice":
                    name = "weier_p_twisted"
                    args = {"m": m + l, "w": diff, "tau": tau.tau, "lam": branch.lam}
                    kernel = weier_p_twisted(m + l, branch.lam, point, tr)
                else:
                    name = "weier_p_tilde"
                    args = {"m": m + l, "w": diff, "tau": tau.tau, "z": ch_v * complex(req.params.z)}
                    kernel = weier_p_tilde(m + l, point, ch_v * complex(req.params.z), tr)
            child_insertions = (
                req.insertions[: k - 1] + ((img, w_k),) + req.insertions[k:]
            )
            child = req.with_insertions(child_insertions)
            child_value = npoint_oracle(child)
            contrib = scale * kernel * child_value
            total += contrib
            terms.append(
                LedgerTerm(
                    kind="eisen" if k == 1 else "kernel",
                    k=k,
                    m=m,
                    name=name,
                    args=args,
                    scale=complex(scale),
                    kernel=kernel,
                    child=None,
                    child_value=child_value,
                )
            )

    terms.sort(key=lambda t: (t.k, t.m))
    return total, CoefficientLedger(n=req.n, value=total, terms=tuple(terms), is_leaf=False)
