"""Request objects, branch selection, and the coefficient ledger."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable

from ..errors import BranchUnresolved, DomainViolation, UnsupportedInsertion
from ..specfun.eisenstein import eisenstein_tilde, eisenstein_twisted
from ..specfun.points import AnnulusPoint, ModularPoint, Truncation, TwistPair, phase
from ..specfun.weierstrass import (
    weier_p,
    weier_p_deformed,
    weier_p_tilde,
    weier_p_twisted,
)
from ..voa.algebra import (
    VACUUM,
    AlgebraElement,
    AlgebraSpec,
    ModuleSpace,
    enumerate_basis,
    state_charge,
    state_level,
)
from ..voa.trace import DEFAULT_HEADROOM, TraceWeights, npoint_trace, working_module
from ..voa.algebra import MAX_LEVEL_CAP


@dataclass(frozen=True)
class JacobiParams:
    """Flux and trace-grading parameters of a torus trace.

    zeta = e(z) is the flux; supertrace inserts the parity sign;
    include_c_shift uses q^{L(0) - c/24}; charge_weight_shift adds the
    given multiple of the charge to the weight exponent (charge-regraded
    traces)."""

    z: complex
    tau: ModularPoint
    supertrace: bool = False
    include_c_shift: bool = False
    charge_weight_shift: float = 0.0
    shift: tuple[int, int] | None = None

    @property
    def zeta(self) -> complex:
        return phase(self.z)

    def trace_weights(self) -> TraceWeights:
        return TraceWeights(
            flux_z=self.z,
            supertrace=self.supertrace,
            include_c_shift=self.include_c_shift,
            charge_weight_shift=self.charge_weight_shift,
        )


@dataclass(frozen=True)
class Branch:
    kind: str  # "generic" | "lattice"
    lam: int = 0
    mu: int = 0


@dataclass(frozen=True)
class BranchSelector:
    """Classify the flux alpha*z of a distinguished insertion.

    Writing alpha z = lam tau + mu in lattice coordinates, a distance to
    the nearest integer pair at most tol_lattice selects the lattice
    branch.  Distances inside the wider suspicion band are rejected with
    BranchUnresolved rather than guessed; beyond the band the generic
    branch applies."""

    tol_lattice: float = 1e-9
    band: float = 1e-5

    def classify(self, alpha: float, z: complex, tau: ModularPoint) -> Branch:
        az = alpha * complex(z)
        t = tau.tau
        lam_f = az.imag / t.imag
        mu_f = az.real - lam_f * t.real
        lam_r = round(lam_f)
        mu_r = round(mu_f)
        d = math.hypot(lam_f - lam_r, mu_f - mu_r)
        if d <= self.tol_lattice:
            return Branch(kind="lattice", lam=lam_r, mu=mu_r)
        if d <= self.band:
            raise BranchUnresolved(
                f"flux {az} sits {d:.2e} from the lattice, inside the suspicion band"
            )
        return Branch(kind="generic")


@dataclass(frozen=True)
class NPointRequest:
    """An n-point trace to evaluate: ordered insertions (v_i, w_i) with
    0 < Im w_1 < ... < Im w_n < Im tau, over the sector Fock module of
    `spec` truncated at level `cap`."""

    spec: AlgebraSpec
    sector: tuple[float, ...]
    cap: float
    insertions: tuple[tuple[AlgebraElement, complex], ...]
    params: JacobiParams
    truncation: Truncation = field(default_factory=Truncation)
    headroom: int = DEFAULT_HEADROOM

    def __post_init__(self):
        if self.cap > MAX_LEVEL_CAP:
            raise DomainViolation(f"level cap {self.cap} exceeds {MAX_LEVEL_CAP}")
        ws = [complex(w) for _, w in self.insertions]
        for i in range(len(ws)):
            for j in range(i + 1, len(ws)):
                d = ws[i] - ws[j]
                if abs(d.imag) < 1e-12 and abs(d.real - round(d.real)) < 1e-12:
                    raise DomainViolation(
                        f"positions {ws[i]} and {ws[j]} coincide modulo the lattice"
                    )

    @property
    def n(self) -> int:
        return len(self.insertions)

    def module(self) -> ModuleSpace:
        return _cached_working_module(self.spec, self.sector, self.cap, self.headroom)

    def with_insertions(
        self, insertions: tuple[tuple[AlgebraElement, complex], ...]
    ) -> "NPointRequest":
        return replace(self, insertions=insertions)


@lru_cache(maxsize=64)
def _cached_working_module(
    spec: AlgebraSpec, sector: tuple[float, ...], cap: float, headroom: int
) -> ModuleSpace:
    return working_module(spec, sector, cap, headroom)


@lru_cache(maxsize=64)
def vacuum_module(spec: AlgebraSpec, cap: float = 6.0) -> ModuleSpace:
    """Small vacuum-sector module used for square-bracket images."""
    sector = tuple(0.0 for _ in range(spec.rank)) if spec.kind == "heisenberg" else ()
    return enumerate_basis(spec, sector, cap)


def npoint_oracle(req: NPointRequest) -> complex:
    """Direct Fock-space evaluation of the requested trace."""
    return npoint_trace(req.module(), req.insertions, req.params.tau, req.params.trace_weights())


def element_weight_charge(spec: AlgebraSpec, v: AlgebraElement) -> tuple[float, float, int]:
    """(weight, charge, parity) of a homogeneous vacuum-module element."""
    if v.is_zero():
        raise UnsupportedInsertion("zero insertion has no defined weight")
    vac_sector = tuple(0.0 for _ in range(spec.rank)) if spec.kind == "heisenberg" else ()
    wts = set()
    chs = set()
    pars = set()
    for state in v.terms:
        wts.add(round(state_level(spec, state) * 2) / 2.0)
        chs.add(state_charge(spec, vac_sector, state))
        pars.add(state.parity)
    if len(wts) != 1 or len(chs) != 1 or len(pars) != 1:
        raise UnsupportedInsertion("insertion must be homogeneous in weight, charge, parity")
    return wts.pop(), chs.pop(), pars.pop()


# ---------------------------------------------------------------------------
# Coefficient ledger
# ---------------------------------------------------------------------------


def specfun_kernel(name: str, args: dict, tr: Truncation) -> complex:
    """Re-evaluate a named coefficient from its stored arguments."""
    tau = ModularPoint(complex(*args["tau"]) if isinstance(args["tau"], list) else args["tau"])
    if name == "one":
        return 1.0 + 0.0j
    if name == "weier_p":
        return weier_p(args["m"], AnnulusPoint(args["w"], tau), tr)
    if name == "weier_p_twisted":
        return weier_p_twisted(args["m"], args["lam"], AnnulusPoint(args["w"], tau), tr)
    if name == "weier_p_tilde":
        return weier_p_tilde(args["m"], AnnulusPoint(args["w"], tau), args["z"], tr)
    if name == "weier_p_deformed":
        tw = TwistPair(args["theta"], args["phi"], args["lam"])
        return weier_p_deformed(args["m"], tw, AnnulusPoint(args["w"], tau), tr)
    if name == "eisenstein_twisted":
        return eisenstein_twisted(args["m"], args["lam"], tau, tr)
    if name == "eisenstein_tilde":
        return eisenstein_tilde(args["m"], args["z"], tau, tr)
    raise DomainViolation(f"unknown kernel name {name!r}")


@dataclass(frozen=True)
class LedgerTerm:
    """One contribution of a reduction stage.

    contribution = scale * kernel * child_value, where `kernel` is the
    special-function value recomputable from (name, args) and `scale`
    collects parity signs, binomials, and exponential prefactors."""

    kind: str  # "kernel" | "zero_scalar" | "zero_trace" | "head_trace" | "eisen"
    k: int
    m: int
    name: str
    args: dict
    scale: complex
    kernel: complex
    child: "CoefficientLedger | None"
    child_value: complex

    @property
    def contribution(self) -> complex:
        return self.scale * self.kernel * self.child_value


@dataclass(frozen=True)
class CoefficientLedger:
    """Evaluation tree of a full reduction.

    Leaves are zero-point functions (or directly evaluated traces); every
    internal node stores its stage terms ordered by (k, m)."""

    n: int
    value: complex
    terms: tuple[LedgerTerm, ...]
    is_leaf: bool

    def reevaluate(self, tr: Truncation) -> complex:
        """Recompute the value with fresh kernel evaluations, reusing the
        stored leaf traces."""
        if self.is_leaf:
            return self.value
        total = 0.0 + 0.0j
        for t in self.terms:
            kernel = specfun_kernel(t.name, t.args, tr) if t.name != "one" else 1.0 + 0.0j
            child_value = t.child.reevaluate(tr) if t.child is not None else t.child_value
            total += t.scale * kernel * child_value
        return total

    def walk(self):
        yield self
        for t in self.terms:
            if t.child is not None:
                yield from t.child.walk()
