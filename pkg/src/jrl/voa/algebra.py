"""Free-field mode algebras and their Fock modules.

Three algebra kinds are supported:

heisenberg       rank-r bosonic modes, [a^i(m), a^j(n)] = m d_{ij} d_{m+n,0},
                 charge sectors alpha in R^r, a^i(0) acts by alpha_i.
real_fermion     one real fermion, {b(m), b(n)} = d_{m+n,-1}; mode labels are
                 integers, b(n) kills the vacuum for n >= 0, the field has
                 weight 1/2 so the creator b(-n) carries level n - 1/2.
complex_fermion  a pair b, c with {b(m), c(n)} = d_{m+n,-1}; charges +1/-1.
                 Two gradings: "natural" gives both species weight 1/2;
                 "charge_shifted" regrades by half the charge so b carries
                 level n and c carries level n - 1 (c(-1) sits at level 0,
                 giving the two-dimensional bottom layer).

Basis states are canonical products: boson creators as a sorted multiset of
(flavor, level) pairs, fermion creators as sorted tuples of distinct labels
with the b block left of the c block.  All fermionic signs are relative to
that ordering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

from ..errors import CapTooLarge, DomainViolation, UnsupportedInsertion

MAX_LEVEL_CAP = 16
_MAX_ENUM_CAP = 40.0
_DEFAULT_STATE_BUDGET = 200_000


@dataclass(frozen=True)
class AlgebraSpec:
    """Which mode algebra, its rank, current coefficients, and grading."""

    kind: str
    rank: int = 1
    current: tuple[float, ...] | None = None
    grading: str = "natural"

    def __post_init__(self):
        if self.kind not in ("heisenberg", "real_fermion", "complex_fermion"):
            raise DomainViolation(f"unknown algebra kind {self.kind!r}")
        if self.kind != "heisenberg":
            if self.rank != 1:
                raise DomainViolation("fermionic algebras have rank 1")
            if self.current is not None:
                raise DomainViolation("current coefficients apply to heisenberg only")
        if self.rank < 1:
            raise DomainViolation("rank must be positive")
        if self.grading not in ("natural", "charge_shifted"):
            raise DomainViolation(f"unknown grading {self.grading!r}")
        if self.grading == "charge_shifted" and self.kind != "complex_fermion":
            raise DomainViolation("charge_shifted grading applies to the complex fermion")

    @property
    def central_charge(self) -> float:
        if self.kind == "heisenberg":
            return float(self.rank)
        if self.kind == "real_fermion":
            return 0.5
        return 1.0

    @property
    def parity_support(self) -> bool:
        return self.kind != "heisenberg"

    def current_coefficients(self) -> tuple[float, ...]:
        if self.kind != "heisenberg":
            raise DomainViolation("explicit current coefficients exist for heisenberg only")
        if self.current is None:
            return tuple(1.0 if i == 0 else 0.0 for i in range(self.rank))
        if len(self.current) != self.rank:
            raise DomainViolation("current coefficient length must match rank")
        return self.current

    def species_weight(self, species: str) -> float:
        """Conformal weight of the generating field of the given species."""
        if species == "a":
            return 1.0
        if species == "b":
            return 1.0 if self.grading == "charge_shifted" else 0.5
        if species == "c":
            return 0.0 if self.grading == "charge_shifted" else 0.5
        raise DomainViolation(f"unknown species {species!r}")


@dataclass(frozen=True, order=True)
class BasisState:
    """Canonical creator monomial applied to the sector ground state."""

    boson: tuple[tuple[int, int], ...] = ()
    ferm_b: tuple[int, ...] = ()
    ferm_c: tuple[int, ...] = ()

    @property
    def parity(self) -> int:
        return (len(self.ferm_b) + len(self.ferm_c)) % 2


VACUUM = BasisState()


def state_level(spec: AlgebraSpec, state: BasisState) -> float:
    """Oscillator level above the sector ground state."""
    lvl = float(sum(l for _, l in state.boson))
    wb = spec.species_weight("b") if spec.kind != "heisenberg" else 0.0
    if spec.kind == "real_fermion":
        lvl += sum(n - 1.0 + wb for n in state.ferm_b)
    elif spec.kind == "complex_fermion":
        wc = spec.species_weight("c")
        lvl += sum(n - 1.0 + wb for n in state.ferm_b)
        lvl += sum(n - 1.0 + wc for n in state.ferm_c)
    return lvl


def state_charge(spec: AlgebraSpec, sector: tuple[float, ...], state: BasisState) -> float:
    """Eigenvalue of the distinguished current zero mode J(0)."""
    if spec.kind == "heisenberg":
        beta = spec.current_coefficients()
        return sum(b * a for b, a in zip(beta, sector))
    if spec.kind == "complex_fermion":
        return float(len(state.ferm_b) - len(state.ferm_c))
    return 0.0


def sector_weight(spec: AlgebraSpec, sector: tuple[float, ...]) -> float:
    if spec.kind == "heisenberg":
        return 0.5 * sum(a * a for a in sector)
    return 0.0


class AlgebraElement:
    """Finite linear combination of basis states.

    The `truncated` flag records that some image states were dropped at the
    module level cap during construction of this element.
    """

    __slots__ = ("terms", "truncated")

    def __init__(self, terms: dict[BasisState, complex] | None = None, truncated: bool = False):
        self.terms: dict[BasisState, complex] = dict(terms) if terms else {}
        self.truncated = truncated

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.terms == other.terms and self.truncated == other.truncated

    __hash__ = None

    @classmethod
    def from_state(cls, state: BasisState, coeff: complex = 1.0) -> "AlgebraElement":
        return cls({state: complex(coeff)})

    @classmethod
    def zero(cls) -> "AlgebraElement":
        return cls()

    def add_term(self, state: BasisState, coeff: complex) -> None:
        c = self.terms.get(state, 0.0) + coeff
        if c == 0.0:
            self.terms.pop(state, None)
        else:
            self.terms[state] = c

    def scaled(self, c: complex) -> "AlgebraElement":
        if c == 0:
            return AlgebraElement(truncated=self.truncated)
        return AlgebraElement({s: c * v for s, v in self.terms.items()}, self.truncated)

    def plus(self, other: "AlgebraElement") -> "AlgebraElement":
        out = AlgebraElement(self.terms, self.truncated or other.truncated)
        for s, v in other.terms.items():
            out.add_term(s, v)
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def iter_sorted(self) -> Iterable[tuple[BasisState, complex]]:
        return sorted(self.terms.items(), key=lambda kv: kv[0])

    def norm1(self) -> float:
        return sum(abs(v) for v in self.terms.values())


@dataclass(frozen=True)
class ModeOp:
    """Single mode a^f(n), b(n), or c(n)."""

    species: str
    n: int
    flavor: int = 0


@dataclass(frozen=True)
class ModuleSpace:
    """Ordered Fock basis of a sector, truncated at oscillator level `cap`."""

    spec: AlgebraSpec
    sector: tuple[float, ...]
    cap: float
    states: tuple[BasisState, ...]

    @property
    def dim(self) -> int:
        return len(self.states)

    def level(self, state: BasisState) -> float:
        return state_level(self.spec, state)

    def weight(self, state: BasisState) -> float:
        return sector_weight(self.spec, self.sector) + state_level(self.spec, state)

    def charge(self, state: BasisState) -> float:
        return state_charge(self.spec, self.sector, state)


def enumerate_basis(
    spec: AlgebraSpec,
    sector: tuple[float, ...] = (),
    cap: float = 8.0,
    max_states: int = _DEFAULT_STATE_BUDGET,
) -> ModuleSpace:
    """All creator monomials with oscillator level <= cap, sorted by
    (level, state).  Raises CapTooLarge when the cap or the state count
    exceeds the enumeration budget."""
    if cap < 0:
        raise DomainViolation("level cap must be nonnegative")
    if cap > _MAX_ENUM_CAP:
        raise CapTooLarge(f"level cap {cap} exceeds enumeration limit {_MAX_ENUM_CAP}")
    sector = tuple(sector or ())
    if spec.kind == "heisenberg":
        if len(sector) != spec.rank:
            raise DomainViolation("sector length must match rank")
    elif sector:
        # the NS-type module is unique; no continuous charge label
        raise DomainViolation("fermionic modules carry no sector label")

    states: list[BasisState] = []

    if spec.kind == "heisenberg":
        icap = int(math.floor(cap))

        def rec_boson(prefix: list[tuple[int, int]], total: int, min_pair: tuple[int, int]):
            states.append(BasisState(boson=tuple(prefix)))
            if len(states) > max_states:
                raise CapTooLarge("state budget exceeded")
            for f in range(spec.rank):
                for l in range(1, icap - total + 1):
                    if (f, l) < min_pair:
                        continue
                    prefix.append((f, l))
                    rec_boson(prefix, total + l, (f, l))
                    prefix.pop()

        rec_boson([], 0, (0, 1))
    elif spec.kind == "real_fermion":
        wb = spec.species_weight("b")

        def rec_real(prefix: list[int], total: float, start: int):
            states.append(BasisState(ferm_b=tuple(prefix)))
            if len(states) > max_states:
                raise CapTooLarge("state budget exceeded")
            n = start
            while total + (n - 1.0 + wb) <= cap:
                prefix.append(n)
                rec_real(prefix, total + (n - 1.0 + wb), n + 1)
                prefix.pop()
                n += 1

        rec_real([], 0.0, 1)
    else:
        wb = spec.species_weight("b")
        wc = spec.species_weight("c")

        def subsets(w0: float, budget: float) -> list[tuple[tuple[int, ...], float]]:
            out: list[tuple[tuple[int, ...], float]] = []

            def rec(prefix: list[int], total: float, start: int):
                out.append((tuple(prefix), total))
                n = start
                while total + (n - 1.0 + w0) <= budget:
                    prefix.append(n)
                    rec(prefix, total + (n - 1.0 + w0), n + 1)
                    prefix.pop()
                    n += 1

            rec([], 0.0, 1)
            return out

        for bs, wtb in subsets(wb, cap):
            for cs, wtc in subsets(wc, cap - wtb):
                states.append(BasisState(ferm_b=bs, ferm_c=cs))
                if len(states) > max_states:
                    raise CapTooLarge("state budget exceeded")

    states.sort(key=lambda s: (state_level(spec, s), s))
    return ModuleSpace(spec=spec, sector=tuple(sector), cap=float(cap), states=tuple(states))


def _fermion_insert(levels: tuple[int, ...], j: int) -> tuple[int, tuple[int, ...]] | None:
    """Insert creator label j into an ascending tuple; None if already present.
    Returns (sign exponent, new tuple)."""
    if j in levels:
        return None
    pos = sum(1 for x in levels if x < j)
    return pos, tuple(sorted(levels + (j,)))


def _fermion_remove(levels: tuple[int, ...], j: int) -> tuple[int, tuple[int, ...]] | None:
    """Remove creator label j; None if absent.  Returns (sign exponent, new tuple)."""
    if j not in levels:
        return None
    pos = sum(1 for x in levels if x < j)
    return pos, tuple(x for x in levels if x != j)


def apply_mode(op: ModeOp, x: AlgebraElement, module: ModuleSpace) -> AlgebraElement:
    """Left action of a single mode on an element, truncated at module.cap.

    Image states above the cap are dropped and flagged on the result.
    """
    spec = module.spec
    out = AlgebraElement(truncated=x.truncated)
    cap = module.cap

    if op.species == "a":
        if spec.kind != "heisenberg":
            raise UnsupportedInsertion("bosonic mode on a fermionic module")
        if not 0 <= op.flavor < spec.rank:
            raise DomainViolation("flavor out of range")
        for state, coeff in x.terms.items():
            if op.n < 0:
                l = -op.n
                if state_level(spec, state) + l > cap:
                    out.truncated = True
                    continue
                out.add_term(
                    BasisState(boson=tuple(sorted(state.boson + ((op.flavor, l),)))), coeff
                )
            elif op.n == 0:
                out.add_term(state, coeff * module.sector[op.flavor])
            else:
                mult = sum(1 for p in state.boson if p == (op.flavor, op.n))
                if mult:
                    reduced = list(state.boson)
                    reduced.remove((op.flavor, op.n))
                    out.add_term(
                        BasisState(boson=tuple(reduced)), coeff * mult * op.n
                    )
        return out

    if spec.kind == "heisenberg":
        raise UnsupportedInsertion("fermionic mode on a bosonic module")
    if op.species == "c" and spec.kind != "complex_fermion":
        raise UnsupportedInsertion("c modes exist on the complex fermion only")

    for state, coeff in x.terms.items():
        nb = len(state.ferm_b)
        if spec.kind == "real_fermion":
            if op.n <= -1:
                j = -op.n
                res = _fermion_insert(state.ferm_b, j)
                if res is None:
                    continue
                sgn, levels = res
                new = BasisState(ferm_b=levels)
                if state_level(spec, new) > cap:
                    out.truncated = True
                    continue
                out.add_term(new, coeff * (-1.0) ** sgn)
            else:
                res = _fermion_remove(state.ferm_b, op.n + 1)
                if res is None:
                    continue
                sgn, levels = res
                out.add_term(BasisState(ferm_b=levels), coeff * (-1.0) ** sgn)
            continue

        # complex fermion
        if op.species == "b":
            if op.n <= -1:
                res = _fermion_insert(state.ferm_b, -op.n)
                if res is None:
                    continue
                sgn, levels = res
                new = BasisState(ferm_b=levels, ferm_c=state.ferm_c)
                if state_level(spec, new) > cap:
                    out.truncated = True
                    continue
                out.add_term(new, coeff * (-1.0) ** sgn)
            else:
                res = _fermion_remove(state.ferm_c, op.n + 1)
                if res is None:
                    continue
                sgn, levels = res
                out.add_term(
                    BasisState(ferm_b=state.ferm_b, ferm_c=levels),
                    coeff * (-1.0) ** (nb + sgn),
                )
        else:
            if op.n <= -1:
                res = _fermion_insert(state.ferm_c, -op.n)
                if res is None:
                    continue
                sgn, levels = res
                new = BasisState(ferm_b=state.ferm_b, ferm_c=levels)
                if state_level(spec, new) > cap:
                    out.truncated = True
                    continue
                out.add_term(new, coeff * (-1.0) ** (nb + sgn))
            else:
                res = _fermion_remove(state.ferm_b, op.n + 1)
                if res is None:
                    continue
                sgn, levels = res
                out.add_term(
                    BasisState(ferm_b=levels, ferm_c=state.ferm_c),
                    coeff * (-1.0) ** sgn,
                )
    return out


def _general_binom(x: float, k: int) -> float:
    """Binomial coefficient C(x, k) for real x, integer k >= 0."""
    acc = 1.0
    for i in range(k):
        acc *= (x - i) / (i + 1)
    return acc


def single_mode_of_state(
    spec: AlgebraSpec, species: str, flavor: int, j: int, n: float
) -> tuple[float, ModeOp] | None:
    """Mode (X(-j)vac)(n) of a single-oscillator state, as coeff * mode.

    From Y(X(-j)vac, z) = (1/(j-1)!) d_z^{j-1} Y(X, z):

        (X(-j)vac)(n) = (-1)^{j-1} C(n, j-1) X(n - j + 1).

    Returns None when the coefficient vanishes.  n may be fractional only
    through a lattice shift; the resulting mode label must be an integer.
    """
    c = (-1.0) ** (j - 1) * _general_binom(float(n), j - 1)
    if c == 0.0:
        return None
    m = n - j + 1
    if abs(m - round(m)) > 1e-12:
        return None
    return c, ModeOp(species=species, n=int(round(m)), flavor=flavor)


def zero_mode_operator(
    module: ModuleSpace, v: AlgebraElement, lam: int = 0
) -> Callable[[AlgebraElement], AlgebraElement]:
    """Lattice-shifted zero mode o_lam(v) = v(wt(v) - 1 + lam) as an operator.

    Components of non-integer weight contribute the zero operator.  Supported
    state shapes: the vacuum, single-oscillator states X(-j)vac, boson pairs
    a^i(-1)a^j(-1)vac, and the fermion bilinear b(-1)c(-1)vac.
    """
    spec = module.spec
    actions: list[Callable[[AlgebraElement], AlgebraElement]] = []

    for state, coeff in sorted(v.terms.items()):
        wt = state_level(spec, state)
        if abs(wt - round(wt)) > 1e-12:
            continue
        n_mode = round(wt) - 1 + lam

        if state == VACUUM:
            if n_mode == -1:
                actions.append(lambda x, c=coeff: x.scaled(c))
            continue

        nosc = len(state.boson) + len(state.ferm_b) + len(state.ferm_c)
        if nosc == 1:
            if state.boson:
                f, j = state.boson[0]
                species = "a"
            elif state.ferm_b:
                f, j = 0, state.ferm_b[0]
                species = "b"
            else:
                f, j = 0, state.ferm_c[0]
                species = "c"
            res = single_mode_of_state(spec, species, f, j, n_mode)
            if res is None:
                continue
            cmode, mode = res
            actions.append(
                lambda x, c=coeff * cmode, m=mode: apply_mode(m, x, module).scaled(c)
            )
            continue

        if nosc == 2 and len(state.boson) == 2 and all(l == 1 for _, l in state.boson):
            f1 = state.boson[0][0]
            f2 = state.boson[1][0]
            kmax = int(module.cap) + abs(lam) + 1

            def pair_action(x: AlgebraElement, c=coeff, f1=f1, f2=f2, kmax=kmax) -> AlgebraElement:
                total = AlgebraElement.zero()
                for k in range(-kmax, kmax + 1):
                    m2 = lam - k
                    op1 = ModeOp("a", k, f1)
                    op2 = ModeOp("a", m2, f2)
                    # creators (negative labels) act last
                    first, last = (op2, op1) if k < 0 else (op1, op2)
                    total = total.plus(apply_mode(last, apply_mode(first, x, module), module))
                return total.scaled(c)

            actions.append(pair_action)
            continue

        if (
            nosc == 2
            and spec.kind == "complex_fermion"
            and state.ferm_b == (1,)
            and state.ferm_c == (1,)
        ):
            kmax = int(module.cap) + abs(lam) + 2

            def bilinear_action(x: AlgebraElement, c=coeff, kmax=kmax) -> AlgebraElement:
                total = AlgebraElement.zero()
                for k in range(-kmax, kmax + 1):
                    m2 = lam - 1 - k
                    opb = ModeOp("b", k)
                    opc = ModeOp("c", m2)
                    if k < 0:
                        part = apply_mode(opb, apply_mode(opc, x, module), module)
                    elif m2 < 0:
                        part = apply_mode(opc, apply_mode(opb, x, module), module).scaled(-1.0)
                    else:
                        part = apply_mode(opb, apply_mode(opc, x, module), module)
                    total = total.plus(part)
                return total.scaled(c)

            actions.append(bilinear_action)
            continue

        raise UnsupportedInsertion(
            f"zero mode of state {state} is outside the supported families"
        )

    def operator(x: AlgebraElement) -> AlgebraElement:
        total = AlgebraElement.zero()
        for act in actions:
            total = total.plus(act(x))
        return total

    return operator


def current_zero_mode_scalar(module: ModuleSpace) -> float | None:
    """J(0) eigenvalue if it is a scalar on the module, else None."""
    spec = module.spec
    if spec.kind == "heisenberg":
        beta = spec.current_coefficients()
        return sum(b * a for b, a in zip(beta, module.sector))
    return None
