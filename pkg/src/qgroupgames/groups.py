"""Action groups: closures, membership and fixed-vector subspaces."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .linalg import (
    StateVector,
    UnitaryMatrix,
    basis_state,
    complete_unitary,
    compose,
    compose_terms,
    identity,
    null_space,
    qft,
    transposition,
)

DEFAULT_CLOSURE_CAP = 50_000
MEMBER_TOL = 1e-9
INVARIANT_TOL = 1e-8
_KEY_SCALE = 1e7


class GroupKind(enum.Enum):
    GENERATED = "generated"
    SYMMETRIC = "symmetric"
    UNITARY = "unitary"


class Membership(enum.Enum):
    MEMBER = "member"
    NOT_MEMBER = "not_member"
    INDETERMINATE = "indeterminate"

    @classmethod
    def of(cls, flag: bool) -> Membership:
        return cls.MEMBER if flag else cls.NOT_MEMBER


class IndeterminateError(RuntimeError):
    """A question could not be settled because a closure hit its cap."""


@dataclass(frozen=True)
class GroupClosure:
    elements: tuple[UnitaryMatrix, ...]
    complete: bool
    _stack: np.ndarray = field(init=False, repr=False, compare=False)
    _perms: dict | None = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        stack = np.stack([e.entries for e in self.elements])
        stack.setflags(write=False)
        object.__setattr__(self, "_stack", stack)
        if all(e.perm is not None for e in self.elements):
            perms = {e.perm: i for i, e in enumerate(self.elements)}
        else:
            perms = None
        object.__setattr__(self, "_perms", perms)

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def stack(self) -> np.ndarray:
        """Elements as a read-only ``(k, n, n)`` array."""
        return self._stack

    def index_of(self, u: UnitaryMatrix, tol: float = MEMBER_TOL) -> int | None:
        if self._perms is not None and u.perm is not None:
            return self._perms.get(u.perm)
        diffs = np.abs(self._stack - u.entries).reshape(len(self.elements), -1).max(axis=1)
        hits = np.flatnonzero(diffs <= tol)
        return int(hits[0]) if hits.size else None


@dataclass(frozen=True, eq=False)
class ActionGroup:
    """A player's move repertoire, a subgroup of U(n)."""

    n: int
    kind: GroupKind
    generators: tuple[UnitaryMatrix, ...] = ()
    closure_cap: int = DEFAULT_CLOSURE_CAP
    _cache: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("group dimension must be positive")
        if self.closure_cap < 1:
            raise ValueError("closure_cap must be positive")
        object.__setattr__(self, "generators", tuple(self.generators))
        if self.kind is GroupKind.GENERATED:
            for g in self.generators:
                if not isinstance(g, UnitaryMatrix):
                    raise TypeError("generators must be UnitaryMatrix instances")
                if g.n != self.n:
                    raise ValueError(f"generator of dimension {g.n} in a group of dimension {self.n}")
        elif self.generators:
            raise ValueError(f"{self.kind.value} groups take no generators")

    @classmethod
    def symmetric(cls, n: int, closure_cap: int = DEFAULT_CLOSURE_CAP) -> ActionGroup:
        return cls(n, GroupKind.SYMMETRIC, closure_cap=closure_cap)

    @classmethod
    def unitary(cls, n: int) -> ActionGroup:
        return cls(n, GroupKind.UNITARY)

    @classmethod
    def generated(cls, generators: Sequence[UnitaryMatrix],
                  closure_cap: int = DEFAULT_CLOSURE_CAP, n: int | None = None) -> ActionGroup:
        generators = tuple(generators)
        if n is None:
            if not generators:
                raise ValueError("need n for a group with no generators")
            n = generators[0].n
        return cls(n, GroupKind.GENERATED, generators, closure_cap)

    @property
    def enumerable(self) -> bool:
        return self.kind is not GroupKind.UNITARY

    def closure(self) -> GroupClosure:
        if "closure" not in self._cache:
            self._cache["closure"] = close(self)
        return self._cache["closure"]

    def fixing_generators(self) -> tuple[UnitaryMatrix, ...]:
        """Generators whose common fixed vectors are fixed by the whole group."""
        if self.kind is GroupKind.SYMMETRIC:
            return symmetric_generators(self.n)
        if self.kind is GroupKind.GENERATED:
            return self.generators
        raise ValueError("U(n) has no finite generating set")

    def describe(self) -> str:
        if self.kind is GroupKind.SYMMETRIC:
            return f"S_{self.n}"
        if self.kind is GroupKind.UNITARY:
            return f"U({self.n})"
        return "<" + ", ".join(g.label for g in self.generators) + ">"


def symmetric_generators(n: int) -> tuple[UnitaryMatrix, ...]:
    return tuple(transposition(n, i, i + 1) for i in range(n - 1))


def _matrix_key(m: np.ndarray) -> bytes:
    flat = np.concatenate([m.real.ravel(), m.imag.ravel()])
    return np.rint(flat * _KEY_SCALE).astype(np.int64).tobytes()


def close(g: ActionGroup) -> GroupClosure:
    """Enumerate the group by saturating products of generators.

    Elements come out in breadth-first order starting from the identity (S_n
    is generated by adjacent transpositions), so short words come first and
    enumeration order is reproducible.  Stops at ``g.closure_cap`` elements
    and reports ``complete=False`` in that case.
    """
    n, cap = g.n, g.closure_cap
    if g.kind is GroupKind.UNITARY:
        raise ValueError("U(n) is not enumerable")
    ident = identity(n)
    gens = symmetric_generators(n) if g.kind is GroupKind.SYMMETRIC else g.generators
    if all(x.perm is not None for x in gens):
        return _close_perms(gens, ident, cap)

    elements = [ident]
    seen = {_matrix_key(ident.entries)}
    i = 0
    while i < len(elements):
        x = elements[i]
        i += 1
        for gen in gens:
            y = compose(gen, x)
            key = _matrix_key(y.entries)
            if key in seen:
                continue
            if len(elements) >= cap:
                return GroupClosure(tuple(elements), False)
            seen.add(key)
            elements.append(y)
    return GroupClosure(tuple(elements), True)


def _close_perms(gens, ident, cap) -> GroupClosure:
    # symbolic saturation; matrices are built once per element afterwards
    order = [ident.perm]
    parent = {ident.perm: None}
    complete = True
    i = 0
    while i < len(order) and complete:
        p = order[i]
        i += 1
        for gi, gen in enumerate(gens):
            q = tuple(gen.perm[k] for k in p)
            if q in parent:
                continue
            if len(order) >= cap:
                complete = False
                break
            order.append(q)
            parent[q] = (gi, p)
    built = {ident.perm: ident}
    for q in order[1:]:
        gi, p = parent[q]
        term = compose_terms(gens[gi].term, built[p].term)
        built[q] = UnitaryMatrix.from_perm(q, term=term)
    return GroupClosure(tuple(built[q] for q in order), complete)


def contains(g: ActionGroup, u: UnitaryMatrix) -> Membership:
    if u.n != g.n:
        raise ValueError(f"dimension mismatch: {u.n} vs group dimension {g.n}")
    if g.kind is GroupKind.UNITARY:
        return Membership.MEMBER
    if g.kind is GroupKind.SYMMETRIC:
        return Membership.of(u.perm is not None)
    cl = g.closure()
    if cl.index_of(u) is not None:
        return Membership.MEMBER
    return Membership.NOT_MEMBER if cl.complete else Membership.INDETERMINATE


def contains_symmetric(g: ActionGroup) -> Membership:
    """Whether ``g`` contains S_n, tested on the adjacent transpositions."""
    if g.kind in (GroupKind.UNITARY, GroupKind.SYMMETRIC):
        return Membership.MEMBER
    result = Membership.MEMBER
    for t in symmetric_generators(g.n):
        m = contains(g, t)
        if m is Membership.NOT_MEMBER:
            return m
        if m is Membership.INDETERMINATE:
            result = m
    return result


def is_subgroup(h: ActionGroup, g: ActionGroup) -> Membership:
    """Whether ``h <= g`` (checked on generators of ``h``)."""
    if h.n != g.n:
        return Membership.NOT_MEMBER
    if h.kind is GroupKind.UNITARY:
        return Membership.of(g.kind is GroupKind.UNITARY)
    result = Membership.MEMBER
    for x in h.fixing_generators():
        m = contains(g, x)
        if m is Membership.NOT_MEMBER:
            return m
        if m is Membership.INDETERMINATE:
            result = m
    return result


def invariant_subspace(g: ActionGroup) -> list[StateVector]:
    """Orthonormal basis of the vectors fixed by every element of ``g``.

    Only generators are used: a vector fixed by each generator is fixed by
    their products and inverses.
    """
    if g.kind is GroupKind.UNITARY:
        return []
    return fixed_subspace(g.fixing_generators(), g.n)


def fixed_subspace(moves: Sequence[UnitaryMatrix], n: int) -> list[StateVector]:
    if not moves:
        return [basis_state(n, k) for k in range(n)]
    eye = np.eye(n)
    stacked = np.vstack([m.entries - eye for m in moves])
    return null_space(stacked)


def projector(basis: Sequence[StateVector], n: int) -> np.ndarray:
    p = np.zeros((n, n), dtype=np.complex128)
    for v in basis:
        p += np.outer(v.amps, v.amps.conj())
    return p


def _in_subspace(w: np.ndarray, proj: np.ndarray) -> bool:
    return float(np.linalg.norm(w - proj @ w)) <= INVARIANT_TOL


def reachable_invariant(ga: ActionGroup, gb: ActionGroup,
                        q0: StateVector | int) -> tuple[UnitaryMatrix, StateVector] | None:
    """A move ``U`` of ``ga`` sending ``q0`` to a state fixed by all of ``gb``.

    Returns ``(U, U q0)`` or None.  Raises :class:`IndeterminateError` when
    ``ga``'s closure is incomplete and no witness was found among the
    enumerated elements.
    """
    n = ga.n
    if isinstance(q0, int):
        q0 = basis_state(n, q0)
    basis = invariant_subspace(gb)
    if not basis:
        return None
    proj = projector(basis, n)

    if ga.kind is GroupKind.UNITARY:
        start = q0.basis_index()
        candidates = [qft(n)]
        if start:
            candidates.append(compose(qft(n), transposition(n, 0, start)))
        for u in candidates:
            w = u.entries @ q0.amps
            if _in_subspace(w, proj):
                return u, StateVector(w)
        psi = _phase_fixed(basis[0])
        if start is None:
            raise ValueError("initial state must be a basis state")
        u = complete_unitary(start, psi)
        return u, psi

    cl = ga.closure()
    images = cl.stack @ q0.amps
    resid = np.linalg.norm(images - images @ proj.T, axis=1)
    hits = np.flatnonzero(resid <= INVARIANT_TOL)
    if hits.size:
        u = cl.elements[int(hits[0])]
        return u, StateVector(images[int(hits[0])])
    if not cl.complete:
        raise IndeterminateError(
            f"closure of {ga.describe()} stopped at {len(cl)} elements without a witness")
    return None


def _phase_fixed(v: StateVector) -> StateVector:
    a = v.amps
    k = int(np.flatnonzero(np.abs(a) > 1e-12)[0])
    return StateVector(a * (abs(a[k]) / a[k]))
