"""Winning-strategy verification and search, refutations, and witnesses.

Searches enumerate strategy profiles lexicographically over the closure's
element order, so verdicts and witnesses are reproducible run to run.  Every
query carries a playout budget (``search_cap``); running out yields an
indeterminate verdict, never a guess.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .game import (
    SURE_WIN_TOL,
    GameSpec,
    ScheduleKind,
    Strategy,
    StrategyError,
    play,
    validate,
    wins,
)
from .groups import (
    ActionGroup,
    GroupKind,
    IndeterminateError,
    Membership,
    contains,
    contains_symmetric,
    fixed_subspace,
    invariant_subspace,
    projector,
    reachable_invariant,
)
from .linalg import (
    StateVector,
    UnitaryMatrix,
    adjoint,
    compose,
    identity,
    transposition,
)

DEFAULT_SEARCH_CAP = 10**6


class Status(enum.Enum):
    EXISTS = "exists"
    NOT_EXISTS = "not_exists"
    INDETERMINATE = "indeterminate"


class Method(enum.Enum):
    EXHAUSTION = "exhaustion"
    PROOF_CONSTRUCTION = "proof_construction"
    CONSTRUCTION = "construction"
    INVARIANCE_SHORTCUT = "invariance_shortcut"


@dataclass(frozen=True)
class AnalysisVerdict:
    player: int
    strength: str
    status: Status
    witness: Strategy | None = None
    co_witness: Strategy | None = None
    method: Method | None = None
    evidence: dict = field(default_factory=dict)
    reason: str = ""


@dataclass(frozen=True)
class StrongCheck:
    """Result of checking one strategy; ``holds`` is None when undecided."""

    holds: bool | None
    method: Method | None
    counter: Strategy | None = None
    playouts: int = 0
    reason: str = ""


@dataclass(frozen=True)
class CounterexamplePair:
    sigma: Strategy
    sigma_prime: Strategy
    finals: tuple[StateVector, StateVector]
    pattern: str


class MissingHypothesisError(ValueError):
    """The opponent lacks a move that the refutation needs."""


def opponent(player: int) -> int:
    return 2 if player == 1 else 1


def _slots(spec: GameSpec, owner: int) -> np.ndarray:
    out, k = [], 0
    for r in range(spec.schedule.rounds):
        if spec.schedule.owner(r) == owner:
            out.append(k)
            k += 1
        else:
            out.append(-1)
    return np.array(out, dtype=np.intp)


@dataclass
class _Opponent:
    moves: Sequence[UnitaryMatrix] | None
    stack: np.ndarray | None
    complete: bool
    proj: np.ndarray | None
    size: int | None


def _opponent_view(spec: GameSpec, owner: int,
                   moves: Sequence[UnitaryMatrix] | None = None,
                   use_shortcut: bool = True) -> _Opponent:
    n = spec.n
    if moves is not None:
        moves = tuple(moves)
        basis = fixed_subspace(moves, n) if use_shortcut else []
        return _Opponent(moves, np.stack([m.entries for m in moves]), True,
                         projector(basis, n) if basis else None, len(moves))
    group = spec.group(opponent(owner))
    basis = invariant_subspace(group) if use_shortcut else []
    proj = projector(basis, n) if basis else None
    if not group.enumerable:
        return _Opponent(None, None, False, proj, None)
    cl = group.closure()
    return _Opponent(cl.elements, cl.stack, cl.complete, proj, len(cl))


def _start(spec: GameSpec) -> np.ndarray:
    return spec.initial_state.amps


def is_strong_winning(spec: GameSpec, s: Strategy, *, search_cap: int = DEFAULT_SEARCH_CAP,
                      opponent_moves: Sequence[UnitaryMatrix] | None = None,
                      use_shortcut: bool = True, impl=None) -> StrongCheck:
    """Check that ``s`` wins with certainty against every opponent strategy.

    The opponent ranges over its group's closure (or ``opponent_moves`` when
    given).  When the state is fixed by the whole opponent group at every one
    of the opponent's turns, a single playout settles the question.
    """
    v = validate(spec, s)
    if v is not None:
        raise StrategyError(v)
    opp = _opponent_view(spec, s.owner, opponent_moves, use_shortcut)
    owner_set = np.stack([m.entries for m in s.moves])
    owner_idx = np.arange(len(s.moves), dtype=np.intp)
    slots = _slots(spec, s.owner)
    target = spec.target(s.owner)

    if opp.stack is None:
        # non-enumerable opponent: only the shortcut can decide
        if opp.proj is None:
            return StrongCheck(None, None, reason=f"opponent group "
                               f"{spec.group(opponent(s.owner)).describe()} is not enumerable")
        probe = identity(spec.n).entries[None]
        status, _, playouts, short = kernels.scan(owner_set, owner_idx, probe, slots, _start(spec),
                                                  target, False, SURE_WIN_TOL, search_cap,
                                                  opp.proj, impl=impl)
        if short and status == kernels.NOT_FOUND:
            return StrongCheck(True, Method.INVARIANCE_SHORTCUT, playouts=playouts)
        if short and status == kernels.FOUND:
            counter = Strategy(opponent(s.owner), (identity(spec.n),) * _count_opp(slots))
            return StrongCheck(False, Method.INVARIANCE_SHORTCUT, counter, playouts)
        return StrongCheck(None, None, playouts=playouts,
                           reason="opponent group is not enumerable and the invariance "
                                  "shortcut does not apply")

    status, profile, playouts, short = kernels.scan(
        owner_set, owner_idx, opp.stack, slots, _start(spec), target, False,
        SURE_WIN_TOL, search_cap, opp.proj, impl=impl)
    method = Method.INVARIANCE_SHORTCUT if short else Method.EXHAUSTION
    if status == kernels.FOUND:
        counter = Strategy(opponent(s.owner), tuple(opp.moves[i] for i in profile))
        return StrongCheck(False, method, counter, playouts)
    if status == kernels.BUDGET:
        return StrongCheck(None, None, playouts=playouts,
                           reason=f"search cap of {search_cap} playouts reached "
                                  f"({opp.size}^{_count_opp(slots)} opponent profiles)")
    if not short and not opp.complete:
        return StrongCheck(None, None, playouts=playouts,
                           reason="opponent closure is incomplete (closure cap reached)")
    return StrongCheck(True, method, playouts=playouts)


def _count_opp(slots: np.ndarray) -> int:
    return int(np.count_nonzero(slots < 0))


def _own_closure(spec: GameSpec, player: int):
    group = spec.group(player)
    if not group.enumerable:
        return None
    return group.closure()


def find_strong(spec: GameSpec, player: int, *, search_cap: int = DEFAULT_SEARCH_CAP,
                impl=None) -> AnalysisVerdict:
    """Exhaustive search for a strong winning strategy of ``player``."""
    own = _own_closure(spec, player)
    if own is None:
        # U(n) cannot be enumerated; the invariant-state witness may still settle it
        if player == 1 and spec.schedule.kind is ScheduleKind.NONCANONICAL:
            w = witness_noncanonical(spec)
            if w is not None:
                check = is_strong_winning(spec, w, search_cap=search_cap, impl=impl)
                if check.holds:
                    return AnalysisVerdict(player, "strong", Status.EXISTS, witness=w,
                                           method=Method.CONSTRUCTION,
                                           evidence={"verified_by": check.method.value,
                                                     "playouts": check.playouts})
        return AnalysisVerdict(player, "strong", Status.INDETERMINATE,
                               reason=f"{spec.group(player).describe()} is not enumerable")
    opp = _opponent_view(spec, player)
    if opp.stack is None and opp.proj is None:
        return AnalysisVerdict(player, "strong", Status.INDETERMINATE,
                               reason=f"opponent group {spec.group(opponent(player)).describe()} "
                                      "is not enumerable")
    opp_stack = opp.stack if opp.stack is not None else identity(spec.n).entries[None]
    slots = _slots(spec, player)
    rounds = spec.schedule.moves_for(player)
    target = spec.target(player)
    start = _start(spec)
    budget = search_cap
    candidates = 0
    undecided = 0
    for idx in itertools.product(range(len(own)), repeat=rounds):
        if budget <= 0:
            return AnalysisVerdict(player, "strong", Status.INDETERMINATE,
                                   evidence={"candidates": candidates, "playouts": search_cap},
                                   reason=f"search cap of {search_cap} playouts reached")
        candidates += 1
        status, _, playouts, short = kernels.scan(own.stack, np.array(idx, dtype=np.intp),
                                                  opp_stack, slots, start, target, False,
                                                  SURE_WIN_TOL, budget, opp.proj, impl=impl)
        budget -= playouts
        if status == kernels.FOUND:
            continue
        if status == kernels.BUDGET:
            return AnalysisVerdict(player, "strong", Status.INDETERMINATE,
                                   evidence={"candidates": candidates, "playouts": search_cap},
                                   reason=f"search cap of {search_cap} playouts reached")
        if short or (opp.stack is not None and opp.complete):
            witness = Strategy(player, tuple(own.elements[i] for i in idx))
            method = Method.INVARIANCE_SHORTCUT if short else Method.EXHAUSTION
            return AnalysisVerdict(player, "strong", Status.EXISTS, witness=witness, method=method,
                                   evidence={"candidates": candidates,
                                             "playouts": search_cap - budget})
        undecided += 1
    evidence = {"candidates": candidates, "playouts": search_cap - budget,
                "own_group_order": len(own),
                "opponent_group_order": opp.size}
    if not own.complete:
        return AnalysisVerdict(player, "strong", Status.INDETERMINATE, evidence=evidence,
                               reason="own closure is incomplete (closure cap reached)")
    if undecided:
        return AnalysisVerdict(player, "strong", Status.INDETERMINATE, evidence=evidence,
                               reason=f"{undecided} candidates could not be refuted against an "
                                      "incomplete opponent closure")
    return AnalysisVerdict(player, "strong", Status.NOT_EXISTS, method=Method.EXHAUSTION,
                           evidence=evidence)


def _t_or_i(n: int, i: int, j: int) -> UnitaryMatrix:
    return identity(n) if i == j else transposition(n, i, j)


def weak_pair(spec: GameSpec, player: int) -> tuple[Strategy, Strategy]:
    """The explicit weak-winning pair: ``(witness, co_witness)``.

    Player 1 plays (I, ..., I, T_{qA,qB}) against (T_{q0,qB}, I, ..., I).
    Player 2 plays (I, ..., I, T_{q0,qB}) against all identities.
    """
    n, sched = spec.n, spec.schedule
    ident = identity(n)
    r1, r2 = sched.moves_for(1), sched.moves_for(2)
    if player == 1:
        w = Strategy(1, (ident,) * (r1 - 1) + (transposition(n, spec.qa, spec.qb),))
        c = Strategy(2, (_t_or_i(n, spec.q0, spec.qb),) + (ident,) * (r2 - 1))
        return w, c
    w = Strategy(2, (ident,) * (r2 - 1) + (_t_or_i(n, spec.q0, spec.qb),))
    c = Strategy(1, (ident,) * r1)
    return w, c


def _ordered(player: int, a: Strategy, b: Strategy) -> tuple[Strategy, Strategy]:
    return (a, b) if player == 1 else (b, a)


def find_weak(spec: GameSpec, player: int, *, search_cap: int = DEFAULT_SEARCH_CAP,
              impl=None) -> AnalysisVerdict:
    """A strategy of ``player`` that wins against at least one opponent strategy."""
    witness, co = weak_pair(spec, player)
    if validate(spec, witness) is None and validate(spec, co) is None:
        final = play(spec, *_ordered(player, witness, co)).final
        if wins(final, spec.target(player)):
            return AnalysisVerdict(player, "weak", Status.EXISTS, witness=witness, co_witness=co,
                                   method=Method.CONSTRUCTION)

    own = _own_closure(spec, player)
    opp = _opponent_view(spec, player, use_shortcut=False)
    if own is None or opp.stack is None:
        return AnalysisVerdict(player, "weak", Status.INDETERMINATE,
                               reason="exhaustive weak search needs enumerable groups")
    slots = _slots(spec, player)
    rounds = spec.schedule.moves_for(player)
    target = spec.target(player)
    start = _start(spec)
    budget = search_cap
    candidates = 0
    for idx in itertools.product(range(len(own)), repeat=rounds):
        candidates += 1
        status, profile, playouts, _ = kernels.scan(own.stack, np.array(idx, dtype=np.intp),
                                                    opp.stack, slots, start, target, True,
                                                    SURE_WIN_TOL, budget, None, impl=impl)
        budget -= playouts
        if status == kernels.FOUND:
            witness = Strategy(player, tuple(own.elements[i] for i in idx))
            co = Strategy(opponent(player), tuple(opp.moves[i] for i in profile))
            return AnalysisVerdict(player, "weak", Status.EXISTS, witness=witness, co_witness=co,
                                   method=Method.EXHAUSTION,
                                   evidence={"candidates": candidates,
                                             "playouts": search_cap - budget})
        if status == kernels.BUDGET or budget <= 0:
            return AnalysisVerdict(player, "weak", Status.INDETERMINATE,
                                   reason=f"search cap of {search_cap} playouts reached")
    evidence = {"candidates": candidates, "playouts": search_cap - budget}
    if own.complete and opp.complete:
        return AnalysisVerdict(player, "weak", Status.NOT_EXISTS, method=Method.EXHAUSTION,
                               evidence=evidence)
    return AnalysisVerdict(player, "weak", Status.INDETERMINATE, evidence=evidence,
                           reason="closure incomplete (closure cap reached)")


# -- refutations ------------------------------------------------------------------

def _member(group: ActionGroup, u: UnitaryMatrix) -> bool:
    return contains(group, u) is Membership.MEMBER


def _pair_candidates(spec: GameSpec, claimed: Strategy):
    """Proof-derived opponent pairs, most specific first: (pattern, x, y, position)."""
    n = spec.n
    m = spec.schedule.m
    t_ab = transposition(n, spec.qa, spec.qb)
    last = claimed.moves[-1]
    canonical = spec.schedule.kind is ScheduleKind.CANONICAL
    if claimed.owner == 1 and canonical:
        yield "final-transposition", identity(n), t_ab, m - 1
    elif claimed.owner == 1:
        inv = adjoint(last)
        yield "undo-last-move", inv, compose(inv, t_ab), m - 1
    elif canonical:
        inv = adjoint(last)
        yield "undo-last-move", inv, compose(inv, t_ab), m - 1
        yield "split-first-move", _t_or_i(n, spec.q0, spec.qa), _t_or_i(n, spec.q0, spec.qb), 0
    else:
        yield "final-transposition", identity(n), t_ab, m
    return


def construct_counterexample(spec: GameSpec, claimed: Strategy) -> CounterexamplePair:
    """Two opponent strategies, differing in one move, that cannot both lose.

    Raises :class:`MissingHypothesisError` if the opponent's group lacks the
    moves every applicable construction needs.
    """
    v = validate(spec, claimed)
    if v is not None:
        raise StrategyError(v)
    opp_player = opponent(claimed.owner)
    group = spec.group(opp_player)
    rounds = spec.schedule.moves_for(opp_player)
    ident = identity(spec.n)
    missing = []
    for pattern, x, y, pos in _pair_candidates(spec, claimed):
        if not (_member(group, x) and _member(group, y)):
            missing.append(f"{pattern}: {x.label} and {y.label} must both lie in "
                           f"{group.describe()}")
            continue
        base = [ident] * rounds
        sigma = list(base)
        sigma[pos] = x
        sigma_p = list(base)
        sigma_p[pos] = y
        s, sp = Strategy(opp_player, tuple(sigma)), Strategy(opp_player, tuple(sigma_p))
        f1 = play(spec, *_ordered(claimed.owner, claimed, s)).final
        f2 = play(spec, *_ordered(claimed.owner, claimed, sp)).final
        target = spec.target(claimed.owner)
        if wins(f1, target) and wins(f2, target):
            raise RuntimeError(f"refutation '{pattern}' failed: both finals hit the target")
        return CounterexamplePair(s, sp, (f1, f2), pattern)
    raise MissingHypothesisError("; ".join(missing) or "no applicable construction")


def witness_noncanonical(spec: GameSpec) -> Strategy | None:
    """Player 1's strong winning strategy through a state fixed by player 2's group."""
    if spec.schedule.kind is not ScheduleKind.NONCANONICAL:
        raise ValueError("witness_noncanonical needs a noncanonical schedule")
    try:
        found = reachable_invariant(spec.group_a, spec.group_b, spec.q0)
    except IndeterminateError:
        return None
    if found is None:
        return None
    u, _ = found
    n = spec.n
    back = adjoint(u)
    if contains_symmetric(spec.group_a) is Membership.MEMBER:
        last = back if spec.q0 == spec.qa else compose(transposition(n, spec.q0, spec.qa), back)
    elif spec.q0 == spec.qa:
        last = back
    else:
        return None
    middle = (identity(n),) * (spec.schedule.m - 1)
    return Strategy(1, (u,) + middle + (last,))


def refute_by_dominance(spec: GameSpec, claimed: Strategy, strong: Strategy) -> StateVector:
    """Final state of ``claimed`` against an opponent's strong winning strategy."""
    final = play(spec, *_ordered(claimed.owner, claimed, strong)).final
    if wins(final, spec.target(claimed.owner)):
        raise RuntimeError("claimed strategy beat a strong winning strategy")
    return final


def random_unitary(n: int, rng: np.random.Generator) -> UnitaryMatrix:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return UnitaryMatrix(q * (d / np.abs(d)))


def sample_moves(group: ActionGroup, count: int, rng: np.random.Generator) -> list[UnitaryMatrix]:
    if group.kind is GroupKind.UNITARY:
        return [random_unitary(group.n, rng) for _ in range(count)]
    if group.kind is GroupKind.SYMMETRIC:
        return [UnitaryMatrix.from_perm(rng.permutation(group.n)) for _ in range(count)]
    cl = group.closure()
    return [cl.elements[int(i)] for i in rng.integers(len(cl), size=count)]


def sample_strategy(spec: GameSpec, player: int, rng: np.random.Generator) -> Strategy:
    k = spec.schedule.moves_for(player)
    return Strategy(player, tuple(sample_moves(spec.group(player), k, rng)))
