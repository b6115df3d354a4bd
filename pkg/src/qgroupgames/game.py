"""Game definitions, strategies, deterministic playout and measurement."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .groups import ActionGroup, Membership, contains
from .linalg import StateVector, UnitaryMatrix, apply, basis_state

SURE_WIN_TOL = 1e-9


class ScheduleKind(enum.Enum):
    CANONICAL = "canonical"
    NONCANONICAL = "noncanonical"


@dataclass(frozen=True)
class Schedule:
    """Canonical: 2m rounds, player 2 moves last.  Noncanonical: 2m+1 rounds,
    player 1 moves first and last."""

    kind: ScheduleKind
    m: int

    def __post_init__(self):
        if not isinstance(self.kind, ScheduleKind):
            object.__setattr__(self, "kind", ScheduleKind(self.kind))
        if self.m < 1:
            raise ValueError("m must be at least 1")

    @classmethod
    def canonical(cls, m: int) -> Schedule:
        return cls(ScheduleKind.CANONICAL, m)

    @classmethod
    def noncanonical(cls, m: int) -> Schedule:
        return cls(ScheduleKind.NONCANONICAL, m)

    @property
    def rounds(self) -> int:
        return 2 * self.m + (self.kind is ScheduleKind.NONCANONICAL)

    def moves_for(self, player: int) -> int:
        _check_player(player)
        if player == 1 and self.kind is ScheduleKind.NONCANONICAL:
            return self.m + 1
        return self.m

    def owner(self, r: int) -> int:
        """Player acting at 0-based round ``r``."""
        return 1 if r % 2 == 0 else 2


def _check_player(player: int) -> None:
    if player not in (1, 2):
        raise ValueError(f"player must be 1 or 2, got {player!r}")


@dataclass(frozen=True, eq=False)
class GameSpec:
    n: int
    q0: int
    qa: int
    qb: int
    schedule: Schedule
    group_a: ActionGroup
    group_b: ActionGroup

    def __post_init__(self):
        for name in ("q0", "qa", "qb"):
            k = getattr(self, name)
            if not 0 <= k < self.n:
                raise ValueError(f"{name}={k} out of range for dimension {self.n}")
        if self.qa == self.qb:
            raise ValueError("the two players' target states must differ")
        for name in ("group_a", "group_b"):
            if getattr(self, name).n != self.n:
                raise ValueError(f"{name} has dimension {getattr(self, name).n}, game has {self.n}")

    def group(self, player: int) -> ActionGroup:
        _check_player(player)
        return self.group_a if player == 1 else self.group_b

    def target(self, player: int) -> int:
        _check_player(player)
        return self.qa if player == 1 else self.qb

    @property
    def initial_state(self) -> StateVector:
        return basis_state(self.n, self.q0)


@dataclass(frozen=True)
class Strategy:
    owner: int
    moves: tuple[UnitaryMatrix, ...]

    def __post_init__(self):
        _check_player(self.owner)
        object.__setattr__(self, "moves", tuple(self.moves))

    def __len__(self) -> int:
        return len(self.moves)


@dataclass(frozen=True)
class Violation:
    kind: str  # "length" | "membership" | "indeterminate" | "dimension"
    index: int | None
    message: str


class StrategyError(ValueError):
    def __init__(self, violation: Violation):
        super().__init__(violation.message)
        self.violation = violation


def validate(spec: GameSpec, s: Strategy) -> Violation | None:
    """First problem with ``s`` under ``spec``, or None if it is admissible."""
    want = spec.schedule.moves_for(s.owner)
    if len(s.moves) != want:
        return Violation("length", None,
                         f"player {s.owner} needs {want} moves, strategy has {len(s.moves)}")
    group = spec.group(s.owner)
    for i, move in enumerate(s.moves):
        if move.n != spec.n:
            return Violation("dimension", i, f"move {i} has dimension {move.n}, game has {spec.n}")
        m = contains(group, move)
        if m is Membership.NOT_MEMBER:
            return Violation("membership", i,
                             f"move {i} ({move.label}) is not in {group.describe()}")
        if m is Membership.INDETERMINATE:
            return Violation("indeterminate", i,
                             f"membership of move {i} ({move.label}) in {group.describe()} "
                             "could not be decided (closure cap reached)")
    return None


def interleave(spec: GameSpec, s1: Strategy, s2: Strategy) -> list[UnitaryMatrix]:
    """Moves in play order A1, B1, A2, B2, ... (, A_{m+1})."""
    a, b = iter(s1.moves), iter(s2.moves)
    return [next(a) if spec.schedule.owner(r) == 1 else next(b)
            for r in range(spec.schedule.rounds)]


@dataclass(frozen=True)
class Playout:
    trajectory: tuple[StateVector, ...]

    @property
    def final(self) -> StateVector:
        return self.trajectory[-1]


def play(spec: GameSpec, s1: Strategy, s2: Strategy, check: bool = True) -> Playout:
    if s1.owner != 1 or s2.owner != 2:
        raise ValueError("play expects player 1's strategy then player 2's")
    if check:
        for s in (s1, s2):
            v = validate(spec, s)
            if v is not None:
                raise StrategyError(v)
    state = spec.initial_state
    trajectory = [state]
    for move in interleave(spec, s1, s2):
        state = apply(move, state)
        trajectory.append(state)
    return Playout(tuple(trajectory))


class Verdict(enum.Enum):
    PLAYER1_SURE_WIN = "player1_sure_win"
    PLAYER2_SURE_WIN = "player2_sure_win"
    PROBABILISTIC = "probabilistic"


@dataclass(frozen=True)
class Outcome:
    distribution: np.ndarray
    verdict: Verdict

    def probability(self, k: int) -> float:
        return float(self.distribution[k])


def measure(p: Playout | StateVector, spec: GameSpec) -> Outcome:
    final = p.final if isinstance(p, Playout) else p
    dist = np.abs(final.amps) ** 2
    dist.setflags(write=False)
    if dist[spec.qa] >= 1.0 - SURE_WIN_TOL:
        verdict = Verdict.PLAYER1_SURE_WIN
    elif dist[spec.qb] >= 1.0 - SURE_WIN_TOL:
        verdict = Verdict.PLAYER2_SURE_WIN
    else:
        verdict = Verdict.PROBABILISTIC
    return Outcome(dist, verdict)


def wins(state: StateVector, target: int) -> bool:
    return abs(state.amps[target]) ** 2 >= 1.0 - SURE_WIN_TOL


def strategy(owner: int, moves: Sequence[UnitaryMatrix]) -> Strategy:
    return Strategy(owner, tuple(moves))
