"""Check the strong-winning-strategy summary table on concrete games.

Each row is instantiated with enumerable groups for every tractable
``(n, m)`` up to the requested bounds and settled by exhaustive search.  Rows
whose natural instance involves all of U(n) get an additional
"witness-checked" instance: explicit witnesses are verified and sampled
claims are refuted by the proof constructions.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .game import GameSpec, Schedule, ScheduleKind, Strategy
from .groups import (
    ActionGroup,
    Membership,
    contains_symmetric,
    is_subgroup,
    reachable_invariant,
    symmetric_generators,
)
from .linalg import UnitaryMatrix, adjoint, compose, identity, qft, transposition
from .strategy import (
    DEFAULT_SEARCH_CAP,
    MissingHypothesisError,
    Status,
    construct_counterexample,
    find_strong,
    is_strong_winning,
    refute_by_dominance,
    sample_strategy,
    witness_noncanonical,
)

MAX_CANDIDATES = 20_000
REFUTATION_SAMPLES = 20
_CLOSURE_LIMIT = 2_000


@dataclass
class InstanceCheck:
    n: int
    m: int
    schedule: str
    group_a: str
    group_b: str
    method: str  # "exhaustion" | "witness-checked"
    p1: str  # "Yes" | "No" | "?" | "skipped"
    p2: str
    match: bool
    note: str = ""

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class RowResult:
    index: int
    title: str
    expected: tuple[str, str]
    checks: list[InstanceCheck] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.match for c in self.checks)

    @property
    def witness_checked(self) -> bool:
        return any(c.method == "witness-checked" for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "row": self.index,
            "title": self.title,
            "expected": {"player1": self.expected[0], "player2": self.expected[1]},
            "passed": self.passed,
            "witness_checked": self.witness_checked,
            "instances": [c.to_dict() for c in self.checks],
            "notes": self.notes,
        }


@dataclass
class TableReport:
    max_n: int
    max_m: int
    rows: list[RowResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def to_dict(self) -> dict:
        return {"max_n": self.max_n, "max_m": self.max_m, "passed": self.passed,
                "rows": [r.to_dict() for r in self.rows]}


ROWS = [
    (1, "Canonical & same group (classical vs classical)", ("No", "No")),
    (2, "Canonical & same group (quantum vs quantum)", ("No", "No")),
    (3, "Noncanonical & same group (classical vs classical)", ("No", "No")),
    (4, "Noncanonical & same group (quantum vs quantum)", ("No", "No")),
    (5, "Canonical & S_n <= A < B <= U(n)", ("No", "No")),
    (6, "Canonical & S_n <= B < A <= U(n)", ("No", "No")),
    (7, "Noncanonical & B < A & S_n <= A & invariant state", ("Yes", "No")),
    (8, "Noncanonical & B < A & invariant state & q0 = qA", ("Yes", "No")),
]


def quantum_group(n: int) -> ActionGroup | None:
    """A finite group strictly containing S_n with a non-permutation element.

    S_n together with F_n closes for n = 2, 3 (orders 16 and 108); otherwise a
    sign flip on the last basis state is used (signed permutations).
    """
    gens = list(symmetric_generators(n))
    g = ActionGroup.generated(gens + [qft(n)], closure_cap=_CLOSURE_LIMIT)
    if g.closure().complete:
        return g
    flip = np.eye(n, dtype=complex)
    flip[-1, -1] = -1
    g = ActionGroup.generated(gens + [UnitaryMatrix(flip)], closure_cap=_CLOSURE_LIMIT)
    return g if g.closure().complete else None


def fourier_group(n: int) -> ActionGroup | None:
    """Finite group containing S_n and F_n, when one closes under the limit."""
    g = ActionGroup.generated(list(symmetric_generators(n)) + [qft(n)], closure_cap=_CLOSURE_LIMIT)
    return g if g.closure().complete else None


def _block_hadamard(n: int) -> UnitaryMatrix:
    h = np.eye(n, dtype=complex)
    h[:2, :2] = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    return UnitaryMatrix(h)


def _row_instance(row: int, n: int, m: int):
    """(spec, hypothesis-check list) for an exhaustive instance, or (None, reason)."""
    sym = ActionGroup.symmetric(n)
    canon = Schedule.canonical(m)
    non = Schedule.noncanonical(m)
    q0, qa, qb = 0, n - 1, 0
    if row == 1:
        return GameSpec(n, q0, qa, qb, canon, sym, sym), ["S_n <= A = B"]
    if row == 3:
        return GameSpec(n, q0, qa, qb, non, sym, sym), ["S_n <= A = B"]
    if row in (2, 4, 5, 6):
        q = quantum_group(n)
        if q is None:
            return None, "no finite quantum group under the closure limit"
        if row == 2:
            return GameSpec(n, q0, qa, qb, canon, q, q), ["S_n <= A = B"]
        if row == 4:
            return GameSpec(n, q0, qa, qb, non, q, q), ["S_n <= A = B"]
        if row == 5:
            return GameSpec(n, q0, qa, qb, canon, sym, q), ["S_n <= A < B"]
        return GameSpec(n, q0, qa, qb, canon, q, sym), ["S_n <= B < A"]
    if row == 7:
        f = fourier_group(n)
        if f is None:
            return None, "S_n and F_n do not generate a group under the closure limit"
        return GameSpec(n, q0, qa, qb, non, f, sym), ["S_n <= B < A", "invariant reachable"]
    if row == 8:
        if n == 2:
            z = UnitaryMatrix(np.diag([1, -1]).astype(complex))
            s = UnitaryMatrix(np.diag([1, 1j]))
            ga, gb = ActionGroup.generated([s]), ActionGroup.generated([z])
            return GameSpec(2, 0, 0, 1, non, ga, gb), ["B < A", "S_n not <= A", "invariant reachable"]
        t01 = transposition(n, 0, 1)
        ga = ActionGroup.generated([t01, _block_hadamard(n)])
        gb = ActionGroup.generated([t01])
        return GameSpec(n, 0, 0, 1, non, ga, gb), ["B < A", "S_n not <= A", "invariant reachable"]
    raise ValueError(f"unknown row {row}")


def _hypotheses_hold(spec: GameSpec, hyps: list[str]) -> tuple[bool, str]:
    a, b = spec.group_a, spec.group_b
    checks = {
        "S_n <= A = B": lambda: a is b and contains_symmetric(a) is Membership.MEMBER,
        "S_n <= A < B": lambda: (contains_symmetric(a) is Membership.MEMBER
                                 and is_subgroup(a, b) is Membership.MEMBER
                                 and len(b.closure()) > len(a.closure())),
        "S_n <= B < A": lambda: (contains_symmetric(b) is Membership.MEMBER
                                 and is_subgroup(b, a) is Membership.MEMBER
                                 and len(a.closure()) > len(b.closure())),
        "B < A": lambda: (is_subgroup(b, a) is Membership.MEMBER
                          and len(a.closure()) > len(b.closure())),
        "S_n not <= A": lambda: contains_symmetric(a) is Membership.NOT_MEMBER,
        "invariant reachable": lambda: reachable_invariant(a, b, spec.q0) is not None,
    }
    for h in hyps:
        if not checks[h]():
            return False, f"hypothesis '{h}' fails for the constructed instance"
    return True, ""


def _candidate_count(spec: GameSpec, player: int) -> int:
    return len(spec.group(player).closure()) ** spec.schedule.moves_for(player)


def _yes_no(status: Status) -> str:
    return {Status.EXISTS: "Yes", Status.NOT_EXISTS: "No"}.get(status, "?")


def _exhaustive_check(row, title, expected, n, m, search_cap, impl) -> InstanceCheck | str:
    spec, hyps = _row_instance(row, n, m)
    if spec is None:
        return hyps
    ok, why = _hypotheses_hold(spec, hyps)
    results, notes = [], []
    for player in (1, 2):
        if _candidate_count(spec, player) > MAX_CANDIDATES:
            results.append("skipped")
            notes.append(f"player {player}: {_candidate_count(spec, player)} candidate "
                         "strategies exceed the tractability bound")
            continue
        v = find_strong(spec, player, search_cap=search_cap, impl=impl)
        results.append(_yes_no(v.status))
        if v.status is Status.INDETERMINATE:
            notes.append(f"player {player}: {v.reason}")
    if results == ["skipped", "skipped"]:
        return "intractable for both players"
    match = ok and all(r == "skipped" or r == e for r, e in zip(results, expected))
    if not ok:
        notes.append(why)
    return InstanceCheck(n, m, spec.schedule.kind.value, spec.group_a.describe(),
                         spec.group_b.describe(), "exhaustion", results[0], results[1],
                         match, "; ".join(notes))


def _refute_samples(spec: GameSpec, player: int, rng, extra=()) -> tuple[bool, str]:
    claims = list(extra) + [sample_strategy(spec, player, rng) for _ in range(REFUTATION_SAMPLES)]
    for s in claims:
        try:
            construct_counterexample(spec, s)
        except MissingHypothesisError as exc:
            return False, str(exc)
    return True, f"{len(claims)} sampled claims refuted by construction"


def _witness_checks(row: int, search_cap: int, impl, rng) -> list[InstanceCheck]:
    out = []
    if row in (2, 4):
        n, m = 3, 2
        sched = Schedule.canonical(m) if row == 2 else Schedule.noncanonical(m)
        u = ActionGroup.unitary(n)
        spec = GameSpec(n, 0, n - 1, 0, sched, u, u)
        r1 = _refute_samples(spec, 1, rng)
        r2 = _refute_samples(spec, 2, rng)
        out.append(_wc(spec, m, r1, r2, ("No", "No")))
    elif row in (5, 6):
        n, m = 7, 2
        sym, u = ActionGroup.symmetric(n), ActionGroup.unitary(n)
        a, b = (sym, u) if row == 5 else (u, sym)
        spec = GameSpec(n, 0, 6, 0, Schedule.canonical(m), a, b)
        extra = []
        if row == 6:
            f = qft(n)
            back = compose(transposition(n, 0, 6), adjoint(f))
            extra = [Strategy(1, (f, back)), Strategy(1, (f, identity(n)))]
        r1 = _refute_samples(spec, 1, rng, extra)
        r2 = _refute_samples(spec, 2, rng)
        out.append(_wc(spec, m, r1, r2, ("No", "No")))
    elif row in (7, 8):
        n, m = 7, 2
        if row == 7:
            spec = GameSpec(n, 0, 6, 0, Schedule.noncanonical(m), ActionGroup.unitary(n),
                            ActionGroup.symmetric(n))
        else:
            spec = GameSpec(n, 0, 0, 6, Schedule.noncanonical(m),
                            ActionGroup.generated([qft(n)]), ActionGroup.symmetric(n))
        w = witness_noncanonical(spec)
        check = is_strong_winning(spec, w, search_cap=search_cap, impl=impl) if w else None
        p1_ok = check is not None and check.holds is True
        r1 = (p1_ok, "witness " + ", ".join(x.label for x in w.moves) + f" verified ({check.method.value})"
              if p1_ok else "no verified witness")
        p2_ok = p1_ok
        if p1_ok:
            for _ in range(REFUTATION_SAMPLES):
                refute_by_dominance(spec, sample_strategy(spec, 2, rng), w)
        r2 = (p2_ok, f"{REFUTATION_SAMPLES} sampled claims beaten by the verified witness")
        c = _wc(spec, m, r1, r2, ("Yes", "No"), yes_first=True)
        if row == 8:
            c.note += "; B is not a subgroup of A here, the witness construction does not need it"
        out.append(c)
    return out


def _wc(spec, m, r1, r2, expected, yes_first=False) -> InstanceCheck:
    def verdict(ok, exp):
        return exp if ok else "?"
    p1 = verdict(r1[0], expected[0])
    p2 = verdict(r2[0], expected[1])
    return InstanceCheck(spec.n, m, spec.schedule.kind.value, spec.group_a.describe(),
                         spec.group_b.describe(), "witness-checked", p1, p2,
                         r1[0] and r2[0], f"player 1: {r1[1]}; player 2: {r2[1]}")


def verify_table(max_n: int = 3, max_m: int = 2, *, search_cap: int = DEFAULT_SEARCH_CAP,
                 seed: int = 0, impl=None) -> TableReport:
    if not 2 <= max_n <= 4:
        raise ValueError("max_n must be between 2 and 4")
    if not 1 <= max_m <= 3:
        raise ValueError("max_m must be between 1 and 3")
    rng = np.random.default_rng(seed)
    rows = []
    for index, title, expected in ROWS:
        row = RowResult(index, title, expected)
        for n in range(2, max_n + 1):
            for m in range(1, max_m + 1):
                res = _exhaustive_check(index, title, expected, n, m, search_cap, impl)
                if isinstance(res, str):
                    row.notes.append(f"n={n}, m={m}: skipped ({res})")
                else:
                    row.checks.append(res)
        row.checks.extend(_witness_checks(index, search_cap, impl, rng))
        rows.append(row)
    return TableReport(max_n, max_m, rows)
