import numpy as np
import pytest

from conftest import sym_spec
from helpers import brute_force_strong
from qgroupgames.game import GameSpec, Schedule, Strategy, play, wins
from qgroupgames.groups import ActionGroup, symmetric_generators
from qgroupgames.linalg import (
    UnitaryMatrix,
    adjoint,
    compose,
    identity,
    qft,
    transposition,
)
from qgroupgames.strategy import (
    Method,
    MissingHypothesisError,
    Status,
    construct_counterexample,
    find_strong,
    find_weak,
    is_strong_winning,
    refute_by_dominance,
    sample_strategy,
    weak_pair,
    witness_noncanonical,
)


def labels(s):
    return [u.label for u in s.moves]


# -- is_strong_winning ----------------------------------------------------------------

def test_example_two_witness_holds_by_shortcut(ex2, f7, back7):
    res = is_strong_winning(ex2, Strategy(1, (f7, identity(7), back7)))
    assert res.holds is True
    assert res.method is Method.INVARIANCE_SHORTCUT
    assert res.playouts == 1


def test_example_one_strategy_fails(ex1, f7, back7):
    res = is_strong_winning(ex1, Strategy(1, (f7, back7)))
    assert res.holds is False
    # the refuting opponent strategy really wins for player 2
    final = play(ex1, Strategy(1, (f7, back7)), res.counter).final
    assert not wins(final, 6)


def test_all_identity_not_strong():
    spec = sym_spec(2, "canonical", 1, qa=1)
    assert is_strong_winning(spec, Strategy(1, (identity(2),))).holds is False


def test_unitary_opponent_without_invariant_is_undecided():
    u = ActionGroup.unitary(3)
    spec = GameSpec(3, 0, 2, 0, Schedule.canonical(1), u, u)
    res = is_strong_winning(spec, Strategy(1, (transposition(3, 0, 2),)))
    assert res.holds is None and "not enumerable" in res.reason


def test_search_cap_gives_indeterminate(ex2, f7, back7):
    # without the shortcut 5040^2 profiles exceed a small cap
    res = is_strong_winning(ex2, Strategy(1, (f7, identity(7), back7)), search_cap=1000,
                            use_shortcut=False)
    assert res.holds is None and "cap" in res.reason


def test_witness_agrees_with_brute_force():
    n = 3
    spec = GameSpec(n, 0, 2, 0, Schedule.noncanonical(2), ActionGroup.unitary(n),
                    ActionGroup.symmetric(n))
    w = witness_noncanonical(spec)
    assert is_strong_winning(spec, w).method is Method.INVARIANCE_SHORTCUT
    brute = is_strong_winning(spec, w, use_shortcut=False)
    assert brute.holds is True and brute.method is Method.EXHAUSTION
    assert brute.playouts == 36


# -- find_strong ----------------------------------------------------------------------

@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("kind,m", [("canonical", 1), ("canonical", 2), ("noncanonical", 1)])
def test_no_strong_strategy_same_symmetric_group(n, kind, m):
    spec = sym_spec(n, kind, m)
    for player in (1, 2):
        v = find_strong(spec, player)
        assert v.status is Status.NOT_EXISTS and v.method is Method.EXHAUSTION


def test_find_strong_matches_brute_force_oracle():
    n = 2
    a = ActionGroup.generated([transposition(2, 0, 1), qft(2)])
    b = ActionGroup.symmetric(2)
    for sched in (Schedule.canonical(1), Schedule.noncanonical(1)):
        spec = GameSpec(n, 0, 1, 0, sched, a, b)
        own = [e.entries for e in a.closure().elements]
        opp = [e.entries for e in b.closure().elements]
        ref = brute_force_strong(spec, own, opp)
        v = find_strong(spec, 1)
        assert (ref is not None) == (v.status is Status.EXISTS)


def test_find_strong_example_two_finite(f7, back7):
    a = ActionGroup.generated([f7, back7], closure_cap=64)
    spec = GameSpec(7, 0, 6, 0, Schedule.noncanonical(1), a,
                    ActionGroup.generated(list(symmetric_generators(7))))
    v = find_strong(spec, 1)
    assert v.status is Status.EXISTS
    assert labels(v.witness) == ["F7", "T_{0,6}F7†"]


def test_find_strong_unitary_owner_uses_witness(ex2):
    v = find_strong(ex2, 1)
    assert v.status is Status.EXISTS and v.method is Method.CONSTRUCTION
    assert labels(v.witness) == ["F7", "I", "T_{0,6}F7†"]
    assert find_strong(ex2, 2).status is Status.INDETERMINATE


def test_find_strong_cap():
    spec = sym_spec(3, "canonical", 2)
    v = find_strong(spec, 1, search_cap=10)
    assert v.status is Status.INDETERMINATE and "cap" in v.reason


def test_find_strong_deterministic(f7, back7):
    a = ActionGroup.generated([f7, back7], closure_cap=64)
    spec = GameSpec(7, 0, 6, 0, Schedule.noncanonical(1), a, ActionGroup.symmetric(7))
    first, second = find_strong(spec, 1), find_strong(spec, 1)
    assert first.status == second.status
    assert labels(first.witness) == labels(second.witness)
    assert first.evidence == second.evidence


# -- find_weak ------------------------------------------------------------------------

def test_weak_examples_n2():
    spec = sym_spec(2, "canonical", 1, qa=1, qb=0)
    v1 = find_weak(spec, 1)
    assert v1.status is Status.EXISTS
    assert labels(v1.witness) == ["T_{0,1}"] and labels(v1.co_witness) == ["I"]
    v2 = find_weak(spec, 2)
    assert labels(v2.witness) == ["I"] and labels(v2.co_witness) == ["I"]


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("kind,m", [("canonical", 1), ("canonical", 2), ("noncanonical", 1)])
def test_weak_exists_and_witness_wins(n, kind, m):
    spec = sym_spec(n, kind, m)
    for player in (1, 2):
        v = find_weak(spec, player)
        assert v.status is Status.EXISTS
        s1, s2 = (v.witness, v.co_witness) if player == 1 else (v.co_witness, v.witness)
        assert wins(play(spec, s1, s2).final, spec.target(player))


def test_weak_pair_shape():
    spec = sym_spec(4, "canonical", 3, q0=1, qa=3, qb=2)
    w, c = weak_pair(spec, 1)
    assert labels(w) == ["I", "I", "T_{2,3}"]
    assert labels(c) == ["T_{1,2}", "I", "I"]


def test_weak_falls_back_to_exhaustion():
    # player 2 cannot move at all here, so the paired construction is inadmissible
    triv = ActionGroup.generated([identity(3)])
    spec = GameSpec(3, 0, 1, 2, Schedule.canonical(1), ActionGroup.symmetric(3), triv)
    v = find_weak(spec, 1)
    assert v.status is Status.EXISTS and v.method is Method.EXHAUSTION
    assert labels(v.witness) == ["T_{0,1}"]


def test_weak_not_exists():
    triv = ActionGroup.generated([identity(2)])
    spec = GameSpec(2, 0, 1, 0, Schedule.canonical(1), triv, triv)
    assert find_weak(spec, 1).status is Status.NOT_EXISTS


def test_strong_implies_weak(f7, back7):
    a = ActionGroup.generated([f7, back7], closure_cap=64)
    spec = GameSpec(7, 0, 6, 0, Schedule.noncanonical(1), a, ActionGroup.symmetric(7))
    assert find_strong(spec, 1).status is Status.EXISTS
    assert find_weak(spec, 1).status is Status.EXISTS


# -- counterexamples ------------------------------------------------------------------

def test_counterexample_example_one(ex1, f7, back7):
    pair = construct_counterexample(ex1, Strategy(1, (f7, back7)))
    assert labels(pair.sigma) == ["I", "I"]
    assert labels(pair.sigma_prime) == ["I", "T_{0,6}"]
    assert [f.basis_index() for f in pair.finals] == [6, 0]


def test_counterexample_n2():
    spec = sym_spec(2, "canonical", 1, qa=1, qb=0)
    pair = construct_counterexample(spec, Strategy(1, (transposition(2, 0, 1),)))
    assert labels(pair.sigma) == ["I"] and labels(pair.sigma_prime) == ["T_{0,1}"]
    assert [f.basis_index() for f in pair.finals] == [1, 0]


def test_counterexample_noncanonical_same_group():
    n = 3
    u = ActionGroup.unitary(n)
    spec = GameSpec(n, 0, 2, 0, Schedule.noncanonical(1), u, u)
    last = qft(3)
    pair = construct_counterexample(spec, Strategy(1, (identity(3), last)))
    assert pair.pattern == "undo-last-move"
    assert not all(wins(f, 2) for f in pair.finals)


@pytest.mark.parametrize("kind", ["canonical", "noncanonical"])
@pytest.mark.parametrize("player", [1, 2])
def test_counterexamples_refute_random_claims(kind, player, rng):
    n = 4
    u = ActionGroup.unitary(n)
    spec = GameSpec(n, 0, 3, 1, Schedule.canonical(2) if kind == "canonical"
                    else Schedule.noncanonical(2), u, u)
    for _ in range(20):
        claim = sample_strategy(spec, player, rng)
        pair = construct_counterexample(spec, claim)
        diff = [a is not b and not np.allclose(a.entries, b.entries)
                for a, b in zip(pair.sigma.moves, pair.sigma_prime.moves)]
        assert sum(diff) == 1
        assert not all(wins(f, spec.target(player)) for f in pair.finals)


def test_not_exists_soundness_on_symmetric(rng):
    spec = sym_spec(3, "canonical", 2)
    assert find_strong(spec, 1).status is Status.NOT_EXISTS
    for _ in range(20):
        pair = construct_counterexample(spec, sample_strategy(spec, 1, rng))
        assert not all(wins(f, spec.qa) for f in pair.finals)


def test_missing_hypothesis():
    phase = UnitaryMatrix(np.diag([1, 1j, -1]))
    b = ActionGroup.generated([phase])
    spec = GameSpec(3, 0, 2, 0, Schedule.canonical(1), ActionGroup.symmetric(3), b)
    with pytest.raises(MissingHypothesisError, match="T_"):
        construct_counterexample(spec, Strategy(1, (transposition(3, 0, 2),)))


# -- witnesses ------------------------------------------------------------------------

def test_witness_example_two(ex2):
    w = witness_noncanonical(ex2)
    assert labels(w) == ["F7", "I", "T_{0,6}F7†"]
    assert is_strong_winning(ex2, w).holds is True


def test_witness_target_is_start(f7):
    spec = GameSpec(7, 0, 0, 6, Schedule.noncanonical(3), ActionGroup.generated([f7]),
                    ActionGroup.symmetric(7))
    w = witness_noncanonical(spec)
    assert labels(w) == ["F7", "I", "I", "F7†"]
    assert np.allclose(w.moves[-1].entries, adjoint(f7).entries)
    assert is_strong_winning(spec, w).holds is True


def test_witness_absent_for_symmetric_groups():
    assert witness_noncanonical(sym_spec(4, "noncanonical", 2)) is None


def test_witness_needs_noncanonical(ex1):
    with pytest.raises(ValueError):
        witness_noncanonical(ex1)


def test_dominance_refutation(ex2, rng):
    w = witness_noncanonical(ex2)
    for _ in range(10):
        final = refute_by_dominance(ex2, sample_strategy(ex2, 2, rng), w)
        assert not wins(final, ex2.qb)
