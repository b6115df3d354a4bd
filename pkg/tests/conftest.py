import numpy as np
import pytest

from qgroupgames.game import GameSpec, Schedule
from qgroupgames.groups import ActionGroup
from qgroupgames.linalg import adjoint, compose, identity, qft, transposition


def example_spec(kind: str, n: int = 7) -> GameSpec:
    sched = Schedule.canonical(2) if kind == "canonical" else Schedule.noncanonical(2)
    return GameSpec(n, 0, n - 1, 0, sched, ActionGroup.unitary(n), ActionGroup.symmetric(n))


@pytest.fixture
def ex1():
    return example_spec("canonical")


@pytest.fixture
def ex2():
    return example_spec("noncanonical")


@pytest.fixture
def f7():
    return qft(7)


@pytest.fixture
def back7():
    # T_{0,6} F7^dagger
    return compose(transposition(7, 0, 6), adjoint(qft(7)))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def sym_spec(n, kind, m, q0=0, qa=None, qb=0):
    qa = n - 1 if qa is None else qa
    sched = Schedule.canonical(m) if kind == "canonical" else Schedule.noncanonical(m)
    g = ActionGroup.symmetric(n)
    return GameSpec(n, q0, qa, qb, sched, g, g)


