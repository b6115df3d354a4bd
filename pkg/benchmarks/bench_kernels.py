"""Compare the compiled and pure-Python profile scanners.

    python benchmarks/bench_kernels.py [--repeat 3]

Each workload asks a kernel to refute (or fail to refute) one owner strategy
against every opponent profile, which is the inner loop of the strategy search.
"""
import argparse
import time

import numpy as np

from qgroupgames import kernels
from qgroupgames.automaton import transposition_family
from qgroupgames.game import GameSpec, Schedule
from qgroupgames.groups import ActionGroup
from qgroupgames.linalg import adjoint, compose, identity, qft, transposition
from qgroupgames.strategy import _slots


def _workload(spec, moves, opp_moves, player=1):
    owner = np.stack([m.entries for m in moves])
    opp = np.stack([m.entries for m in opp_moves])
    start = spec.initial_state.amps
    return dict(owner_set=owner, owner_idx=np.arange(len(moves)), opp_set=opp,
                slots=_slots(spec, player), start=start, target=spec.target(player),
                want_win=False, tol=1e-9, budget=10**7)


def workloads():
    out = {}
    # winning strategy checked without the shortcut: every profile is played
    f = qft(7)
    spec = GameSpec(7, 0, 6, 0, Schedule.noncanonical(3), ActionGroup.unitary(7),
                    ActionGroup.symmetric(7))
    moves = [f, identity(7), identity(7), compose(transposition(7, 0, 6), adjoint(f))]
    out["n=7, 21 transpositions, 3 opponent moves"] = _workload(
        spec, moves, [u for _, u in transposition_family(7)])
    # Fourier round trip around the S5-invariant state, checked against the full closure
    f5 = qft(5)
    s5 = ActionGroup.symmetric(5).closure().elements
    spec = GameSpec(5, 0, 4, 0, Schedule.noncanonical(2), ActionGroup.unitary(5),
                    ActionGroup.symmetric(5))
    moves = [f5, identity(5), compose(transposition(5, 0, 4), adjoint(f5))]
    out["n=5, |S5| = 120, 2 opponent moves"] = _workload(spec, moves, s5)
    # no opponent profile helps an owner who ends on F4, so the whole space is scanned
    f4 = qft(4)
    s4 = ActionGroup.symmetric(4).closure().elements
    spec = GameSpec(4, 0, 3, 2, Schedule.noncanonical(4), ActionGroup.unitary(4),
                    ActionGroup.symmetric(4))
    kw = _workload(spec, [identity(4)] * 4 + [f4], s4)
    kw["want_win"] = True
    out["n=4, |S4| = 24, 4 opponent moves"] = kw
    return out


def bench(repeat):
    available = kernels.backends()
    print(f"backends available: {', '.join(sorted(available))} (default {kernels.BACKEND})")
    for name, kw in workloads().items():
        row = {}
        for impl in sorted(available):
            best = float("inf")
            for _ in range(repeat):
                t0 = time.perf_counter()
                status, _, playouts, _ = kernels.scan(**kw, impl=impl)
                best = min(best, time.perf_counter() - t0)
            row[impl] = (best, playouts, status)
        print(f"\n{name}")
        for impl, (t, playouts, status) in row.items():
            print(f"  {impl:7s} {t * 1e3:10.2f} ms  {playouts:9d} playouts  "
                  f"{playouts / t / 1e6:7.3f} M playouts/s  status={status}")
        if len(row) == 2:
            print(f"  speedup {row['python'][0] / row['cython'][0]:.1f}x")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    bench(ap.parse_args().repeat)
