"""Independent oracles used across the test modules."""
import itertools

import numpy as np


def dft_matrix(n):
    # entries written out from the definition, no shared code with linalg.qft
    w = np.exp(2j * np.pi / n)
    return np.array([[w ** (j * k) for k in range(n)] for j in range(n)]) / np.sqrt(n)


def haar_unitary(n, rng):
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_state(n, rng):
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def perm_group_order(gens, n):
    """Brute force: size of the group generated by permutation tuples."""
    seen = {tuple(range(n))}
    frontier = list(seen)
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = tuple(g[k] for k in p)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return len(seen)


def all_profiles(moves, k):
    return itertools.product(moves, repeat=k)


def brute_force_strong(spec, own_moves, opp_moves):
    """Reference search written with plain loops over explicit matrices."""
    from qgroupgames.game import Strategy

    sched = spec.schedule
    owner_count = sched.moves_for(1)
    opp_count = sched.moves_for(2)
    start = np.zeros(spec.n, dtype=complex)
    start[spec.q0] = 1
    for mine in itertools.product(range(len(own_moves)), repeat=owner_count):
        ok = True
        for theirs in itertools.product(range(len(opp_moves)), repeat=opp_count):
            a, b = iter(mine), iter(theirs)
            v = start.copy()
            for r in range(sched.rounds):
                m = own_moves[next(a)] if r % 2 == 0 else opp_moves[next(b)]
                v = m @ v
            if abs(v[spec.qa]) ** 2 < 1 - 1e-9:
                ok = False
                break
        if ok:
            return mine
    return None
