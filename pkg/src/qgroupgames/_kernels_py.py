"""Pure-Python/numpy profile scanner.  Reference semantics for ``_kernels.pyx``."""
from __future__ import annotations

import numpy as np

NOT_FOUND = 0
FOUND = 1
BUDGET = 2


def scan(owner_set, owner_idx, opp_set, slots, start, target, want_win,
         tol, budget, projector=None, inv_tol=1e-8):
    """Walk opponent profiles in lexicographic order against one fixed strategy.

    ``slots[r] >= 0`` means round ``r`` plays ``owner_set[owner_idx[slots[r]]]``;
    ``slots[r] < 0`` means the opponent picks any element of ``opp_set``.
    Stops at the first profile whose final state wins (``want_win``) or fails
    to win (not ``want_win``) for the owner's target.

    With ``projector`` given, first tries the invariance shortcut: if the state
    lies in the projector's range at every opponent round, all profiles share
    one final state and a single playout decides.

    Returns ``(status, profile, playouts, used_shortcut)``.
    """
    nrounds = len(slots)
    branch_rounds = [r for r in range(nrounds) if slots[r] < 0]
    nb = len(branch_rounds)
    k_opp = opp_set.shape[0]
    thresh = 1.0 - tol

    if projector is not None and nb:
        v = start
        invariant = True
        for r in range(nrounds):
            s = slots[r]
            if s < 0:
                if np.linalg.norm(v - projector @ v) > inv_tol:
                    invariant = False
                    break
            else:
                v = owner_set[owner_idx[s]] @ v
        if invariant:
            if budget < 1:
                return BUDGET, None, 0, True
            win = abs(v[target]) ** 2 >= thresh
            if win == want_win:
                return FOUND, (0,) * nb, 1, True
            return NOT_FOUND, None, 1, True

    states = [start] + [None] * nrounds
    counter = [0] * nb
    branch_of = {r: b for b, r in enumerate(branch_rounds)}
    playouts = 0
    r0 = 0
    while True:
        for r in range(r0, nrounds):
            s = slots[r]
            if s >= 0:
                m = owner_set[owner_idx[s]]
            else:
                m = opp_set[counter[branch_of[r]]]
            states[r + 1] = m @ states[r]
        if playouts >= budget:
            return BUDGET, None, playouts, False
        playouts += 1
        p = states[nrounds][target]
        win = (p.real * p.real + p.imag * p.imag) >= thresh
        if win == want_win:
            return FOUND, tuple(counter), playouts, False
        b = nb - 1
        while b >= 0 and counter[b] == k_opp - 1:
            counter[b] = 0
            b -= 1
        if b < 0:
            return NOT_FOUND, None, playouts, False
        counter[b] += 1
        r0 = branch_rounds[b]
