"""Reachable-state automata of a game and their DOT rendering.

States are identified up to global phase: the first amplitude above
``KEY_TOL`` is rotated onto the positive real axis and everything is rounded
to a 1e-7 grid.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .game import GameSpec
from .linalg import StateVector, UnitaryMatrix, transposition

KEY_TOL = 1e-7
MAX_NODES = 10_000
EDGE_TOL = 1e-8
TRANSPOSITION_FAMILY = "T_{i,j}"

Move = tuple[str, UnitaryMatrix]
AlphabetEntry = Union[UnitaryMatrix, Move]


def canonical_amplitudes(v: StateVector | np.ndarray) -> np.ndarray:
    a = np.asarray(v.amps if isinstance(v, StateVector) else v, dtype=np.complex128)
    nz = np.flatnonzero(np.abs(a) > KEY_TOL)
    if nz.size == 0:
        raise ValueError("cannot key the zero vector")
    lead = a[nz[0]]
    return a * (abs(lead) / lead)


def canonical_key(v: StateVector | np.ndarray) -> tuple[int, ...]:
    """Integer tuple identifying ``v`` up to global phase."""
    a = canonical_amplitudes(v)
    flat = np.empty(2 * a.size)
    flat[0::2] = a.real
    flat[1::2] = a.imag
    # +0.0 folds the negative zeros rint can produce
    return tuple(int(x) for x in np.rint(flat / KEY_TOL) + 0.0)


@dataclass(frozen=True)
class StateNode:
    key: tuple[int, ...]
    label: str
    marks: frozenset[str]
    representative: StateVector
    basis: int | None = None
    order: int = 0  # discovery index

    @property
    def sort_key(self) -> tuple:
        return (0, self.basis, 0) if self.basis is not None else (1, 0, self.order)


@dataclass(frozen=True)
class TransitionEdge:
    source: tuple[int, ...]
    target: tuple[int, ...]
    label: str


@dataclass(frozen=True)
class Automaton:
    nodes: tuple[StateNode, ...]
    edges: tuple[TransitionEdge, ...]
    initial: tuple[int, ...]
    depth: int
    truncated: bool = False

    def node(self, key) -> StateNode:
        for nd in self.nodes:
            if nd.key == key:
                return nd
        raise KeyError(key)

    def by_label(self, label: str) -> StateNode:
        for nd in self.nodes:
            if nd.label == label:
                return nd
        raise KeyError(label)

    def adjacency(self) -> dict[tuple[str, str], tuple[str, ...]]:
        """``(source label, target label) -> sorted move labels``."""
        names = {nd.key: nd.label for nd in self.nodes}
        merged = defaultdict(set)
        for e in self.edges:
            merged[names[e.source], names[e.target]].add(e.label)
        return {k: tuple(sorted(v)) for k, v in merged.items()}


def transposition_family(n: int) -> list[Move]:
    """Every transposition, all sharing the label ``T_{i,j}``."""
    return [(TRANSPOSITION_FAMILY, transposition(n, i, j))
            for i in range(n) for j in range(i + 1, n)]


def _moves(alphabet: Iterable[AlphabetEntry], n: int, who: str) -> list[Move]:
    out = []
    for entry in alphabet:
        if isinstance(entry, UnitaryMatrix):
            entry = (entry.label, entry)
        label, u = entry
        if u.n != n:
            raise ValueError(f"{who} alphabet move {label} has dimension {u.n}, game has {n}")
        out.append((str(label), u))
    if not out:
        raise ValueError(f"{who} alphabet is empty")
    return out


def explore(spec: GameSpec, alphabet_a: Sequence[AlphabetEntry],
            alphabet_b: Sequence[AlphabetEntry], depth: int | None = None) -> Automaton:
    """Breadth-first, round by round: every state reachable at round ``r`` is
    hit with every move of the player acting at ``r``."""
    moves = {1: _moves(alphabet_a, spec.n, "player 1"), 2: _moves(alphabet_b, spec.n, "player 2")}
    rounds = spec.schedule.rounds
    if depth is None:
        depth = rounds
    if not 0 <= depth <= rounds:
        raise ValueError(f"depth must lie in [0, {rounds}], got {depth}")

    reps: dict[tuple, np.ndarray] = {}
    order: list[tuple] = []

    def visit(a: np.ndarray) -> tuple:
        key = canonical_key(a)
        if key not in reps:
            reps[key] = canonical_amplitudes(a)
            order.append(key)
        return key

    start = visit(spec.initial_state.amps)
    edges: set[tuple] = set()
    frontier = [start]
    truncated = False
    for r in range(depth):
        nxt: dict[tuple, None] = {}
        for key in frontier:
            src = reps[key]
            for label, u in moves[spec.schedule.owner(r)]:
                dst = visit(u.entries @ src)
                edges.add((key, dst, label))
                nxt[dst] = None
                if len(order) > MAX_NODES:
                    truncated = True
                    break
            if truncated:
                break
        if truncated:
            break
        frontier = list(nxt)

    nodes = []
    psi = 0
    for i, key in enumerate(order):
        a = reps[key]
        big = np.flatnonzero(np.abs(a) > KEY_TOL)
        basis = int(big[0]) if big.size == 1 else None
        if basis is None:
            psi += 1
            label = f"psi_{psi}"
        else:
            label = str(basis)
        marks = set()
        if key == start:
            marks.add("initial")
        if basis == spec.qa:
            marks.add("targetP1")
        if basis == spec.qb:
            marks.add("targetP2")
        nodes.append(StateNode(key, label, frozenset(marks), StateVector.normalized(a), basis, i))
    nodes.sort(key=lambda nd: nd.sort_key)
    edge_objs = [TransitionEdge(s, t, lab) for s, t, lab in edges]
    rank = {nd.key: i for i, nd in enumerate(nodes)}
    edge_objs.sort(key=lambda e: (rank[e.source], rank[e.target], e.label))
    return Automaton(tuple(nodes), tuple(edge_objs), start, depth, truncated)


def validate_edges(aut: Automaton, alphabet: dict[str, list[UnitaryMatrix]] | None = None,
                   tol: float = EDGE_TOL) -> list[TransitionEdge]:
    """Edges whose move does not carry the source representative onto the
    target representative up to phase.  ``alphabet`` maps labels to the
    matrices carrying that label; at least one must fit."""
    bad = []
    reps = {nd.key: nd.representative.amps for nd in aut.nodes}
    for e in aut.edges:
        cands = alphabet.get(e.label, []) if alphabet else []
        ok = False
        for u in cands:
            w = u.entries @ reps[e.source]
            if abs(np.vdot(reps[e.target], w)) >= 1.0 - tol:
                ok = True
                break
        if not ok:
            bad.append(e)
    return bad


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _display(nd: StateNode) -> str:
    return f"|{nd.label}⟩" if nd.basis is not None else f"|ψ_{nd.label[4:]}⟩"


def _node_id(nd: StateNode) -> str:
    return f"q{nd.basis}" if nd.basis is not None else nd.label


def to_dot(aut: Automaton, name: str = "game") -> str:
    """Graphviz digraph text; deterministic for a given automaton."""
    ids = {nd.key: _node_id(nd) for nd in aut.nodes}
    lines = [f"digraph {_quote(name)} {{", "  rankdir=LR;",
             "  node [shape=circle];", '  __start [shape=point, label=""];']
    for nd in aut.nodes:
        attrs = [f"label={_quote(_display(nd))}"]
        style = []
        if "targetP1" in nd.marks:
            style.append("shape=doublecircle, style=filled, fillcolor=lightpink")
        if "targetP2" in nd.marks:
            style.append("shape=doubleoctagon, style=filled, fillcolor=palegreen")
        if "targetP1" in nd.marks and "targetP2" in nd.marks:
            style = ["shape=tripleoctagon, style=filled, fillcolor=khaki"]
        attrs.extend(style)
        lines.append(f"  {ids[nd.key]} [{', '.join(attrs)}];")
    lines.append(f"  __start -> {ids[aut.initial]};")
    merged: dict[tuple, set] = defaultdict(set)
    for e in aut.edges:
        merged[e.source, e.target].add(e.label)
    rank = {nd.key: i for i, nd in enumerate(aut.nodes)}
    for (s, t) in sorted(merged, key=lambda st: (rank[st[0]], rank[st[1]])):
        label = ", ".join(sorted(merged[s, t]))
        lines.append(f"  {ids[s]} -> {ids[t]} [label={_quote(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
