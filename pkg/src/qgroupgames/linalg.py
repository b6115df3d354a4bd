"""Small dense complex linear algebra for game states and moves.

Everything here works at fixed, small dimension (n <= 16 or so). Two value
types carry the certified invariants the rest of the package relies on:
:class:`StateVector` (unit norm) and :class:`UnitaryMatrix` (unitary at
construction).  A unitary may additionally carry a *gate term*, a small
symbolic expression naming how it was built, and an exact permutation when it
is a permutation matrix.

Gate terms are nested tuples::

    ("I",)  ("T", i, j)  ("QFT",)  ("QFT_DAG",)  ("COMPOSE", (t1, t2, ...))

``COMPOSE`` lists factors in matrix-product order, so ``("COMPOSE", (a, b))``
is ``a @ b`` (``b`` acts first).  A term of ``None`` means "explicit matrix".
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

UNITARY_TOL = 1e-9
NORM_TOL = 1e-9
PHASE_TOL = 1e-9
PIVOT_TOL = 1e-8

Term = tuple


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


class StateVector:
    """A unit vector in C^n."""

    __slots__ = ("_amps",)

    def __init__(self, amps: Iterable[complex]):
        a = np.array(amps, dtype=np.complex128).ravel()
        if a.size == 0:
            raise ValueError("state vector must have positive dimension")
        norm = float(np.linalg.norm(a))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state vector is not normalized (norm={norm!r})")
        self._amps = _readonly(a)

    @classmethod
    def normalized(cls, amps: Iterable[complex]) -> StateVector:
        a = np.array(amps, dtype=np.complex128).ravel()
        norm = np.linalg.norm(a)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(a / norm)

    @property
    def n(self) -> int:
        return self._amps.shape[0]

    @property
    def amps(self) -> np.ndarray:
        return self._amps

    def basis_index(self, tol: float = PHASE_TOL) -> int | None:
        """Index k if this state equals |k> up to phase, else None."""
        k = int(np.argmax(np.abs(self._amps)))
        if abs(self._amps[k]) >= 1.0 - tol:
            return k
        return None

    def __repr__(self) -> str:
        return f"StateVector({np.array2string(self._amps, precision=4)})"


class UnitaryMatrix:
    """An n x n unitary, certified at construction.

    ``perm`` (when present) is the exact permutation with ``U|k> = |perm[k]>``.
    Matrices that are permutation matrices within tolerance are detected and
    snapped to exact 0/1 entries so classical paths stay exact.
    """

    __slots__ = ("_m", "_term", "_perm")

    def __init__(self, entries, *, term: Term | None = None,
                 perm: Sequence[int] | None = None, check: bool = True):
        m = np.array(entries, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        if perm is None:
            perm = _detect_perm(m)
            if perm is not None:
                m = _perm_matrix(perm)
        else:
            perm = tuple(int(p) for p in perm)
        if check and perm is None:
            err = np.abs(m.conj().T @ m - np.eye(m.shape[0])).max()
            if err > UNITARY_TOL:
                raise ValueError(f"matrix is not unitary (max |U^dag U - I| = {err:.3g})")
        self._m = _readonly(m)
        self._term = term
        self._perm = perm

    @classmethod
    def from_perm(cls, perm: Sequence[int], term: Term | None = None) -> UnitaryMatrix:
        perm = tuple(int(p) for p in perm)
        if sorted(perm) != list(range(len(perm))):
            raise ValueError(f"not a permutation: {perm}")
        return cls(_perm_matrix(perm), perm=perm,
                   term=term if term is not None else perm_term(perm))

    @property
    def n(self) -> int:
        return self._m.shape[0]

    @property
    def entries(self) -> np.ndarray:
        return self._m

    @property
    def term(self) -> Term | None:
        return self._term

    @property
    def perm(self) -> tuple[int, ...] | None:
        return self._perm

    @property
    def label(self) -> str:
        return term_label(self._term, self.n)

    def __repr__(self) -> str:
        return f"UnitaryMatrix<{self.n}x{self.n} {self.label}>"


def _perm_matrix(perm: Sequence[int]) -> np.ndarray:
    n = len(perm)
    m = np.zeros((n, n), dtype=np.complex128)
    m[list(perm), list(range(n))] = 1.0
    return m


def _detect_perm(m: np.ndarray, tol: float = UNITARY_TOL) -> tuple[int, ...] | None:
    a = np.abs(m)
    ones = np.abs(m - 1.0) <= tol
    zeros = a <= tol
    if not np.all(ones | zeros):
        return None
    if not (np.all(ones.sum(axis=0) == 1) and np.all(ones.sum(axis=1) == 1)):
        return None
    return tuple(int(i) for i in np.argmax(ones, axis=0))


# -- gate terms ---------------------------------------------------------------

def perm_term(perm: Sequence[int]) -> Term:
    """Express a permutation as a product of transposition terms."""
    swaps = []
    cur = list(range(len(perm)))  # cur[k]: image of k so far
    pos = {v: k for k, v in enumerate(cur)}
    # Left-multiplying by T_{a,b} swaps the images a and b; fix images one by one.
    for k in range(len(perm)):
        want = perm[k]
        have = cur[k]
        if have != want:
            swaps.append(("T", min(have, want), max(have, want)))
            j = pos[want]
            cur[k], cur[j] = want, have
            pos[want], pos[have] = k, j
    if not swaps:
        return ("I",)
    if len(swaps) == 1:
        return swaps[0]
    # swaps were applied first-to-last, so the product lists them last-to-first
    return ("COMPOSE", tuple(reversed(swaps)))


def compose_terms(a: Term | None, b: Term | None) -> Term | None:
    if a is None or b is None:
        return None
    factors = [f for t in (a, b) for f in _factors(t) if f != ("I",)]
    if not factors:
        return ("I",)
    if len(factors) == 1:
        return factors[0]
    return ("COMPOSE", tuple(factors))


def adjoint_term(t: Term | None) -> Term | None:
    if t is None:
        return None
    head = t[0]
    if head in ("I", "T"):
        return t
    if head == "QFT":
        return ("QFT_DAG",)
    if head == "QFT_DAG":
        return ("QFT",)
    if head == "COMPOSE":
        inv = [adjoint_term(f) for f in reversed(t[1])]
        if any(f is None for f in inv):
            return None
        return ("COMPOSE", tuple(inv))
    return None


def _factors(t: Term) -> tuple:
    return t[1] if t[0] == "COMPOSE" else (t,)


def term_label(t: Term | None, n: int) -> str:
    if t is None:
        return "U"
    head = t[0]
    if head == "I":
        return "I"
    if head == "T":
        return f"T_{{{t[1]},{t[2]}}}"
    if head == "QFT":
        return f"F{n}"
    if head == "QFT_DAG":
        return f"F{n}†"
    if head == "COMPOSE":
        return "".join(term_label(f, n) for f in t[1])
    raise ValueError(f"unknown gate term {t!r}")


# -- constructors ---------------------------------------------------------------

def basis_state(n: int, k: int) -> StateVector:
    if n < 1:
        raise ValueError("dimension must be positive")
    if not 0 <= k < n:
        raise IndexError(f"basis index {k} out of range for dimension {n}")
    a = np.zeros(n, dtype=np.complex128)
    a[k] = 1.0
    return StateVector(a)


def uniform_state(n: int) -> StateVector:
    return StateVector(np.full(n, 1.0 / np.sqrt(n), dtype=np.complex128))


class Basis:
    """The computational basis of C^n."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("dimension must be positive")
        self.n = n

    def __len__(self) -> int:
        return self.n

    def __iter__(self):
        return (basis_state(self.n, k) for k in range(self.n))


def identity(n: int) -> UnitaryMatrix:
    return UnitaryMatrix.from_perm(range(n), term=("I",))


def transposition(n: int, i: int, j: int) -> UnitaryMatrix:
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"transposition indices ({i}, {j}) out of range for n={n}")
    if i == j:
        raise ValueError("transposition requires i != j")
    perm = list(range(n))
    perm[i], perm[j] = j, i
    return UnitaryMatrix.from_perm(perm, term=("T", min(i, j), max(i, j)))


def qft(n: int) -> UnitaryMatrix:
    """Discrete Fourier transform F_n with entries exp(2 pi i jk/n)/sqrt(n)."""
    if n < 1:
        raise ValueError("dimension must be positive")
    jk = np.outer(np.arange(n), np.arange(n)) % n
    m = np.exp(2j * np.pi * jk / n) / np.sqrt(n)
    if n == 1:
        return identity(1)
    return UnitaryMatrix(m, term=("QFT",))


def qft_dagger(n: int) -> UnitaryMatrix:
    return adjoint(qft(n))


# -- operations -----------------------------------------------------------------

def apply(u: UnitaryMatrix, v: StateVector) -> StateVector:
    if u.n != v.n:
        raise ValueError(f"dimension mismatch: {u.n}x{u.n} matrix on {v.n}-vector")
    if u.perm is not None:
        out = np.empty_like(v.amps)
        out[list(u.perm)] = v.amps
        return StateVector(out)
    return StateVector(u.entries @ v.amps)


def compose(u: UnitaryMatrix, v: UnitaryMatrix) -> UnitaryMatrix:
    """The product ``u @ v``: apply ``v`` first, then ``u``."""
    if u.n != v.n:
        raise ValueError(f"dimension mismatch: {u.n} vs {v.n}")
    term = compose_terms(u.term, v.term)
    if u.perm is not None and v.perm is not None:
        perm = tuple(u.perm[k] for k in v.perm)
        return UnitaryMatrix(_perm_matrix(perm), perm=perm, term=term)
    return UnitaryMatrix(u.entries @ v.entries, term=term)


def compose_all(moves: Sequence[UnitaryMatrix]) -> UnitaryMatrix:
    """Product of ``moves`` listed in matrix-product order."""
    out = moves[0]
    for m in moves[1:]:
        out = compose(out, m)
    return out


def adjoint(u: UnitaryMatrix) -> UnitaryMatrix:
    if u.perm is not None:
        inv = [0] * u.n
        for k, p in enumerate(u.perm):
            inv[p] = k
        return UnitaryMatrix(_perm_matrix(inv), perm=inv, term=adjoint_term(u.term))
    return UnitaryMatrix(u.entries.conj().T, term=adjoint_term(u.term))


def matrices_close(u: UnitaryMatrix, v: UnitaryMatrix, tol: float = UNITARY_TOL) -> bool:
    if u.n != v.n:
        return False
    if u.perm is not None and v.perm is not None:
        return u.perm == v.perm
    return float(np.abs(u.entries - v.entries).max()) <= tol


def null_space(m, tol: float = PIVOT_TOL) -> list[StateVector]:
    """Orthonormal basis of ``{x : m x = 0}``.

    Gauss-Jordan elimination with full pivoting; pivots at or below ``tol``
    are treated as zero.  The free-variable basis is then orthonormalized and
    each vector's phase fixed so its first nonzero entry is real positive.
    """
    a = np.array(m, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError("null_space expects a 2-D matrix")
    rows, n = a.shape
    cols = np.arange(n)
    rank = 0
    for k in range(min(rows, n)):
        sub = np.abs(a[k:, k:])
        i, j = np.unravel_index(int(np.argmax(sub)), sub.shape)
        if sub[i, j] <= tol:
            break
        i += k
        j += k
        a[[k, i]] = a[[i, k]]
        a[:, [k, j]] = a[:, [j, k]]
        cols[[k, j]] = cols[[j, k]]
        a[k] /= a[k, k]
        others = np.arange(rows) != k
        a[others] -= np.outer(a[others, k], a[k])
        rank += 1
    free = n - rank
    if free == 0:
        return []
    x = np.zeros((n, free), dtype=np.complex128)
    x[:rank] = -a[:rank, rank:]
    x[rank:] = np.eye(free)
    basis = np.empty_like(x)
    basis[cols] = x
    q, _ = np.linalg.qr(basis)
    out = []
    for c in range(free):
        v = q[:, c]
        lead = v[np.flatnonzero(np.abs(v) > tol)[0]]
        out.append(StateVector(v * (abs(lead) / lead)))  # first nonzero entry real positive
    return out


def overlap(u: StateVector, v: StateVector) -> complex:
    if u.n != v.n:
        raise ValueError(f"dimension mismatch: {u.n} vs {v.n}")
    return complex(np.vdot(u.amps, v.amps))


def states_equal_up_to_phase(u: StateVector, v: StateVector, tol: float = PHASE_TOL) -> bool:
    return abs(overlap(u, v)) >= 1.0 - tol


def complete_unitary(source: int, target: StateVector) -> UnitaryMatrix:
    """Some unitary U with U|source> = target (Householder completion)."""
    n = target.n
    e = basis_state(n, source).amps
    t = target.amps
    # phase-align so the reflection maps e onto t exactly
    phase = t[source] / abs(t[source]) if abs(t[source]) > 1e-12 else 1.0
    w = e * phase - t
    norm = np.linalg.norm(w)
    if norm < 1e-14:
        u = np.eye(n, dtype=np.complex128) * phase
    else:
        w = w / norm
        h = np.eye(n, dtype=np.complex128) - 2.0 * np.outer(w, w.conj())
        u = h * phase
    return UnitaryMatrix(u)
