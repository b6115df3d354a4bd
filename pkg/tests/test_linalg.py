import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from helpers import dft_matrix, haar_unitary, random_state
from qgroupgames.linalg import (
    Basis,
    StateVector,
    UnitaryMatrix,
    adjoint,
    apply,
    basis_state,
    complete_unitary,
    compose,
    compose_all,
    identity,
    matrices_close,
    null_space,
    overlap,
    perm_term,
    qft,
    qft_dagger,
    states_equal_up_to_phase,
    term_label,
    transposition,
    uniform_state,
)

seeds = st.integers(0, 2**32 - 1)


def test_state_vector_rejects_unnormalized():
    with pytest.raises(ValueError, match="not normalized"):
        StateVector([1.0, 1.0])
    with pytest.raises(ValueError):
        StateVector([])


def test_state_vector_is_read_only():
    v = basis_state(3, 1)
    with pytest.raises(ValueError):
        v.amps[0] = 1.0


def test_normalized_constructor():
    v = StateVector.normalized([3, 4j])
    assert np.allclose(v.amps, [0.6, 0.8j])
    with pytest.raises(ValueError):
        StateVector.normalized([0, 0])


def test_basis():
    states = list(Basis(4))
    assert len(states) == 4
    assert [s.basis_index() for s in states] == [0, 1, 2, 3]
    assert uniform_state(4).basis_index() is None
    with pytest.raises(IndexError):
        basis_state(3, 3)


def test_unitary_check():
    with pytest.raises(ValueError, match="not unitary"):
        UnitaryMatrix([[1, 1], [0, 1]])
    with pytest.raises(ValueError, match="square"):
        UnitaryMatrix([[1, 0, 0], [0, 1, 0]])
    UnitaryMatrix(np.array([[1, 1], [1, -1]]) / np.sqrt(2))


def test_permutation_detection_snaps_entries():
    m = np.array([[0, 1 + 1e-12], [1, 0]])
    u = UnitaryMatrix(m)
    assert u.perm == (1, 0)
    assert u.entries[0, 1] == 1.0


def test_from_perm_convention():
    u = UnitaryMatrix.from_perm((2, 0, 1))
    # U|k> = |perm[k]>
    assert apply(u, basis_state(3, 0)).basis_index() == 2
    assert apply(u, basis_state(3, 1)).basis_index() == 0
    with pytest.raises(ValueError):
        UnitaryMatrix.from_perm((0, 0, 1))


def test_transposition_swaps():
    t = transposition(7, 0, 6)
    assert apply(t, basis_state(7, 0)).basis_index() == 6
    assert apply(t, basis_state(7, 6)).basis_index() == 0
    assert apply(t, basis_state(7, 3)).basis_index() == 3
    assert t.label == "T_{0,6}"
    assert transposition(7, 6, 0).label == "T_{0,6}"


def test_transposition_errors():
    with pytest.raises(ValueError):
        transposition(3, 1, 1)
    with pytest.raises(IndexError):
        transposition(3, 0, 3)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 7, 8])
def test_qft_matches_definition(n):
    assert np.allclose(qft(n).entries, dft_matrix(n), atol=1e-12)
    err = np.abs(qft(n).entries.conj().T @ qft(n).entries - np.eye(n)).max()
    assert err <= 1e-12


def test_qft7_on_zero_is_uniform():
    # F7|0> = (1/sqrt 7) sum |i>
    psi = apply(qft(7), basis_state(7, 0))
    assert np.allclose(psi.amps, np.full(7, 1 / np.sqrt(7)), atol=1e-12)


def test_qft_one_is_identity():
    assert qft(1).perm == (0,)


def test_qft_dagger_inverts():
    assert np.allclose(qft_dagger(5).entries @ qft(5).entries, np.eye(5), atol=1e-12)
    assert qft_dagger(7).label == "F7†"


def test_compose_order_and_label():
    t, f = transposition(7, 0, 6), qft(7)
    c = compose(t, adjoint(f))
    assert c.label == "T_{0,6}F7†"
    assert np.allclose(c.entries, t.entries @ f.entries.conj().T)
    # F7 then T06 F7^dagger sends |0> to |6>
    out = apply(c, apply(f, basis_state(7, 0)))
    assert abs(out.amps[6]) ** 2 >= 1 - 1e-12


def test_compose_all_and_identity_dropped():
    t = transposition(4, 1, 2)
    c = compose_all([identity(4), t, identity(4)])
    assert c.label == "T_{1,2}"
    assert compose(identity(3), identity(3)).label == "I"


def test_symbolic_permutation_product_matches_matrices(rng):
    for _ in range(50):
        p, q = rng.permutation(5), rng.permutation(5)
        a, b = UnitaryMatrix.from_perm(p), UnitaryMatrix.from_perm(q)
        c = compose(a, b)
        assert c.perm is not None
        assert np.array_equal(c.entries, a.entries @ b.entries)


def test_perm_term_rebuilds_permutation(rng):
    from qgroupgames.linalg import _factors
    for _ in range(50):
        p = tuple(int(x) for x in rng.permutation(6))
        term = perm_term(p)
        m = np.eye(6)
        for f in _factors(term):
            if f[0] == "T":
                m = m @ transposition(6, f[1], f[2]).entries.real
        assert np.array_equal(m, UnitaryMatrix.from_perm(p).entries.real)


def test_adjoint_label_and_matrix():
    u = compose(qft(3), transposition(3, 0, 1))
    a = adjoint(u)
    assert a.label == "T_{0,1}F3†"
    assert np.allclose(a.entries, u.entries.conj().T)


def test_explicit_matrix_label():
    u = UnitaryMatrix(np.diag([1, 1j]))
    assert u.label == "U" and u.term is None
    assert term_label(None, 2) == "U"


def test_matrices_close():
    assert matrices_close(qft(4), qft(4))
    assert not matrices_close(qft(4), qft_dagger(4))
    assert not matrices_close(identity(3), identity(4))


def test_apply_dimension_mismatch():
    with pytest.raises(ValueError):
        apply(identity(3), basis_state(4, 0))


def test_phase_equality():
    v = uniform_state(3)
    w = StateVector(v.amps * np.exp(0.7j))
    assert states_equal_up_to_phase(v, w)
    assert not states_equal_up_to_phase(v, basis_state(3, 0))
    assert abs(overlap(v, w)) == pytest.approx(1.0)


def _span_projector(vectors):
    if not vectors:
        return None
    q = np.column_stack(vectors)
    return q @ q.conj().T


@settings(max_examples=200, deadline=None)
@given(seeds, st.integers(1, 6), st.integers(1, 6))
def test_null_space_matches_svd_oracle(seed, n, rank):
    rng = np.random.default_rng(seed)
    rank = min(rank, n)
    rows = rng.integers(rank, rank + 4)
    left = rng.standard_normal((rows, rank)) + 1j * rng.standard_normal((rows, rank))
    right = rng.standard_normal((rank, n)) + 1j * rng.standard_normal((rank, n))
    m = left @ right
    ours = null_space(m)
    ref = scipy.linalg.null_space(m)
    assert len(ours) == ref.shape[1]
    if ours:
        got = _span_projector([v.amps for v in ours])
        want = ref @ ref.conj().T
        assert np.allclose(got, want, atol=1e-7)
        for v in ours:
            assert np.linalg.norm(m @ v.amps) <= 1e-7 * max(1.0, np.abs(m).max())


def test_null_space_orthonormal_and_phase_fixed():
    m = np.array([[1, -1, 0, 0], [0, 0, 1, -1]], dtype=complex)
    basis = null_space(m)
    g = np.array([[np.vdot(a.amps, b.amps) for b in basis] for a in basis])
    assert np.allclose(g, np.eye(2))
    for v in basis:
        lead = v.amps[np.flatnonzero(np.abs(v.amps) > 1e-9)[0]]
        assert abs(lead.imag) < 1e-12 and lead.real > 0


def test_null_space_full_rank_is_empty():
    assert null_space(np.eye(3)) == []


@settings(max_examples=200, deadline=None)
@given(seeds, st.integers(1, 7))
def test_complete_unitary_hits_target(seed, n):
    rng = np.random.default_rng(seed)
    target = StateVector(random_state(n, rng))
    src = int(rng.integers(n))
    u = complete_unitary(src, target)
    assert states_equal_up_to_phase(apply(u, basis_state(n, src)), target)


@settings(max_examples=1000, deadline=None)
@given(seeds, st.integers(1, 8))
def test_unitarity_preservation(seed, n):
    rng = np.random.default_rng(seed)
    u = UnitaryMatrix(haar_unitary(n, rng))
    v = StateVector(random_state(n, rng))
    w = apply(u, v)
    assert abs(np.linalg.norm(w.amps) - 1) <= 1e-9
    # products of unitaries stay unitary
    c = compose(u, adjoint(u))
    assert np.allclose(c.entries, np.eye(n), atol=1e-9)


@settings(max_examples=1000, deadline=None)
@given(seeds, st.integers(1, 8))
def test_distribution_normalization(seed, n):
    rng = np.random.default_rng(seed)
    v = StateVector(random_state(n, rng))
    for _ in range(3):
        v = apply(UnitaryMatrix(haar_unitary(n, rng)), v)
    p = np.abs(v.amps) ** 2
    assert abs(p.sum() - 1) <= 1e-9
    assert np.all(p >= 0)
