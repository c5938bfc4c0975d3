import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from gsbd.errors import InputError, NumericalError
from gsbd.linalg import (
    eigh_symmetric,
    khatri_rao_columns,
    modified_gram_schmidt,
    norm_1_1,
    norm_1to2,
    orthogonality_defect,
    project_ones_complement,
    solve_linear,
    spectral_norm,
)

# products of tiny entries underflow, which is not what these properties test
finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False).filter(lambda v: v == 0 or abs(v) > 1e-100)


def sym(n, rng):
    B = rng.standard_normal((n, n))
    return B + B.T


def test_eigh_identity_is_canonical():
    w, V = eigh_symmetric(np.eye(3))
    assert np.array_equal(w, np.ones(3))
    assert np.array_equal(V, np.eye(3))


def test_eigh_two_node_path():
    w, V = eigh_symmetric(np.array([[0.0, 1.0], [1.0, 0.0]]))
    s = 1 / np.sqrt(2)
    assert np.allclose(w, [-1.0, 1.0], atol=1e-15)
    assert np.allclose(V[:, 0], [s, -s], atol=1e-15)
    assert np.allclose(V[:, 1], [s, s], atol=1e-15)


def test_eigh_random_5x5_reconstructs():
    S = sym(5, np.random.default_rng(1))
    w, V = eigh_symmetric(S)
    assert np.all(np.diff(w) >= 0)
    assert orthogonality_defect(V) <= 1e-10
    assert np.linalg.norm((V * w) @ V.T - S) <= 1e-8 * np.linalg.norm(S)


def test_eigh_matches_reference_spectrum():
    S = sym(8, np.random.default_rng(2))
    w, _ = eigh_symmetric(S)
    assert np.allclose(w, np.linalg.eigvalsh(S), atol=1e-10)


def test_eigh_sign_convention():
    _, V = eigh_symmetric(sym(6, np.random.default_rng(3)))
    idx = np.argmax(np.abs(V), axis=0)
    assert np.all(V[idx, np.arange(6)] > 0)


def test_eigh_rejects_bad_input():
    with pytest.raises(InputError):
        eigh_symmetric(np.ones((2, 3)))
    with pytest.raises(InputError):
        eigh_symmetric(np.array([[0.0, 1.0], [0.5, 0.0]]))
    with pytest.raises(InputError):
        eigh_symmetric(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_eigh_accepts_asymmetry_within_tol():
    S = np.array([[1.0, 2.0], [2.0 + 1e-12, 3.0]])
    w, V = eigh_symmetric(S)
    assert orthogonality_defect(V) < 1e-12


def test_eigh_is_deterministic():
    S = sym(7, np.random.default_rng(4))
    a = eigh_symmetric(S)
    b = eigh_symmetric(S)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12).flatmap(lambda n: arrays(np.float64, (n, n), elements=finite)))
def test_eigh_invariants_property(B):
    S = B + B.T
    w, V = eigh_symmetric(S)
    assert orthogonality_defect(V) <= 1e-10
    scale = max(np.linalg.norm(S), 1e-300)
    assert np.linalg.norm((V * w) @ V.T - S) <= 1e-8 * scale + 1e-300


def test_solve_identity_and_scaled_identity():
    B = np.arange(6.0).reshape(3, 2)
    assert np.array_equal(solve_linear(np.eye(3), B), B)
    assert np.allclose(solve_linear(2 * np.eye(4), np.eye(4)), 0.5 * np.eye(4))


def test_solve_random_residual():
    rng = np.random.default_rng(5)
    A = rng.standard_normal((6, 6)) + 6 * np.eye(6)
    B = rng.standard_normal((6, 3))
    X = solve_linear(A, B)
    assert np.linalg.norm(A @ X - B) < 1e-10 * np.linalg.norm(B)


def test_solve_vector_rhs_keeps_shape():
    x = solve_linear(np.array([[0.0, 2.0], [1.0, 0.0]]), np.array([4.0, 3.0]))
    assert x.shape == (2,)
    assert np.allclose(x, [3.0, 2.0])


def test_solve_singular_names_pivot():
    with pytest.raises(NumericalError, match="pivot 1"):
        solve_linear(np.array([[1.0, 2.0], [2.0, 4.0]]), np.eye(2))


def test_khatri_rao_examples():
    K = khatri_rao_columns(np.eye(2), np.eye(2))
    assert np.array_equal(K, np.array([[1, 0], [0, 0], [0, 0], [0, 1]], dtype=float))
    K = khatri_rao_columns(np.array([[1.0], [2.0]]), np.array([[3.0], [4.0]]))
    assert np.array_equal(K[:, 0], [3.0, 4.0, 6.0, 8.0])
    with pytest.raises(InputError):
        khatri_rao_columns(np.ones((2, 2)), np.ones((2, 3)))


def test_khatri_rao_matches_kron_per_column():
    rng = np.random.default_rng(6)
    A, B = rng.standard_normal((3, 2)), rng.standard_normal((4, 2))
    K = khatri_rao_columns(A, B)
    for k in range(2):
        assert np.allclose(K[:, k], np.kron(A[:, k], B[:, k]), rtol=0, atol=1e-15)


@settings(max_examples=50, deadline=None)
@given(
    st.integers(1, 5).flatmap(
        lambda n: st.tuples(
            arrays(np.float64, (3, n), elements=finite), arrays(np.float64, (4, n), elements=finite)
        )
    )
)
def test_khatri_rao_column_norms_property(pair):
    A, B = pair
    K = khatri_rao_columns(A, B)
    lhs = np.linalg.norm(K, axis=0)
    rhs = np.linalg.norm(A, axis=0) * np.linalg.norm(B, axis=0)
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-300)


def test_norms_zero_and_identity():
    Z = np.zeros((3, 3))
    assert norm_1_1(Z) == norm_1to2(Z) == spectral_norm(Z) == 0.0
    assert norm_1_1(np.eye(5)) == 5.0
    assert norm_1to2(np.eye(5)) == 1.0
    assert abs(spectral_norm(np.eye(5)) - 1.0) < 1e-12


def test_spectral_norm_matches_eigh():
    rng = np.random.default_rng(7)
    for _ in range(10):
        A = rng.standard_normal((4, 4))
        w, _ = eigh_symmetric(A.T @ A)
        assert abs(spectral_norm(A) - np.sqrt(w[-1])) < 1e-8


def test_spectral_norm_rectangular():
    A = np.array([[3.0, 0.0], [0.0, 0.0], [0.0, 4.0]])
    assert abs(spectral_norm(A) - 4.0) < 1e-10


def test_project_ones_complement_examples():
    assert np.allclose(project_ones_complement(np.ones(4)), 0.0)
    x = np.array([1.0, -2.0, 1.0])
    assert np.allclose(project_ones_complement(x), x)
    assert np.allclose(project_ones_complement(np.array([2.0, 0.0])), [1.0, -1.0])


@given(arrays(np.float64, st.integers(1, 30), elements=finite))
def test_project_ones_complement_property(x):
    p = project_ones_complement(x)
    assert abs(p.sum()) <= 1e-12 * max(np.linalg.norm(x), 1.0) * len(x)
    assert np.allclose(project_ones_complement(p), p, rtol=0, atol=1e-12 * max(np.linalg.norm(x), 1.0))


def test_modified_gram_schmidt_orthonormal():
    Q = modified_gram_schmidt(np.random.default_rng(8).standard_normal((9, 9)))
    assert orthogonality_defect(Q) < 1e-12
    with pytest.raises(NumericalError):
        modified_gram_schmidt(np.ones((3, 3)))
