import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gsbd.errors import InputError, RejectedSample
from gsbd.graph import (
    Graph,
    eigenbasis,
    generate_erdos_renyi,
    normalized_adjacency_gso,
    random_orthonormal,
    read_edge_list,
    sample_graph_basis,
    u_tilde,
    vandermonde,
    write_edge_list,
)
from gsbd.linalg import orthogonality_defect, spectral_norm


def test_empty_graph_always_rejected():
    for seed in range(5):
        with pytest.raises(RejectedSample):
            generate_erdos_renyi(6, 0.0, seed)


def test_complete_graph():
    g = generate_erdos_renyi(7, 1.0, 0)
    assert np.all(g.degrees == 6)
    assert len(g.edges()) == 21


def test_generation_is_deterministic():
    a = generate_erdos_renyi(20, 0.4, 123)
    b = generate_erdos_renyi(20, 0.4, 123)
    assert np.array_equal(a.adjacency, b.adjacency)
    c = generate_erdos_renyi(20, 0.4, 124)
    assert not np.array_equal(a.adjacency, c.adjacency)


def test_generator_rejects_bad_parameters():
    with pytest.raises(InputError):
        generate_erdos_renyi(1, 0.5, 0)
    with pytest.raises(InputError):
        generate_erdos_renyi(5, 1.5, 0)


def test_graph_validation():
    with pytest.raises(InputError):
        Graph(2, np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(InputError):
        Graph(2, np.eye(2))
    with pytest.raises(InputError):
        Graph(3, np.zeros((2, 2)))


def test_edge_density_is_plausible():
    counts = [len(generate_erdos_renyi(20, 0.4, s).edges()) for s in range(200, 260)]
    # 190 possible edges, expected 76
    assert 70 < np.mean(counts) < 82


def test_gso_two_nodes():
    S = normalized_adjacency_gso(Graph(2, np.array([[0.0, 1.0], [1.0, 0.0]])))
    assert np.array_equal(S, [[0.0, 1.0], [1.0, 0.0]])


def test_gso_complete_graph_spectrum():
    n = 6
    S = normalized_adjacency_gso(generate_erdos_renyi(n, 1.0, 0))
    w = eigenbasis(S).eigenvalues
    assert np.allclose(w[:-1], -1.0 / (n - 1), atol=1e-12)
    assert abs(w[-1] - 1.0) < 1e-12


def test_gso_rejects_isolated_node():
    A = np.zeros((3, 3))
    A[0, 1] = A[1, 0] = 1
    with pytest.raises(InputError):
        normalized_adjacency_gso(Graph(3, A))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_accepted_graphs_have_bounded_spectrum(seed):
    g, S, basis = sample_graph_basis(20, 0.4, np.random.default_rng(seed))
    assert g.is_connected()
    assert np.array_equal(S, S.T)
    assert np.all(np.abs(basis.eigenvalues) <= 1 + 1e-10)
    assert spectral_norm(S) <= 1 + 1e-10
    assert np.min(np.diff(basis.eigenvalues)) > 1e-8
    assert orthogonality_defect(basis.V) <= 1e-10


def test_sample_graph_basis_gives_up():
    with pytest.raises(RejectedSample):
        sample_graph_basis(10, 0.0, np.random.default_rng(0), max_attempts=5)


def test_vandermonde_examples():
    assert np.array_equal(vandermonde([0.3, -0.2, 0.9], 1), np.ones((3, 1)))
    assert np.array_equal(vandermonde([0.0, 1.0], 2), [[1.0, 0.0], [1.0, 1.0]])
    with pytest.raises(InputError):
        vandermonde([1.0], 0)


def test_vandermonde_evaluates_polynomial():
    rng = np.random.default_rng(9)
    lam, h = rng.uniform(-1, 1, 7), rng.standard_normal(3)
    direct = np.array([h[0] + h[1] * x + h[2] * x * x for x in lam])
    assert np.allclose(vandermonde(lam, 3) @ h, direct, rtol=0, atol=1e-12)


def test_u_tilde_of_identity():
    n = 5
    U = u_tilde(np.eye(n))
    assert np.allclose(U, np.eye(n) - np.ones((n, n)) / n, atol=1e-15)
    assert abs(spectral_norm(U) - 1.0) < 1e-10


def test_u_tilde_rejects_non_orthonormal():
    with pytest.raises(InputError):
        u_tilde(2 * np.eye(3))


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 12), st.integers(0, 2**32 - 1))
def test_u_tilde_annihilates_ones_and_is_contractive(n, seed):
    V = random_orthonormal(n, np.random.default_rng(seed))
    U = u_tilde(V)
    assert np.allclose(U @ np.ones(n), 0.0, atol=1e-12)
    assert spectral_norm(U) <= 1 + 1e-10


def test_edge_list_roundtrip(tmp_path):
    g = sample_graph_basis(12, 0.3, np.random.default_rng(5))[0]
    path = tmp_path / "g.txt"
    write_edge_list(g, path)
    h = read_edge_list(path)
    assert h.n_nodes == 12
    assert np.array_equal(g.adjacency, h.adjacency)


def test_edge_list_bad_header(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("0 1\n")
    with pytest.raises(InputError):
        read_edge_list(path)
