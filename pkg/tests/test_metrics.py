import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gsbd.errors import InputError
from gsbd.graph import random_orthonormal
from gsbd.metrics import UndefinedMetricError, acc_x, node_domain_operators, re_g, re_operator


def test_re_g_examples():
    g0 = np.array([1.0, 2.0, -2.0])
    assert re_g(g0, g0) == 0.0
    assert re_g(2 * g0, g0) == pytest.approx(1.0)
    # ||(0.5, 0, 2)|| / 3
    assert re_g(np.array([1.5, 2.0, 0.0]), g0) == pytest.approx(np.sqrt(4.25) / 3.0)
    with pytest.raises(UndefinedMetricError):
        re_g(g0, np.zeros(3))
    with pytest.raises(InputError):
        re_g(g0, np.ones(2))


def test_acc_x_examples():
    X0 = np.array([[1.0, 0.0, -0.5], [0.0, 2.0, 0.05]])
    assert acc_x(X0, X0) == 1.0
    assert acc_x(np.zeros_like(X0), X0) == 0.0
    # true support is three entries, the estimate hits two of them
    assert acc_x(np.array([[0.3, 0.0, 0.0], [0.0, -0.2, 0.0]]), X0) == pytest.approx(2 / 3)
    two = np.zeros((2, 4))
    two[0, :2] = 1.0
    est = np.zeros((2, 4))
    est[0, 0] = est[1, 3] = 1.0
    assert acc_x(est, two) == 0.5
    with pytest.raises(UndefinedMetricError):
        acc_x(X0, np.full_like(X0, 0.05))
    with pytest.raises(InputError):
        acc_x(X0, np.ones((3, 2)))


def test_acc_x_threshold_is_strict():
    X0 = np.array([[0.1, 0.2]])
    assert acc_x(X0, X0) == 1.0
    assert acc_x(np.array([[0.1, 0.1]]), X0) == 0.0


def test_re_operator_examples():
    A = np.arange(1.0, 7.0).reshape(2, 3)
    assert re_operator(A, A) == 0.0
    assert re_operator(np.zeros_like(A), A) == 1.0
    with pytest.raises(UndefinedMetricError):
        re_operator(A, np.zeros_like(A))


def test_inverse_response_clipped():
    V = np.eye(2)
    _, H = node_domain_operators(V, np.array([0.0, -2.0]))
    assert H[0, 0] == 1e8 and H[1, 1] == -0.5


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 10), st.integers(0, 2**32 - 1))
def test_signed_permutation_invariance(n, seed):
    rng = np.random.default_rng(seed)
    V = random_orthonormal(n, rng)
    g = rng.uniform(0.2, 2.0, n) * rng.choice([-1.0, 1.0], n)
    perm = rng.permutation(n)
    signs = rng.choice([-1.0, 1.0], n)
    G, H = node_domain_operators(V, g)
    G2, H2 = node_domain_operators(V[:, perm] * signs, g[perm])
    truth_G = G + 0.1 * rng.standard_normal((n, n))
    truth_H = H + 0.1 * rng.standard_normal((n, n))
    assert abs(re_operator(G2, truth_G) - re_operator(G, truth_G)) <= 1e-12
    assert abs(re_operator(H2, truth_H) - re_operator(H, truth_H)) <= 1e-12
