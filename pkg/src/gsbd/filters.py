"""Polynomial graph filters, Bernoulli-Gaussian sources and observations."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InputError, RejectedSample
from .graph import EigenBasis, vandermonde
from .linalg import project_ones_complement

DEFAULT_MIN_ABS = 1e-3


@dataclass(frozen=True)
class GraphFilter:
    basis: EigenBasis
    freq_response: np.ndarray
    taps: Optional[np.ndarray] = None

    @property
    def matrix(self):
        V = self.basis.V
        return (V * self.freq_response) @ V.T


@dataclass(frozen=True)
class SparseSignal:
    X: np.ndarray
    support: np.ndarray
    theta: float


def filter_from_taps(basis, h):
    h = np.asarray(h, dtype=np.float64)
    L = len(h)
    if not 1 <= L <= basis.n:
        raise InputError(f"need 1 <= L <= N, got L={L}, N={basis.n}")
    return GraphFilter(basis, vandermonde(basis.eigenvalues, L) @ h, h.copy())


def filter_from_freq(basis, freq_response):
    h = np.asarray(freq_response, dtype=np.float64)
    if h.shape != (basis.n,):
        raise InputError(f"frequency response must have length {basis.n}, got {h.shape}")
    return GraphFilter(basis, h.copy())


def inverse_filter(f, min_abs=DEFAULT_MIN_ABS):
    """Filter with the entrywise reciprocal frequency response."""
    h = f.freq_response
    bad = np.flatnonzero(np.abs(h) < min_abs)
    if bad.size:
        i = int(bad[0])
        raise InputError(f"filter not invertible: |h[{i}]| = {abs(h[i]):.3e} < {min_abs:g}")
    return GraphFilter(f.basis, 1.0 / h)


def controlled_inverse_response(n, alpha, rng, min_abs=DEFAULT_MIN_ABS, max_attempts=100):
    """Inverse response ``1 + alpha * P b / ||P b||`` with ``b`` standard normal.

    ``||P_1^perp g|| = alpha`` by construction.  Returns ``(g0, h0)`` with
    ``h0 = 1 / g0``.
    """
    if alpha < 0:
        raise InputError(f"alpha must be >= 0, got {alpha}")
    rng = np.random.default_rng(rng)
    ones = np.ones(n)
    if alpha == 0:
        return ones, ones.copy()
    for _ in range(max_attempts):
        pb = project_ones_complement(rng.standard_normal(n))
        g0 = ones + alpha * pb / np.linalg.norm(pb)
        if np.min(np.abs(g0)) >= min_abs:
            return g0, 1.0 / g0
    raise RejectedSample(f"no invertible draw in {max_attempts} attempts (alpha={alpha})")


def perturbed_identity_taps(basis, L, rng, min_abs=DEFAULT_MIN_ABS, max_attempts=100):
    """Filter with taps ``e_1 + h'`` where ``h'`` is a unit-norm Gaussian draw."""
    rng = np.random.default_rng(rng)
    for _ in range(max_attempts):
        hp = rng.standard_normal(L)
        hp /= np.linalg.norm(hp)
        h = hp.copy()
        h[0] += 1.0
        f = filter_from_taps(basis, h)
        if np.min(np.abs(f.freq_response)) >= min_abs:
            return f
    raise RejectedSample(f"no invertible tap draw in {max_attempts} attempts")


def sample_bernoulli_gaussian(n, p, theta, rng):
    """``X = Omega * gamma / sqrt(theta)`` with Bernoulli(theta) support."""
    if not 0.0 < theta < 1.0:
        raise InputError(f"theta must lie in (0, 1), got {theta}")
    rng = np.random.default_rng(rng)
    omega = (rng.random((n, p)) < theta).astype(np.float64)
    gamma = rng.standard_normal((n, p))
    return SparseSignal(omega * gamma / np.sqrt(theta), omega, theta)


def synthesize_observations(f, x):
    X = x.X if isinstance(x, SparseSignal) else np.asarray(x, dtype=np.float64)
    if X.shape[0] != f.basis.n:
        raise InputError(f"signal has {X.shape[0]} rows, filter acts on {f.basis.n} nodes")
    return f.matrix @ X
