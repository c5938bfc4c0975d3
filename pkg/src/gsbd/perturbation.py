"""Eigenbasis perturbation models: Cayley rotations and sample covariance."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InputError
from .graph import EigenBasis
from .linalg import as_matrix, eigh_symmetric, solve_linear

XI_BRACKET = (0.0, 1e6)
BISECTION_MAX_ITERS = 200


@dataclass(frozen=True)
class PerturbationSpec:
    kind: str
    W: Optional[np.ndarray] = None
    xi: float = 0.0

    def __post_init__(self):
        if self.kind not in ("cayley", "covariance"):
            raise InputError(f"unknown perturbation kind {self.kind!r}")
        if self.kind == "cayley":
            if self.W is None:
                raise InputError("cayley perturbation needs W")
            if np.max(np.abs(self.W + self.W.T)) > 1e-12:
                raise InputError("W must be skew-symmetric")
            if abs(np.linalg.norm(self.W) - 1.0) > 1e-12:
                raise InputError("W must have unit Frobenius norm")
            if self.xi < 0:
                raise InputError("xi must be >= 0")


def random_unit_skew(n, rng):
    """Gaussian strictly-upper entries, antisymmetrised and Frobenius-normalised."""
    if n < 2:
        raise InputError(f"need n >= 2, got {n}")
    rng = np.random.default_rng(rng)
    B = np.triu(rng.standard_normal((n, n)), k=1)
    W = 0.5 * (B - B.T)
    return W / np.linalg.norm(W)


def cayley_transform(W, xi):
    """``(I + xi W)^{-1} (I - xi W)``."""
    n = W.shape[0]
    eye = np.eye(n)
    return solve_linear(eye + xi * W, eye - xi * W)


def cayley_perturb(V, W, xi):
    if xi < 0:
        raise InputError(f"xi must be >= 0, got {xi}")
    V = as_matrix(V, "V")
    if xi == 0:
        return V.copy()
    return cayley_transform(W, xi) @ V


def skew_frequencies(W):
    """Squared magnitudes ``mu_k^2`` of the (imaginary) eigenvalues of ``W``."""
    mu2, _ = eigh_symmetric(W.T @ W)
    return np.clip(mu2, 0.0, None)


def predicted_delta_norm(W, xi, mu2=None):
    """Closed-form ``||V - C(W, xi) V||_F`` for orthonormal ``V``."""
    if xi < 0:
        raise InputError(f"xi must be >= 0, got {xi}")
    if xi == 0:
        return 0.0
    if mu2 is None:
        mu2 = skew_frequencies(W)
    xi2 = xi * xi
    # 4 mu^2 / (1/xi^2 + mu^2) rewritten to stay finite as xi grows
    return float(np.sqrt(np.sum(4.0 * mu2 * xi2 / (1.0 + mu2 * xi2))))


def xi_for_target_delta(W, target_delta, tol=1e-10):
    """Bisection for the Cayley parameter that yields ``||Delta||_F = target``."""
    if target_delta < 0:
        raise InputError(f"target must be >= 0, got {target_delta}")
    if target_delta == 0:
        return 0.0
    mu2 = skew_frequencies(W)
    lo, hi = XI_BRACKET
    if predicted_delta_norm(W, hi, mu2) < target_delta - tol:
        sup = 2.0 * np.sqrt(np.count_nonzero(mu2 > 1e-14))
        raise InputError(f"target {target_delta} exceeds achievable norm (supremum {sup:.6g})")
    mid = hi
    for _ in range(BISECTION_MAX_ITERS):
        mid = 0.5 * (lo + hi)
        val = predicted_delta_norm(W, mid, mu2)
        if abs(val - target_delta) <= tol:
            break
        if val < target_delta:
            lo = mid
        else:
            hi = mid
    return mid


def covariance_eigenbasis(Y):
    """Eigenvectors of ``Y Y^T / (P - 1)``, ordered by descending eigenvalue."""
    Y = as_matrix(Y, "Y")
    P = Y.shape[1]
    if P < 2:
        raise InputError(f"need at least 2 samples, got {P}")
    C = Y @ Y.T / (P - 1)
    w, V = eigh_symmetric(0.5 * (C + C.T))
    order = np.argsort(-w, kind="stable")
    return EigenBasis(w[order], V[:, order])
