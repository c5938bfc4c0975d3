"""Robust blind deconvolution with eigenbasis denoising.

Alternates an exact solve for the inverse frequency response on the current
basis with a single Cayley-retracted Riemannian gradient step on the basis,
for the objective ``f(g, V) + rho/2 ||V - V_p||_F^2`` on orthogonal ``V``.
"""

import time
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .bdog import BdogConfig, _huber_sum, default_epsilon, huber_deriv, solve_bdog
from .errors import InputError, NumericalError
from .linalg import as_matrix, modified_gram_schmidt, norm_1_1, orthogonality_defect, solve_linear


@dataclass(frozen=True)
class RbdogsConfig:
    rho: Optional[float] = None  # None -> ||Y||_{1,1} / N^2
    epsilon: Optional[float] = None  # None -> 1e-3 * mean |Y|
    delta_stop: float = 1e-6
    max_outer: int = 200
    inner: BdogConfig = field(default_factory=BdogConfig)
    armijo_c: float = 1e-4
    armijo_shrink: float = 0.5
    min_step: float = 1e-12
    ortho_refresh_tol: float = 1e-9

    def __post_init__(self):
        for name in ("delta_stop", "max_outer", "armijo_c", "armijo_shrink", "min_step", "ortho_refresh_tol"):
            if getattr(self, name) <= 0:
                raise InputError(f"{name} must be > 0")
        if self.rho is not None and self.rho <= 0:
            raise InputError("rho must be > 0")
        if self.epsilon is not None and self.epsilon <= 0:
            raise InputError("epsilon must be > 0")
        if not (self.armijo_c < 1 and self.armijo_shrink < 1):
            raise InputError("Armijo parameters must lie in (0, 1)")


@dataclass(frozen=True)
class RbdogsReport:
    g_hat: np.ndarray
    V_hat: np.ndarray
    X_hat: np.ndarray
    F_trace: list = field(repr=False)
    outer_iterations: int
    converged: bool
    wall_time: float
    max_ortho_defect: float = 0.0
    inner_iterations: int = 0


def default_rho(Y):
    Y = np.asarray(Y)
    return norm_1_1(Y) / Y.shape[0] ** 2


def full_objective(g, V, V_p, Y, epsilon, rho):
    Z = (V * g) @ (V.T @ Y)
    return _huber_sum(Z, epsilon) + 0.5 * rho * float(np.sum((V - V_p) ** 2))


def euclidean_grad_V(g, V, V_p, Y, epsilon, rho):
    """``(D Y^T + Y D^T) V diag(g) + rho (V - V_p)``."""
    Z = (V * g) @ (V.T @ Y)
    D = huber_deriv(Z, epsilon)
    return ((D @ Y.T + Y @ D.T) @ V) * g + rho * (V - V_p)


def riemannian_direction(V, G):
    """Skew generator ``G V^T - V G^T`` of the Cayley descent curve."""
    return G @ V.T - V @ G.T


def cayley_step(V, G, beta, M=None):
    """``(I + beta/2 M)^{-1} (I - beta/2 M) V`` with ``M = G V^T - V G^T``."""
    if beta <= 0:
        raise InputError(f"step size must be > 0, got {beta}")
    if M is None:
        M = riemannian_direction(V, G)
    eye = np.eye(V.shape[0])
    half = 0.5 * beta * M
    return solve_linear(eye + half, (eye - half) @ V)


def rbdogs(Y, V_p, cfg=None):
    """Joint inverse-filter estimation and eigenbasis denoising.

    Args:
        Y: N x P observations.
        V_p: perturbed N x N orthonormal eigenbasis; also the starting point.
        cfg: RbdogsConfig.  ``rho`` and ``epsilon`` default to data-scaled
            values when left as None.

    Returns:
        RbdogsReport with the final estimate, denoised basis and the
        sequence of full-objective values after each outer iteration.
    """
    t0 = time.perf_counter()
    cfg = cfg or RbdogsConfig()
    Y = as_matrix(Y, "Y")
    V_p = as_matrix(V_p, "V_p")
    N = V_p.shape[0]
    if Y.shape[0] != N:
        raise InputError(f"Y has {Y.shape[0]} rows, V_p is {V_p.shape}")
    if orthogonality_defect(V_p) > 1e-6:
        raise InputError("V_p is not orthonormal")
    eps = cfg.epsilon if cfg.epsilon is not None else default_epsilon(Y)
    if eps <= 0:
        eps = 1.0
    rho = cfg.rho if cfg.rho is not None else default_rho(Y)
    if rho <= 0:
        rho = 1.0
    inner = replace(cfg.inner, epsilon=eps)

    V = V_p.copy()
    g = np.ones(N)
    F_trace = []
    max_defect = orthogonality_defect(V)
    inner_total = 0
    converged = False
    t = 0
    while t < cfg.max_outer:
        try:
            rep = solve_bdog(Y, V, inner, g_init=g)
        except (InputError, NumericalError) as exc:
            raise NumericalError(f"inner solve failed at outer iteration {t}: {exc}") from exc
        inner_total += rep.iterations
        g_new = rep.g_hat

        F_cur = full_objective(g_new, V, V_p, Y, eps, rho)
        G = euclidean_grad_V(g_new, V, V_p, Y, eps, rho)
        M = riemannian_direction(V, G)
        m2 = float(np.sum(M * M))
        beta = 1.0 / (1.0 + np.linalg.norm(G))
        V_new, F_new = V, F_cur
        while m2 > 0 and beta >= cfg.min_step:
            cand = cayley_step(V, G, beta, M)
            F_cand = full_objective(g_new, cand, V_p, Y, eps, rho)
            if F_cand <= F_cur - cfg.armijo_c * beta * 0.5 * m2:
                V_new, F_new = cand, F_cand
                break
            beta *= cfg.armijo_shrink

        if orthogonality_defect(V_new) > cfg.ortho_refresh_tol:
            V_new = modified_gram_schmidt(V_new)
            F_new = full_objective(g_new, V_new, V_p, Y, eps, rho)
        max_defect = max(max_defect, orthogonality_defect(V_new))

        dg = np.linalg.norm(g_new - g)
        dV = np.linalg.norm(V_new - V)
        g, V = g_new, V_new
        F_trace.append(F_new)
        t += 1
        if dg <= cfg.delta_stop and dV <= cfg.delta_stop:
            converged = True
            break

    X_hat = (V * g) @ (V.T @ Y)
    return RbdogsReport(
        g_hat=g,
        V_hat=V,
        X_hat=X_hat,
        F_trace=F_trace,
        outer_iterations=t,
        converged=converged,
        wall_time=time.perf_counter() - t0,
        max_ortho_defect=max_defect,
        inner_iterations=inner_total,
    )
