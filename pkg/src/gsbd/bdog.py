"""Convex blind deconvolution on a fixed eigenbasis.

Minimises the Huber-smoothed entrywise l1 norm of ``V diag(g) V^T Y`` over
the affine set ``1^T g = N``.  The default direction is a Newton step on the
entries inside the Huber knee, constrained to ``1^T d = 0``; plain projected
gradient with Barzilai-Borwein steps is the fallback and can be selected
outright.  The iterate map ``g -> V diag(g) V^T Y`` is linear, so every line-search trial reuses
the image of the search direction instead of recomputing products.
"""

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InputError
from .linalg import as_matrix, norm_1_1, orthogonality_defect


@dataclass(frozen=True)
class BdogConfig:
    epsilon: Optional[float] = None  # None -> 1e-3 * mean |Y|
    max_iters: int = 5000
    grad_tol: float = 1e-8
    armijo_c: float = 1e-4
    armijo_shrink: float = 0.5
    direction: str = "newton"  # or "gradient": plain projected gradient with BB steps

    def __post_init__(self):
        if self.direction not in ("gradient", "newton"):
            raise InputError(f"unknown direction {self.direction!r}")
        if self.epsilon is not None and self.epsilon <= 0:
            raise InputError("epsilon must be > 0")
        if self.max_iters < 1 or self.grad_tol <= 0:
            raise InputError("max_iters and grad_tol must be positive")
        if not (0 < self.armijo_c < 1 and 0 < self.armijo_shrink < 1):
            raise InputError("Armijo parameters must lie in (0, 1)")


@dataclass(frozen=True)
class SolveReport:
    g_hat: np.ndarray
    objective_trace: list = field(repr=False)
    iterations: int
    converged: bool
    wall_time: float


def default_epsilon(Y):
    Y = np.asarray(Y)
    return 1e-3 * norm_1_1(Y) / Y.size


def huber(x, epsilon):
    """Huber function with knee ``epsilon``; works elementwise on arrays."""
    ax = np.abs(x)
    return np.where(ax < epsilon, 0.5 * x * x / epsilon, ax - 0.5 * epsilon)


def huber_deriv(x, epsilon):
    return np.clip(np.asarray(x, dtype=np.float64) / epsilon, -1.0, 1.0)


def _huber_sum(Z, epsilon):
    a = np.abs(Z)
    m = np.minimum(a, epsilon)
    return float(np.sum(m * (a - 0.5 * m))) / epsilon


def smoothed_objective(g, V, Y, epsilon):
    Z = (V * g) @ (V.T @ Y)
    return _huber_sum(Z, epsilon)


def objective_grad_g(g, V, Y, epsilon):
    """Gradient ``[V^T D Y^T V]_kk`` with ``D = huber'(V diag(g) V^T Y)``."""
    A = V.T @ Y
    Z = (V * g) @ A
    D = huber_deriv(Z, epsilon)
    return np.einsum("ik,ik->k", V, D @ A.T)


def _center(v):
    return v - v.mean()


def _newton_direction(T, Z, grad, eps):
    """Minimiser of the local quadratic model on ``1^T d = 0``, or None.

    The Hessian only sees entries inside the Huber knee; a small ridge keeps
    it invertible when few entries are there.
    """
    q = np.abs(Z.ravel()) < eps
    if not q.any():
        return None
    Tq = T[q]
    H = Tq.T @ Tq / eps
    n = H.shape[0]
    H[np.diag_indices(n)] += 1e-8 * np.trace(H) / n + 1e-300
    try:
        sol = np.linalg.solve(H, np.column_stack([grad, np.ones(n)]))
    except np.linalg.LinAlgError:
        return None
    hg, h1 = sol[:, 0], sol[:, 1]
    lam = hg.sum() / h1.sum()
    d = -(hg - lam * h1)
    d -= d.mean()
    return d if np.all(np.isfinite(d)) else None


def solve_bdog(Y, V, cfg=None, g_init=None):
    """Descent solve of the smoothed problem on ``1^T g = N``.

    Args:
        Y: N x P observations.
        V: N x N orthonormal eigenbasis (true or perturbed).
        cfg: solver settings; ``cfg.epsilon=None`` picks the scale-aware knee.
        g_init: optional feasible warm start, defaults to the all-ones vector.

    Returns:
        SolveReport.  ``converged`` is False when ``max_iters`` was hit.
    """
    t0 = time.perf_counter()
    cfg = cfg or BdogConfig()
    Y = as_matrix(Y, "Y")
    V = as_matrix(V, "V")
    N = V.shape[0]
    if Y.shape[0] != N:
        raise InputError(f"Y has {Y.shape[0]} rows, V is {V.shape}")
    if orthogonality_defect(V) > 1e-6:
        raise InputError("V is not orthonormal")
    eps = cfg.epsilon if cfg.epsilon is not None else default_epsilon(Y)
    if eps <= 0:
        # Y == 0: every feasible point is optimal
        eps = 1.0

    if g_init is None:
        g = np.ones(N)
    else:
        g = np.asarray(g_init, dtype=np.float64).copy()
        if abs(g.sum() - N) > 1e-6:
            raise InputError(f"g_init violates 1^T g = N (sum {g.sum():.6g})")
    g += (N - g.sum()) / N

    A = V.T @ Y
    VA = lambda v: (V * v) @ A  # noqa: E731
    # Z = V diag(g) A is linear in g: column k of T is vec(v_k a_k^T)
    T = (V[:, None, :] * A.T[None, :, :]).reshape(-1, N) if cfg.direction == "newton" else None

    Z = VA(g)
    f = _huber_sum(Z, eps)
    trace = [f]
    grad = np.einsum("ik,ik->k", V, huber_deriv(Z, eps) @ A.T)
    pg = -_center(grad)
    step = 1.0
    prev = None
    converged = False
    it = 0
    while it < cfg.max_iters:
        dnorm = np.linalg.norm(pg)
        if dnorm <= cfg.grad_tol * (1.0 + abs(f)):
            converged = True
            break
        Zt = None
        if T is not None:
            d = _newton_direction(T, Z, grad, eps)
            if d is not None and -(grad @ d) <= 1e-15 * (1.0 + abs(f)):
                # predicted decrease below the rounding level of f
                converged = True
                break
            if d is not None and grad @ d < 0:
                Zd = VA(d)
                slope, t = grad @ d, 1.0
                for _ in range(40):
                    Zt = Z + t * Zd
                    ft = _huber_sum(Zt, eps)
                    if ft <= f + cfg.armijo_c * t * slope:
                        break
                    t *= cfg.armijo_shrink
                else:
                    Zt = None
                if Zt is not None:
                    step_taken = t
        if Zt is None:
            d = pg
            if prev is not None:
                s, y = g - prev[0], grad - prev[1]
                sy = s @ y
                step = (s @ s) / sy if sy > 0 else 1e4
            step = min(max(step, 1e-8), 1e4)
            Zd = VA(d)
            slope = -(dnorm * dnorm)  # grad . d on the constraint set
            while True:
                Zt = Z + step * Zd
                ft = _huber_sum(Zt, eps)
                if ft <= f + cfg.armijo_c * step * slope:
                    break
                step *= cfg.armijo_shrink
                if step < 1e-20:
                    Zt = None
                    break
            step_taken = step
        it += 1
        if Zt is None:
            # no decrease representable in floating point
            converged = True
            break
        prev = (g, grad)
        g = g + step_taken * d
        g += (N - g.sum()) / N
        Z = VA(g)
        f = _huber_sum(Z, eps)
        trace.append(f)
        grad = np.einsum("ik,ik->k", V, huber_deriv(Z, eps) @ A.T)
        pg = -_center(grad)

    return SolveReport(g, trace, it, converged, time.perf_counter() - t0)
