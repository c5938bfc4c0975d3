"""Recovery threshold, stability bound and tolerable perturbation size.

All quantities are closed-form evaluations on a concrete instance.  The
unknown universal constants (``C1``, ``C'``) are inputs;
see :func:`calibrate_c1` for fitting ``C1`` on data.
"""

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import InputError
from .graph import u_tilde
from .linalg import (
    as_matrix,
    khatri_rao_columns,
    norm_1_1,
    norm_1to2,
    orthogonality_defect,
    project_ones_complement,
    spectral_norm,
)

THETA_MAX = 0.324
WORST_CASE = "worst-case"
SIGMA_GRID = np.linspace(0.0, 1.0, 1001)


def sigma1_max(theta):
    return math.sqrt(math.pi) * theta**1.5 / 2.0


def sigma2_max(theta):
    return math.sqrt(math.pi) * theta / 2.0


@dataclass(frozen=True)
class BoundParams:
    theta: float
    sigma1: Optional[float] = None  # None -> upper limit for theta
    sigma2: Optional[float] = None
    sigma3: float = 0.1
    sigma4: float = 0.1
    delta_prob: float = 0.05
    C1: float = 1.0
    sigma_q: Union[float, str] = WORST_CASE

    def __post_init__(self):
        # fill theta-dependent defaults on the frozen instance
        if self.sigma1 is None:
            object.__setattr__(self, "sigma1", sigma1_max(self.theta))
        if self.sigma2 is None:
            object.__setattr__(self, "sigma2", sigma2_max(self.theta))
        problems = []
        if not 0.0 < self.theta <= THETA_MAX:
            problems.append(f"theta={self.theta} not in (0, {THETA_MAX}]")
        else:
            if not 0.0 < self.sigma1 <= sigma1_max(self.theta) * (1 + 1e-12):
                problems.append(f"sigma1={self.sigma1} not in (0, {sigma1_max(self.theta):.6g}]")
            if not 0.0 < self.sigma2 <= sigma2_max(self.theta) * (1 + 1e-12):
                problems.append(f"sigma2={self.sigma2} not in (0, {sigma2_max(self.theta):.6g}]")
        if not self.sigma3 > 0:
            problems.append(f"sigma3={self.sigma3} must be > 0")
        if not 0.0 < self.sigma4 < 1.0:
            problems.append(f"sigma4={self.sigma4} not in (0, 1)")
        if not 0.0 < self.delta_prob < 1.0:
            problems.append(f"delta_prob={self.delta_prob} not in (0, 1)")
        if not self.C1 > 0:
            problems.append(f"C1={self.C1} must be > 0")
        if self.sigma_q != WORST_CASE and not 0.0 <= float(self.sigma_q) <= 1.0:
            problems.append(f"sigma_q={self.sigma_q} not in [0, 1]")
        if problems:
            raise InputError("invalid bound parameters: " + "; ".join(problems))

    @property
    def sigma_m(self):
        return min(self.sigma1, self.sigma2, self.sigma3, self.sigma4)


def a0_bracket(params):
    """``(1 - sigma1) - 2 theta (1 + sigma2)``."""
    return (1.0 - params.sigma1) - 2.0 * params.theta * (1.0 + params.sigma2)


def a0(V, params):
    """Exact-recovery threshold.

    Returns:
        ``(a0, bracket_nonpositive)``; the value is clipped at zero and the
        flag reports whether the sparsity bracket was already non-positive.
    """
    smax = min(spectral_norm(u_tilde(V)), 1.0)
    bracket = a0_bracket(params)
    value = (
        math.sqrt(max(0.0, 1.0 - smax**2))
        * bracket
        * (1.0 - params.sigma4)
        / ((1.0 + params.sigma3) * math.sqrt(params.theta))
    )
    return max(value, 0.0), bracket <= 0.0


def sample_size_requirement(params, c_prime):
    """``C' sigma_m^{-2} log(4 / delta)``; reported, never enforced."""
    return c_prime * params.sigma_m**-2 * math.log(4.0 / params.delta_prob)


@dataclass(frozen=True)
class RecoveryCheck:
    holds: bool
    lhs: float
    rhs: float


def exact_recovery_check(g0, V, params):
    lhs = float(np.linalg.norm(project_ones_complement(g0)))
    rhs, _ = a0(V, params)
    return RecoveryCheck(lhs <= rhs, lhs, rhs)


def error_matrix_E(V, V_p, g0, h0, X0, tol=1e-8):
    """Equivalent data perturbation induced by the basis error ``V - V_p``."""
    V = as_matrix(V, "V")
    V_p = as_matrix(V_p, "V_p")
    g0 = np.asarray(g0, dtype=np.float64)
    h0 = np.asarray(h0, dtype=np.float64)
    if np.max(np.abs(g0 * h0 - 1.0)) > tol:
        raise InputError("g0 and h0 are not reciprocal")
    if orthogonality_defect(V) > 1e-8 or orthogonality_defect(V_p) > 1e-8:
        raise InputError("V and V_p must be orthonormal")
    D = V - V_p
    H0 = (V * h0) @ V.T
    return V_p @ ((D.T - (g0[:, None] * D.T) @ H0) @ X0)


def restrict_complement(E, omega):
    """Zero ``E`` on the support mask, keep the complement."""
    E = np.asarray(E, dtype=np.float64)
    omega = np.asarray(omega)
    if E.shape != omega.shape:
        raise InputError(f"shape mismatch: E {E.shape}, mask {omega.shape}")
    return E * (1.0 - (omega != 0))


def _q_unit(alpha, a0_value, sigma):
    # Q / (C1 sqrt(theta)) at a given sigma
    return math.sqrt(max(a0_value**2 - (1.0 - sigma) ** 2 * alpha**2, 0.0)) - sigma * alpha


def q_factor(g0, a0_value, params):
    """``C1 sqrt(theta) (sqrt(a0^2 - (1-s)^2 alpha^2) - s alpha)``.

    With ``params.sigma_q == "worst-case"`` the minimum over a 1001-point grid
    of ``s`` in [0, 1] is returned.

    Raises:
        InputError: ``||P_1^perp g0|| > a0`` (recovery condition fails).
    """
    alpha = float(np.linalg.norm(project_ones_complement(g0)))
    if alpha > a0_value:
        raise InputError(f"recovery condition fails: ||P g0|| = {alpha:.6g} > a0 = {a0_value:.6g}")
    scale = params.C1 * math.sqrt(params.theta)
    if params.sigma_q == WORST_CASE:
        return scale * min(_q_unit(alpha, a0_value, s) for s in SIGMA_GRID)
    return scale * _q_unit(alpha, a0_value, float(params.sigma_q))


def khatri_rao_term(E_comp, V):
    """``|| (E_comp^T V) kr V ||_{1->2}``."""
    return norm_1to2(khatri_rao_columns(E_comp.T @ V, V))


@dataclass(frozen=True)
class StabilityBound:
    bound: Optional[float]  # None when infeasible
    numerator: float
    denominator: float

    @property
    def feasible(self):
        return self.bound is not None


def stability_bound(g0, E_comp, V, a0_value, Q, P):
    """Error bound on the perturbed estimate; infeasible when the
    denominator is not positive."""
    g0 = np.asarray(g0, dtype=np.float64)
    N = len(g0)
    spread = spectral_norm(np.diag(g0) - np.outer(g0, g0) / N)
    e11 = norm_1_1(E_comp)
    numerator = 2.0 * spread * e11
    denominator = P * Q - a0_value * e11 - khatri_rao_term(E_comp, V)
    if e11 == 0.0:
        return StabilityBound(0.0, 0.0, denominator)
    if denominator <= 0.0:
        return StabilityBound(None, numerator, denominator)
    return StabilityBound(numerator / denominator, numerator, denominator)


def m2_factor(g0, h0, X0, V, delta_dir):
    H0 = (V * h0) @ V.T
    return float(np.linalg.norm((delta_dir.T - (g0[:, None] * delta_dir.T) @ H0) @ X0))


def m1_factor(E_comp, V, a0_value):
    nrm = np.linalg.norm(E_comp)
    if nrm == 0.0:
        return 0.0
    Ebar = E_comp / nrm
    return a0_value * norm_1_1(Ebar) + khatri_rao_term(Ebar, V)


def tolerable_delta_bound(g0, h0, X0, V, delta_dir, a0_value, Q, P, V_p=None):
    """Largest tolerable ``||Delta||_F`` along a unit-norm direction.

    ``M1`` needs the shape of the off-support error.  When ``V_p`` is given
    the exact error matrix is used; otherwise the first-order shape
    ``V [D^T - diag(g0) D^T H0] X0`` with ``D = delta_dir``.

    Returns:
        ``(bound, M1, M2)``; ``bound`` is ``inf`` when ``M1 * M2 == 0``.
    """
    delta_dir = as_matrix(delta_dir, "delta_dir")
    if abs(np.linalg.norm(delta_dir) - 1.0) > 1e-10:
        raise InputError("direction must have unit Frobenius norm")
    g0 = np.asarray(g0, dtype=np.float64)
    h0 = np.asarray(h0, dtype=np.float64)
    M2 = m2_factor(g0, h0, X0, V, delta_dir)
    if V_p is None:
        H0 = (V * h0) @ V.T
        E = V @ ((delta_dir.T - (g0[:, None] * delta_dir.T) @ H0) @ X0)
    else:
        E = error_matrix_E(V, V_p, g0, h0, X0)
    M1 = m1_factor(restrict_complement(E, X0 != 0), V, a0_value)
    if M1 * M2 == 0.0:
        return math.inf, M1, M2
    return P * Q / (M1 * M2), M1, M2


def identity_residual(g, V, V_p, g0, h0, X0):
    """Residual of ``V_p diag(g) V_p^T Y = P(g o h0) [X0 + E]`` at general ``g``.

    Exact (zero up to rounding) at ``g = g0``; reported, not asserted,
    elsewhere.
    """
    Y = (V * h0) @ (V.T @ X0)
    lhs = (V_p * g) @ (V_p.T @ Y)
    E = error_matrix_E(V, V_p, g0, h0, X0)
    rhs = (V * (g * h0)) @ (V.T @ (X0 + E))
    return float(np.linalg.norm(lhs - rhs))


def c1_upper_limit(err, g0, E_comp, V, a0_value, q_unit, P):
    """Largest ``C1`` for which the stability bound still covers ``err``.

    ``q_unit`` is ``Q`` evaluated at ``C1 = 1``.  The bound is decreasing in
    ``C1`` on its feasible range, so it holds exactly for
    ``C1 <= c1_upper_limit``.  Returns ``inf`` when ``err == 0``.
    """
    g0 = np.asarray(g0, dtype=np.float64)
    N = len(g0)
    spread = spectral_norm(np.diag(g0) - np.outer(g0, g0) / N)
    e11 = norm_1_1(E_comp)
    k = a0_value * e11 + khatri_rao_term(E_comp, V)
    if err <= 0.0:
        return math.inf
    return (k + 2.0 * spread * e11 / err) / (P * q_unit)


def calibrate_c1(limits):
    """Tightest ``C1`` consistent with every training instance."""
    finite = [c for c in limits if math.isfinite(c)]
    if not finite:
        raise InputError("no informative training instance (all errors zero)")
    return min(finite)
