"""Figures of merit for recovered filters and sources."""

import numpy as np

from .errors import InputError

DEFAULT_TAU = 0.1
RESPONSE_FLOOR = 1e-8


class UndefinedMetricError(InputError):
    """The reference support is empty, so a ratio metric is undefined."""


def re_g(g_hat, g0):
    g_hat = np.asarray(g_hat, dtype=np.float64)
    g0 = np.asarray(g0, dtype=np.float64)
    if g_hat.shape != g0.shape:
        raise InputError(f"shape mismatch: {g_hat.shape} vs {g0.shape}")
    den = np.linalg.norm(g0)
    if den == 0:
        raise UndefinedMetricError("reference response is zero")
    return float(np.linalg.norm(g_hat - g0) / den)


def support(X, tau=DEFAULT_TAU):
    return np.abs(X) > tau


def acc_x(X_hat, X0, tau=DEFAULT_TAU):
    """Fraction of the thresholded true support that is also in the estimate."""
    X_hat = np.asarray(X_hat)
    X0 = np.asarray(X0)
    if X_hat.shape != X0.shape:
        raise InputError(f"shape mismatch: {X_hat.shape} vs {X0.shape}")
    s0 = support(X0, tau)
    n0 = int(s0.sum())
    if n0 == 0:
        raise UndefinedMetricError("reference support is empty")
    return float(np.sum(support(X_hat, tau) & s0) / n0)


def re_operator(estimated, truth):
    """Relative Frobenius error."""
    estimated = np.asarray(estimated, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if estimated.shape != truth.shape:
        raise InputError(f"shape mismatch: {estimated.shape} vs {truth.shape}")
    den = np.linalg.norm(truth)
    if den == 0:
        raise UndefinedMetricError("reference operator is zero")
    return float(np.linalg.norm(estimated - truth) / den)


def _clip_away_from_zero(g, floor=RESPONSE_FLOOR):
    g = np.asarray(g, dtype=np.float64)
    sign = np.where(g < 0, -1.0, 1.0)
    return sign * np.maximum(np.abs(g), floor)


def node_domain_operators(V_hat, g_hat):
    """Estimated inverse filter ``G`` and forward filter ``H`` in the node domain.

    Both are unchanged by any signed permutation of ``V_hat``'s columns
    applied together with the matching permutation of ``g_hat``.
    """
    G = (V_hat * g_hat) @ V_hat.T
    H = (V_hat / _clip_away_from_zero(g_hat)) @ V_hat.T
    return G, H
