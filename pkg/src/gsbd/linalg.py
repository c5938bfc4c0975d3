"""Small dense linear-algebra kernel.

Matrices are plain ``numpy.ndarray`` objects of dtype float64.  The routines
here cover what the rest of the package needs for N up to roughly 100:
a cyclic Jacobi symmetric eigensolver, a partial-pivot LU solve, the
Khatri-Rao product and a handful of norms.
"""

import math

import numpy as np

from .errors import InputError, NumericalError

JACOBI_MAX_SWEEPS = 100
JACOBI_REL_TOL = 1e-12


def as_matrix(A, name="A"):
    """Coerce ``A`` to a finite 2-D float64 array."""
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise InputError(f"{name} must be 2-D, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InputError(f"{name} has non-finite entries")
    return A


def _check_symmetric(S, tol):
    n, m = S.shape
    if n != m:
        raise InputError(f"matrix must be square, got {S.shape}")
    asym = np.max(np.abs(S - S.T)) if n else 0.0
    if asym > tol:
        raise InputError(f"matrix is not symmetric (max |S - S^T| = {asym:.3e} > {tol:.1e})")


def _fix_signs(V):
    # largest-magnitude entry of each column made positive
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def eigh_symmetric(S, tol=1e-10):
    """Eigendecomposition of a real symmetric matrix by cyclic Jacobi sweeps.

    Args:
        S: square symmetric matrix.
        tol: allowed asymmetry ``max |S - S^T|`` before the input is rejected.

    Returns:
        ``(eigenvalues, V)`` with eigenvalues ascending and ``V`` orthonormal.
        Each eigenvector is signed so that its largest-magnitude entry is
        positive.

    Raises:
        InputError: non-square or asymmetric input.
        NumericalError: off-diagonal mass not reduced below threshold within
            ``JACOBI_MAX_SWEEPS`` sweeps.
    """
    S = as_matrix(S, "S")
    _check_symmetric(S, tol)
    n = S.shape[0]
    A = 0.5 * (S + S.T)
    V = np.eye(n)
    threshold = JACOBI_REL_TOL * np.linalg.norm(A)
    iu = np.triu_indices(n, k=1)

    for _ in range(JACOBI_MAX_SWEEPS):
        off = math.sqrt(2.0) * np.linalg.norm(A[iu])
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                diff = A[q, q] - A[p, p]
                if abs(diff) + 100.0 * abs(apq) == abs(diff):
                    # tau would overflow; first-order angle
                    t = apq / diff
                else:
                    tau = diff / (2.0 * apq)
                    t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                ap = A[:, p].copy()
                aq = A[:, q]
                A[:, p] = c * ap - s * aq
                A[:, q] = s * ap + c * aq
                ap = A[p, :].copy()
                aq = A[q, :]
                A[p, :] = c * ap - s * aq
                A[q, :] = s * ap + c * aq
                vp = V[:, p].copy()
                vq = V[:, q]
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    else:
        off = math.sqrt(2.0) * np.linalg.norm(A[iu])
        if off > threshold:
            raise NumericalError(
                f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps (off-diagonal {off:.3e})"
            )

    w = np.diag(A).copy()
    order = np.argsort(w, kind="stable")
    return w[order], _fix_signs(V[:, order])


def solve_linear(A, B):
    """Solve ``A X = B`` by LU factorisation with partial pivoting.

    ``B`` may be a vector or a matrix.  A pivot whose magnitude falls below
    ``1e-12 * ||A||_F`` raises :class:`NumericalError` naming the elimination
    step.
    """
    A = as_matrix(A, "A")
    n, m = A.shape
    if n != m:
        raise InputError(f"A must be square, got {A.shape}")
    B = np.asarray(B, dtype=np.float64)
    vector_rhs = B.ndim == 1
    X = B.reshape(n, -1).copy() if vector_rhs else as_matrix(B, "B").copy()
    if X.shape[0] != n:
        raise InputError(f"row mismatch: A is {A.shape}, B is {B.shape}")

    LU = A.copy()
    floor = 1e-12 * np.linalg.norm(A)
    for k in range(n):
        col = np.abs(LU[k:, k])
        piv = k + int(col.argmax())
        if col[piv - k] <= floor:
            raise NumericalError(f"singular matrix: pivot {k} has magnitude {col[piv - k]:.3e}")
        if piv != k:
            LU[[k, piv]] = LU[[piv, k]]
            X[[k, piv]] = X[[piv, k]]
        mult = LU[k + 1:, k, None] / LU[k, k]
        LU[k + 1:, k + 1:] -= mult * LU[k, k + 1:]
        X[k + 1:] -= mult * X[k]
    for k in range(n - 1, -1, -1):
        X[k] -= LU[k, k + 1:] @ X[k + 1:]
        X[k] /= LU[k, k]
    return X.ravel() if vector_rhs else X


def khatri_rao_columns(A, B):
    """Column-wise Kronecker product of ``A`` (m x n) and ``B`` (p x n)."""
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    if A.shape[1] != B.shape[1]:
        raise InputError(f"column counts differ: {A.shape[1]} vs {B.shape[1]}")
    m, n = A.shape
    return (A[:, None, :] * B[None, :, :]).reshape(m * B.shape[0], n)


def norm_1_1(A):
    """Entrywise absolute sum."""
    return float(np.sum(np.abs(A)))


def norm_1to2(A):
    """Largest column l2 norm."""
    A = np.asarray(A, dtype=np.float64)
    if A.size == 0:
        return 0.0
    return float(np.max(np.sqrt(np.sum(A * A, axis=0))))


def spectral_norm(A, tol=1e-10, max_iter=200_000):
    """Largest singular value via power iteration on ``A^T A``.

    The start vector comes from a fixed-seed generator so the result is
    deterministic and not trapped by structured null spaces (for example the
    all-ones direction).
    """
    A = as_matrix(A, "A")
    if A.size == 0 or not np.any(A):
        return 0.0
    x = np.random.default_rng(0x5EED).standard_normal(A.shape[1])
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(max_iter):
        y = A.T @ (A @ x)
        lam_new = float(x @ y)
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return 0.0
        x = y / ny
        if abs(lam_new - lam) <= tol * abs(lam_new):
            lam = lam_new
            break
        lam = lam_new
    # one last Rayleigh quotient on the normalised iterate
    lam = max(lam, float(np.linalg.norm(A @ x) ** 2))
    return math.sqrt(lam)


def project_ones_complement(x):
    """Remove the mean: ``x - (1^T x / N) 1``."""
    x = np.asarray(x, dtype=np.float64)
    return x - x.mean()


def modified_gram_schmidt(A):
    """Orthonormalise the columns of a square full-rank matrix."""
    Q = as_matrix(A, "A").copy()
    n = Q.shape[1]
    for k in range(n):
        n0 = np.linalg.norm(Q[:, k])
        for j in range(k):
            Q[:, k] -= (Q[:, j] @ Q[:, k]) * Q[:, j]
        nk = np.linalg.norm(Q[:, k])
        if nk <= 1e-12 * n0 or nk == 0.0:
            raise NumericalError(f"rank deficiency at column {k}")
        Q[:, k] /= nk
    return Q


def orthogonality_defect(V):
    """``||V^T V - I||_F``."""
    return float(np.linalg.norm(V.T @ V - np.eye(V.shape[1])))
