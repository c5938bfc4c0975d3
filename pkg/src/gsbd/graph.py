"""Random graphs, the degree-normalised adjacency shift operator and its
spectral objects."""

from dataclasses import dataclass

import numpy as np

from .errors import InputError, RejectedSample
from .linalg import (
    as_matrix,
    eigh_symmetric,
    modified_gram_schmidt,
    orthogonality_defect,
    project_ones_complement,
)


@dataclass(frozen=True)
class Graph:
    n_nodes: int
    adjacency: np.ndarray

    def __post_init__(self):
        A = self.adjacency
        if A.shape != (self.n_nodes, self.n_nodes):
            raise InputError(f"adjacency shape {A.shape} does not match n_nodes={self.n_nodes}")
        if not np.array_equal(A, A.T):
            raise InputError("adjacency must be symmetric")
        if np.any(np.diag(A) != 0):
            raise InputError("adjacency must have a zero diagonal")
        if not np.all((A == 0) | (A == 1)):
            raise InputError("adjacency entries must be 0/1")

    @property
    def degrees(self):
        return self.adjacency.sum(axis=1)

    def edges(self):
        i, j = np.nonzero(np.triu(self.adjacency, k=1))
        return list(zip(i.tolist(), j.tolist()))

    def is_connected(self):
        seen = np.zeros(self.n_nodes, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            u = stack.pop()
            for v in np.flatnonzero(self.adjacency[u]):
                if not seen[v]:
                    seen[v] = True
                    stack.append(int(v))
        return bool(seen.all())


@dataclass(frozen=True)
class EigenBasis:
    eigenvalues: np.ndarray
    V: np.ndarray

    @property
    def n(self):
        return self.V.shape[0]


def generate_erdos_renyi(n, p_edge, rng_seed):
    """Draw G(n, p_edge); every undirected edge is an independent coin flip.

    Raises:
        RejectedSample: the draw has an isolated node.
    """
    if n < 2:
        raise InputError(f"need n >= 2, got {n}")
    if not 0.0 <= p_edge <= 1.0:
        raise InputError(f"p_edge must lie in [0, 1], got {p_edge}")
    rng = np.random.default_rng(rng_seed)
    iu = np.triu_indices(n, k=1)
    coins = rng.random(len(iu[0])) < p_edge
    A = np.zeros((n, n))
    A[iu] = coins
    A = A + A.T
    if np.any(A.sum(axis=1) == 0):
        raise RejectedSample("graph has an isolated node")
    return Graph(n, A)


def normalized_adjacency_gso(g):
    """``D^{-1/2} A D^{-1/2}``."""
    deg = g.degrees
    if np.any(deg < 1):
        raise InputError("isolated node: degree normalisation undefined")
    d = 1.0 / np.sqrt(deg)
    S = g.adjacency * d[:, None] * d[None, :]
    return 0.5 * (S + S.T)


def eigenbasis(S):
    w, V = eigh_symmetric(S)
    return EigenBasis(w, V)


def min_eigengap(eigenvalues):
    return float(np.min(np.diff(eigenvalues))) if len(eigenvalues) > 1 else np.inf


def sample_graph_basis(n, p_edge, rng, max_attempts=1000, min_gap=1e-8):
    """Resample ER graphs until connected with a simple GSO spectrum.

    ``rng`` is a ``numpy.random.Generator``; each attempt consumes one integer
    seed from it.  Returns ``(graph, S, basis)``.
    """
    for _ in range(max_attempts):
        seed = int(rng.integers(0, 2**63 - 1))
        try:
            g = generate_erdos_renyi(n, p_edge, seed)
        except RejectedSample:
            continue
        if not g.is_connected():
            continue
        S = normalized_adjacency_gso(g)
        basis = eigenbasis(S)
        if min_eigengap(basis.eigenvalues) > min_gap:
            return g, S, basis
    raise RejectedSample(f"no acceptable graph in {max_attempts} attempts")


def vandermonde(eigenvalues, L):
    """``Psi[i, j] = lambda_i ** j`` for ``j < L``."""
    if L < 1:
        raise InputError(f"degree L must be >= 1, got {L}")
    lam = np.asarray(eigenvalues, dtype=np.float64)
    return lam[:, None] ** np.arange(L)[None, :]


def u_tilde(V, tol=1e-8):
    """``(V o V) P_1^perp`` for orthonormal ``V``."""
    V = as_matrix(V, "V")
    if orthogonality_defect(V) > tol:
        raise InputError("V is not orthonormal")
    W = V * V
    # right-multiplying by P_1^perp centres each row
    return np.apply_along_axis(project_ones_complement, 1, W)


def random_orthonormal(n, rng):
    """Modified Gram-Schmidt on a standard-normal matrix."""
    return modified_gram_schmidt(np.random.default_rng(rng).standard_normal((n, n)))


def write_edge_list(g, path):
    with open(path, "w") as fh:
        fh.write(f"n_nodes={g.n_nodes}\n")
        for i, j in g.edges():
            fh.write(f"{i} {j}\n")


def read_edge_list(path):
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("n_nodes="):
            raise InputError(f"bad edge-list header: {header!r}")
        n = int(header.split("=", 1)[1])
        A = np.zeros((n, n))
        for line in fh:
            line = line.strip()
            if not line:
                continue
            i, j = (int(t) for t in line.split())
            A[i, j] = A[j, i] = 1.0
    return Graph(n, A)
