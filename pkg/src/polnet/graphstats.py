"""Descriptive statistics and vertex centralities of simple undirected graphs.

Every public function accepts a :class:`networkx.Graph`, a square 0/1 array,
a scipy sparse matrix or an :class:`~polnet.sbm.AdjacencyMatrix`. Edge weights
are ignored: all statistics here are binary.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, asdict

import networkx as nx
import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from .exceptions import ConnectivityError, GraphSizeError, ValidationError

__all__ = [
    "GraphSummary",
    "CentralityScores",
    "as_adjacency",
    "density",
    "degree_stats",
    "transitivity",
    "assortativity",
    "mean_geodesic",
    "clique_number",
    "largest_component",
    "summarize",
    "eigenvector_centrality",
    "betweenness",
    "centrality",
    "UNDEFINED",
]

#: Written in reports where a statistic is undefined (e.g. assortativity of a
#: regular graph). In Python objects the value is ``None``.
UNDEFINED = "NA"

DEFAULT_CLIQUE_CAP = 2000
EIGEN_TOL = 1e-12
EIGEN_MAX_ITER = 10_000


def as_adjacency(g, check=True):
    """Return ``(A, labels)`` with ``A`` a CSR 0/1 matrix of int8."""
    if isinstance(g, nx.Graph):
        if g.is_directed() or g.is_multigraph():
            raise ValidationError("expected a simple undirected graph")
        if check and nx.number_of_selfloops(g):
            raise ValidationError("graph has self-loops")
        labels = list(g.nodes)
        if not labels:
            return sp.csr_matrix((0, 0), dtype=np.int8), labels
        A = nx.to_scipy_sparse_array(g, nodelist=labels, weight=None, format="csr")
        A = sp.csr_matrix(A, dtype=np.int8)
        return A, labels
    labels = None
    if hasattr(g, "matrix") and hasattr(g, "labels"):
        labels = list(g.labels)
        g = g.matrix
    if sp.issparse(g):
        A = sp.csr_matrix(g)
    else:
        arr = np.asarray(g)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValidationError(f"adjacency must be square, got shape {arr.shape}")
        A = sp.csr_matrix(arr)
    A = sp.csr_matrix((A != 0).astype(np.int8))
    A.eliminate_zeros()
    if check:
        if A.diagonal().any():
            raise ValidationError("adjacency has nonzero diagonal (self-loops)")
        if (A != A.T).nnz:
            raise ValidationError("adjacency is not symmetric")
    if labels is None:
        labels = list(range(A.shape[0]))
    return A, labels


def _n_edges(A):
    return A.nnz // 2


def _degrees(A):
    return np.asarray(A.sum(axis=1)).ravel().astype(np.int64)


def density(g) -> float:
    A, _ = as_adjacency(g)
    n = A.shape[0]
    if n < 2:
        raise GraphSizeError("density needs at least 2 vertices")
    return 2.0 * _n_edges(A) / (n * (n - 1))


def degree_stats(g) -> tuple[float, float]:
    """Mean degree and population standard deviation of the degrees."""
    A, _ = as_adjacency(g)
    d = _degrees(A).astype(float)
    return float(d.mean()), float(d.std())


def _transitivity(A):
    d = _degrees(A)
    triples = float(np.sum(d * (d - 1)))  # twice the connected triples
    if triples == 0:
        return 0.0
    A = A.astype(np.int64)
    closed = float((A @ A).multiply(A).sum())  # six times the triangles
    return closed / triples


def transitivity(g) -> float:
    """Global clustering: 3 x triangles / connected triples (0 if no triples)."""
    A, _ = as_adjacency(g)
    return _transitivity(A)


def _assortativity(A):
    d = _degrees(A).astype(float)
    rows, cols = sp.triu(A, k=1).nonzero()
    if rows.size == 0:
        return None
    x = np.concatenate([d[rows], d[cols]])
    y = np.concatenate([d[cols], d[rows]])
    if x.max() == x.min():
        return None
    xm = x.mean()
    cov = np.mean((x - xm) * (y - xm))
    var = np.mean((x - xm) ** 2)
    return float(cov / var)


def assortativity(g):
    """Degree assortativity (Pearson over edge endpoints) or ``None`` if undefined."""
    A, _ = as_adjacency(g)
    return _assortativity(A)


def _distance_sums(A):
    """Per-vertex sum of hop distances to reachable vertices, and their count.

    Level-synchronous BFS from all sources at once: one sparse-dense product
    per distance level.
    """
    n = A.shape[0]
    A = A.astype(np.float32)
    seen = np.eye(n, dtype=bool)
    front = np.eye(n, dtype=np.float32)
    dist_sum = np.zeros(n)
    reached = np.zeros(n, dtype=np.int64)
    k = 0
    while True:
        nxt = (A @ front > 0) & ~seen
        per_vertex = nxt.sum(axis=0)
        if not per_vertex.any():
            break
        k += 1
        dist_sum += k * per_vertex
        reached += per_vertex
        seen |= nxt
        front = nxt.astype(np.float32)
    return dist_sum, reached


def _mean_geodesic(A):
    dist_sum, reached = _distance_sums(A)
    pairs = reached.sum()
    if pairs == 0:
        return None
    return float(dist_sum.sum() / pairs)


def mean_geodesic(g):
    """Mean shortest-path length over unordered pairs that are connected."""
    A, _ = as_adjacency(g)
    return _mean_geodesic(A)


def _neighbour_bits(A):
    indptr, indices = A.indptr, A.indices
    nbrs = []
    for i in range(A.shape[0]):
        m = 0
        for j in indices[indptr[i]:indptr[i + 1]]:
            m |= 1 << int(j)
        nbrs.append(m)
    return nbrs


def _iter_bits(m):
    while m:
        low = m & -m
        yield low.bit_length() - 1
        m ^= low


def _clique_number(A):
    n = A.shape[0]
    if n == 0:
        return 0
    nbrs = _neighbour_bits(A)
    best = 1

    def expand(size, P, X):
        nonlocal best
        if not P:
            if size > best:
                best = size
            return
        if size + P.bit_count() <= best:
            return
        # Tomita pivot: the vertex covering most of P
        PX = P | X
        pivot = max(_iter_bits(PX), key=lambda u: (P & nbrs[u]).bit_count())
        for v in _iter_bits(P & ~nbrs[pivot]):
            expand(size + 1, P & nbrs[v], X & nbrs[v])
            P &= ~(1 << v)
            X |= 1 << v
            if size + P.bit_count() <= best:
                return

    expand(0, (1 << n) - 1, 0)
    return best


def clique_number(g, cap: int = DEFAULT_CLIQUE_CAP) -> int:
    """Size of a maximum clique, found by branch and bound with pivoting.

    Refuses graphs with more than ``cap`` vertices; pass a larger ``cap`` to
    accept the (worst-case exponential) cost.
    """
    A, _ = as_adjacency(g)
    if A.shape[0] > cap:
        raise GraphSizeError(
            f"graph has {A.shape[0]} vertices, above the exact clique cap of {cap}; "
            "raise the cap explicitly to proceed"
        )
    return _clique_number(A)


def _components(A):
    return csgraph.connected_components(A, directed=False)


def largest_component(g):
    """Vertex indices of the largest component (ties: lowest first index)."""
    A, _ = as_adjacency(g)
    return _largest_component(A)


def _largest_component(A):
    n = A.shape[0]
    if n == 0:
        return np.arange(0)
    _, comp = _components(A)
    sizes = np.bincount(comp)
    # components are numbered in order of their first vertex
    return np.flatnonzero(comp == int(np.argmax(sizes)))


@dataclass(frozen=True)
class GraphSummary:
    n_vertices: int
    n_edges: int
    mean_geodesic: float | None
    mean_degree: float
    degree_sd: float
    clique_number: int
    density: float
    transitivity: float
    assortativity: float | None

    STATISTICS = (
        "mean_geodesic",
        "mean_degree",
        "degree_sd",
        "clique_number",
        "density",
        "transitivity",
        "assortativity",
    )

    def as_dict(self):
        return asdict(self)


def summarize(g, clique_cap: int = DEFAULT_CLIQUE_CAP) -> GraphSummary:
    """Descriptive statistics of a graph.

    Pass a connected component to reproduce the usual reporting practice;
    on a disconnected input the mean geodesic averages over reachable pairs
    only.
    """
    A, _ = as_adjacency(g)
    n = A.shape[0]
    if n < 2:
        raise GraphSizeError(f"summarize needs at least 2 vertices, got {n}")
    if n > clique_cap:
        raise GraphSizeError(
            f"graph has {n} vertices, above the exact clique cap of {clique_cap}; "
            "raise the cap explicitly to proceed"
        )
    d = _degrees(A).astype(float)
    m = _n_edges(A)
    return GraphSummary(
        n_vertices=n,
        n_edges=m,
        mean_geodesic=_mean_geodesic(A),
        mean_degree=float(d.mean()),
        degree_sd=float(d.std()),
        clique_number=_clique_number(A),
        density=2.0 * m / (n * (n - 1)),
        transitivity=_transitivity(A),
        assortativity=_assortativity(A),
    )


def _power_iteration(A, tol=EIGEN_TOL, max_iter=EIGEN_MAX_ITER):
    # Iterating on A + I keeps the same eigenvectors but breaks the +/- lambda
    # tie of bipartite graphs, which otherwise makes plain iteration oscillate.
    n = A.shape[0]
    M = (A.astype(float) + sp.identity(n, format="csr")).tocsr()
    x = np.ones(n)
    for _ in range(max_iter):
        y = M @ x
        y /= y.max()
        if np.max(np.abs(y - x)) < tol:
            return y, True
        x = y
    return x, False


def _eigenvector(A):
    if A.nnz == 0:
        return np.ones(A.shape[0])
    x, converged = _power_iteration(A)
    if not converged:
        warnings.warn(
            "power iteration did not converge; falling back to a dense eigensolver",
            RuntimeWarning,
            stacklevel=3,
        )
        _, vecs = np.linalg.eigh(A.toarray().astype(float))
        x = np.abs(vecs[:, -1])
    return x / x.max()


def eigenvector_centrality(g) -> dict:
    """Principal-eigenvector scores scaled so the top vertex scores exactly 1."""
    A, labels = as_adjacency(g)
    if A.shape[0] == 0:
        return {}
    return dict(zip(labels, _eigenvector(A).tolist()))


def _betweenness(A):
    # Brandes accumulation over unweighted shortest paths, endpoints excluded.
    n = A.shape[0]
    indptr, indices = A.indptr, A.indices
    adj = [indices[indptr[i]:indptr[i + 1]].tolist() for i in range(n)]
    bc = [0.0] * n
    for s in range(n):
        stack = []
        preds = [[] for _ in range(n)]
        sigma = [0] * n
        sigma[s] = 1
        dist = [-1] * n
        dist[s] = 0
        queue = [s]
        head = 0
        while head < len(queue):
            v = queue[head]
            head += 1
            stack.append(v)
            dv = dist[v] + 1
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dv
                    queue.append(w)
                if dist[w] == dv:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        while stack:
            w = stack.pop()
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                bc[w] += delta[w]
    # each unordered pair was counted from both ends
    return np.array(bc) / 2.0


def betweenness(g, normalized: bool = True) -> dict:
    A, labels = as_adjacency(g)
    n = A.shape[0]
    bc = _betweenness(A)
    if normalized:
        bc = bc * (2.0 / ((n - 1) * (n - 2))) if n > 2 else np.zeros(n)
    return dict(zip(labels, bc.tolist()))


@dataclass(frozen=True)
class CentralityScores:
    """Relative centralities, one array entry per vertex in ``labels`` order."""

    labels: tuple
    degree: np.ndarray
    closeness: np.ndarray
    betweenness: np.ndarray
    eigenvector: np.ndarray

    MEASURES = ("degree", "closeness", "betweenness", "eigenvector")

    def __getitem__(self, label):
        i = self.labels.index(label)
        return {m: float(getattr(self, m)[i]) for m in self.MEASURES}

    def __contains__(self, label):
        return label in self.labels

    def rows(self, sort_by="eigenvector", top=None):
        """``(label, degree, closeness, betweenness, eigenvector)`` tuples.

        Sorted descending on ``sort_by``, ties by label.
        """
        key = getattr(self, sort_by)
        order = sorted(range(len(self.labels)), key=lambda i: (-key[i], str(self.labels[i])))
        if top is not None:
            order = order[:top]
        return [
            (self.labels[i],) + tuple(float(getattr(self, m)[i]) for m in self.MEASURES)
            for i in order
        ]


def centrality(g) -> CentralityScores:
    """Relative degree, closeness, betweenness and eigenvector centrality.

    The graph must be connected; compute on the giant component otherwise.
    """
    A, labels = as_adjacency(g)
    n = A.shape[0]
    if n < 2:
        raise GraphSizeError(f"centrality needs at least 2 vertices, got {n}")
    n_comp, _ = _components(A)
    if n_comp != 1:
        raise ConnectivityError(n_comp)
    deg = _degrees(A) / (n - 1)
    dist_sum, _ = _distance_sums(A)
    closeness = (n - 1) / dist_sum
    bc = _betweenness(A)
    bc = bc * (2.0 / ((n - 1) * (n - 2))) if n > 2 else np.zeros(n)
    return CentralityScores(tuple(labels), deg, closeness, bc, _eigenvector(A))
