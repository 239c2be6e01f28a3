"""Binary symmetric relation matrices and their validation."""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx
import numpy as np
import scipy.sparse as sp

from ..exceptions import ValidationError

__all__ = ["AdjacencyMatrix", "check_adjacency"]


@dataclass(frozen=True, eq=False)
class AdjacencyMatrix:
    """Symmetric 0/1 matrix with zero diagonal and one label per vertex."""

    matrix: np.ndarray
    labels: tuple = None

    def __post_init__(self):
        Y = np.asarray(self.matrix)
        if Y.ndim != 2 or Y.shape[0] != Y.shape[1]:
            raise ValidationError(f"adjacency must be square, got shape {Y.shape}")
        if not np.isin(Y, (0, 1)).all():
            raise ValidationError("adjacency entries must be 0 or 1")
        if np.any(np.diag(Y)):
            raise ValidationError("adjacency diagonal must be zero (no self-loops)")
        if not np.array_equal(Y, Y.T):
            raise ValidationError("adjacency is not symmetric")
        labels = tuple(str(l) for l in self.labels) if self.labels is not None else None
        if labels is None:
            labels = tuple(f"v{i + 1}" for i in range(Y.shape[0]))
        if len(labels) != Y.shape[0]:
            raise ValidationError(f"{len(labels)} labels for {Y.shape[0]} vertices")
        if len(set(labels)) != len(labels):
            raise ValidationError("vertex labels must be unique")
        Y = Y.astype(np.int8)
        Y.setflags(write=False)
        object.__setattr__(self, "matrix", Y)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self):
        return self.matrix.shape[0]

    @property
    def n_edges(self):
        return int(self.matrix.sum()) // 2

    def density(self):
        n = self.n
        return 2.0 * self.n_edges / (n * (n - 1)) if n > 1 else 0.0

    def __eq__(self, other):
        if not isinstance(other, AdjacencyMatrix):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.matrix, other.matrix)

    __hash__ = None

    def permute(self, order):
        """Relabel vertices so that new vertex ``i`` is old vertex ``order[i]``."""
        order = np.asarray(order)
        return AdjacencyMatrix(self.matrix[np.ix_(order, order)], [self.labels[i] for i in order])

    def to_networkx(self):
        g = nx.Graph()
        g.add_nodes_from(self.labels)
        rows, cols = np.nonzero(np.triu(self.matrix, 1))
        g.add_edges_from((self.labels[i], self.labels[j]) for i, j in zip(rows, cols))
        return g

    @classmethod
    def from_edges(cls, edges, labels=None):
        """Build from ``(u, v)`` label pairs; duplicates and reversed copies collapse.

        Vertex order is ``labels`` if given, otherwise sorted label order.
        """
        edges = [(str(u), str(v)) for u, v in edges]
        for u, v in edges:
            if u == v:
                raise ValidationError(f"self-loop on vertex {u!r}")
        if labels is None:
            labels = sorted({x for e in edges for x in e})
        labels = [str(l) for l in labels]
        index = {l: i for i, l in enumerate(labels)}
        Y = np.zeros((len(labels), len(labels)), dtype=np.int8)
        for u, v in edges:
            try:
                i, j = index[u], index[v]
            except KeyError as exc:
                raise ValidationError(f"edge endpoint {exc.args[0]!r} not among labels") from None
            Y[i, j] = Y[j, i] = 1
        return cls(Y, labels)

    @classmethod
    def from_networkx(cls, g):
        labels = sorted(g.nodes, key=str)
        return cls.from_edges(g.edges, labels=labels)


def check_adjacency(Y) -> AdjacencyMatrix:
    """Coerce supported inputs to a validated :class:`AdjacencyMatrix`.

    Accepts an ``AdjacencyMatrix``, a ``networkx.Graph``, a scipy sparse matrix
    or anything ``np.asarray`` understands. Mirrors the role of
    ``sklearn.utils.check_array`` for estimators in this package.
    """
    if isinstance(Y, AdjacencyMatrix):
        return Y
    if isinstance(Y, nx.Graph):
        if Y.is_directed():
            raise ValidationError("expected an undirected graph")
        return AdjacencyMatrix.from_networkx(Y)
    if sp.issparse(Y):
        Y = Y.toarray()
    Y = np.asarray(Y)
    if Y.dtype == bool:
        Y = Y.astype(np.int8)
    return AdjacencyMatrix(Y, None)
