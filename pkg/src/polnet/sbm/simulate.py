"""Sampling networks from a block model."""

from __future__ import annotations

import numpy as np

from .adjacency import AdjacencyMatrix
from .model import BlockModel

__all__ = ["simulate", "sample_network"]


def sample_network(model: BlockModel, n: int, rng: np.random.Generator):
    """Draw memberships from ``pi`` and one Bernoulli edge per dyad.

    Returns ``(Y, z)`` with ``Y`` a symmetric int8 array with zero diagonal.
    """
    z = rng.choice(model.K, size=n, p=model.pi)
    P = model.theta[np.ix_(z, z)]
    U = rng.random((n, n))
    Y = np.triu(U < P, k=1)
    Y = (Y | Y.T).astype(np.int8)
    return Y, z


def simulate(model: BlockModel, n: int, seed: int) -> AdjacencyMatrix:
    """Simulate an ``n``-vertex network; identical arguments give identical output."""
    Y, _ = sample_network(model, n, np.random.default_rng(seed))
    return AdjacencyMatrix(Y, [f"v{i + 1}" for i in range(n)])
