"""Posterior-predictive goodness of fit for a fitted block model.

Replicate networks are simulated from the model (memberships redrawn from the
group proportions) and a set of structural statistics is compared with the
observed network. The reported ppp value is one-sided: the fraction of
replicates whose statistic is at least the observed value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..exceptions import ValidationError
from .. import graphstats as gs
from .adjacency import check_adjacency
from .model import BlockModel
from .simulate import sample_network

__all__ = ["GOF_STATISTICS", "GofRow", "GofReport", "network_statistics", "gof", "ppp_value"]

GOF_STATISTICS = (
    "density",
    "transitivity",
    "assortativity",
    "mean_geodesic",
    "mean_degree",
    "giant_component_size",
)

MIN_SIMS = 100


def network_statistics(Y) -> dict:
    """The six test statistics of one network; ``None`` marks an undefined value.

    Geodesic distance and giant-component size are taken on the largest
    connected component; the rest on the whole network.
    """
    A = sp.csr_matrix(np.asarray(getattr(Y, "matrix", Y), dtype=np.int8))
    n = A.shape[0]
    m = A.nnz // 2
    comp = gs._largest_component(A)
    giant = A[comp][:, comp]
    return {
        "density": 2.0 * m / (n * (n - 1)),
        "transitivity": gs._transitivity(A),
        "assortativity": gs._assortativity(A),
        "mean_geodesic": gs._mean_geodesic(giant) if comp.size > 1 else None,
        "mean_degree": 2.0 * m / n,
        "giant_component_size": float(comp.size),
    }


def ppp_value(simulated, observed) -> float:
    """Fraction of simulated values greater than or equal to ``observed``."""
    simulated = np.asarray(simulated, dtype=float)
    return float(np.mean(simulated >= observed))


@dataclass(frozen=True)
class GofRow:
    statistic: str
    observed: float | None
    sim_mean: float | None
    ci_low: float | None
    ci_high: float | None
    ppp: float | None
    n_sims: int
    n_excluded: int


@dataclass(frozen=True, eq=False)
class GofReport:
    rows: tuple
    n_sims: int
    seed: int
    samples: dict
    sidedness: str = "P(T_rep >= T_obs)"

    def __getitem__(self, statistic):
        for r in self.rows:
            if r.statistic == statistic:
                return r
        raise KeyError(statistic)


def gof(y, model: BlockModel, n_sims: int = 1000, seed: int = 0) -> GofReport:
    """Compare observed statistics against ``n_sims`` replicates of ``model``.

    Replicate ``i`` is drawn with seed ``seed + i``. A replicate on which a
    statistic is undefined is left out of that statistic's summary and counted
    in ``n_excluded``.
    """
    if n_sims < MIN_SIMS:
        raise ValidationError(f"n_sims must be >= {MIN_SIMS}, got {n_sims}")
    y = check_adjacency(y)
    n = y.n
    observed = network_statistics(y.matrix)
    samples = {s: [] for s in GOF_STATISTICS}
    for i in range(n_sims):
        Y, _ = sample_network(model, n, np.random.default_rng(seed + i))
        stats = network_statistics(Y)
        for s in GOF_STATISTICS:
            samples[s].append(np.nan if stats[s] is None else stats[s])
    rows = []
    arrays = {}
    for s in GOF_STATISTICS:
        vals = np.asarray(samples[s], dtype=float)
        arrays[s] = vals
        ok = vals[~np.isnan(vals)]
        excluded = int(vals.size - ok.size)
        obs = observed[s]
        if ok.size:
            mean = float(ok.mean())
            lo, hi = (float(v) for v in np.percentile(ok, [2.5, 97.5]))
        else:
            mean = lo = hi = None
        p = ppp_value(ok, obs) if (obs is not None and ok.size) else None
        rows.append(GofRow(s, obs, mean, lo, hi, p, n_sims, excluded))
    return GofReport(tuple(rows), n_sims, seed, arrays)
