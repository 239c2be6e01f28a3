"""Bernoulli stochastic block model fitted by variational EM, with ICL selection."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import xlogy
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.cluster import KMeans
from sklearn.utils.validation import check_is_fitted

from ..exceptions import GraphSizeError, ValidationError
from .adjacency import AdjacencyMatrix, check_adjacency

__all__ = [
    "BlockModel",
    "FitConfig",
    "FitResult",
    "BernoulliSBM",
    "ICLSelector",
    "fit",
    "select_k",
    "canonicalize",
    "complete_loglik",
    "icl",
    "icl_penalty",
]

THETA_CLAMP = 1e-9


@dataclass(frozen=True, eq=False)
class BlockModel:
    """Group count, 0-based memberships, group proportions and block probabilities."""

    membership: np.ndarray
    pi: np.ndarray
    theta: np.ndarray
    labels: tuple = None

    def __post_init__(self):
        z = np.asarray(self.membership, dtype=np.int64)
        pi = np.asarray(self.pi, dtype=float)
        theta = np.asarray(self.theta, dtype=float)
        K = pi.shape[0]
        if theta.shape != (K, K):
            raise ValidationError(f"theta must be {K}x{K}, got {theta.shape}")
        if not np.allclose(theta, theta.T, rtol=0, atol=1e-12):
            raise ValidationError("theta must be symmetric")
        if np.any(theta < 0) or np.any(theta > 1):
            raise ValidationError("theta entries must lie in [0, 1]")
        if np.any(pi < 0) or abs(pi.sum() - 1) > 1e-9:
            raise ValidationError("pi must be a probability vector")
        if z.size and (z.min() < 0 or z.max() >= K):
            raise ValidationError("membership refers to a group outside 0..K-1")
        labels = self.labels
        if labels is None:
            labels = tuple(f"v{i + 1}" for i in range(z.size))
        object.__setattr__(self, "membership", z)
        object.__setattr__(self, "pi", pi)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "labels", tuple(labels))

    @property
    def K(self):
        return self.pi.shape[0]

    @property
    def sizes(self):
        return np.bincount(self.membership, minlength=self.K)

    def __eq__(self, other):
        if not isinstance(other, BlockModel):
            return NotImplemented
        return (
            self.labels == other.labels
            and np.array_equal(self.membership, other.membership)
            and np.array_equal(self.pi, other.pi)
            and np.array_equal(self.theta, other.theta)
        )

    __hash__ = None


@dataclass(frozen=True)
class FitConfig:
    tol: float = 1e-6
    max_iter: int = 500
    restarts: int = 20
    damping: float = 0.7
    refine: bool = True
    seed: int = 0


@dataclass(frozen=True, eq=False)
class FitResult:
    model: BlockModel
    icl: float
    complete_loglik: float
    loglik_trace: tuple
    restarts_used: int
    seed: int
    n_groups_requested: int
    tau: np.ndarray = None
    icl_by_k: dict = field(default_factory=dict)

    @property
    def K(self):
        return self.model.K


def _one_hot(z, K):
    Z = np.zeros((z.size, K))
    Z[np.arange(z.size), z] = 1.0
    return Z


def _block_counts(Y, z, K):
    """Edges and dyads per unordered block pair (diagonal: within-group)."""
    Z = _one_hot(z, K)
    E = Z.T @ Y @ Z
    E[np.diag_indices(K)] /= 2.0
    nk = Z.sum(axis=0)
    D = np.outer(nk, nk)
    D[np.diag_indices(K)] = nk * (nk - 1) / 2.0
    return E, D, nk


def _profile_loglik(E, D, nk, n):
    iu = np.triu_indices(E.shape[0])
    e, d = E[iu], D[iu]
    with np.errstate(divide="ignore", invalid="ignore"):
        theta = np.where(d > 0, e / np.where(d > 0, d, 1), 0.0)
    edges = xlogy(e, theta) + xlogy(d - e, 1.0 - theta)
    return float(xlogy(nk, nk / n).sum() + edges.sum())


def complete_loglik(Y, z) -> float:
    """Complete-data log-likelihood of a hard partition at its maximum-likelihood
    proportions and block probabilities."""
    Y = np.asarray(getattr(Y, "matrix", Y), dtype=float)
    z = np.asarray(z)
    K = int(z.max()) + 1 if z.size else 0
    E, D, nk = _block_counts(Y, z, K)
    return _profile_loglik(E, D, nk, Y.shape[0])


def icl_penalty(K: int, n: int) -> float:
    return K * (K + 1) / 4.0 * math.log(n * (n - 1) / 2.0) + (K - 1) / 2.0 * math.log(n)


def icl(Y, z) -> float:
    """Integrated classification likelihood of a hard partition.

    Empty groups are ignored: the penalty uses the number of occupied groups.
    """
    Y = getattr(Y, "matrix", Y)
    z = _compact(np.asarray(z))
    K = int(z.max()) + 1
    return complete_loglik(Y, z) - icl_penalty(K, Y.shape[0])


def _compact(z):
    _, inv = np.unique(z, return_inverse=True)
    return inv.reshape(z.shape)


# -- variational EM ---------------------------------------------------------


class _VEM:
    """Mean-field EM on one adjacency matrix for a fixed number of groups.

    ``A`` always denotes ``Y @ tau`` for the ``tau`` it travels with; it is
    passed around so each iteration needs a single product with ``Y``.
    """

    def __init__(self, Y, K, damping):
        self.Y = Y
        self.n = Y.shape[0]
        self.K = K
        self.damping = damping

    @staticmethod
    def _pair_sums(tau, A):
        S = tau.T @ A
        s = tau.sum(axis=0)
        T = np.outer(s, s) - tau.T @ tau
        return S, T

    def mstep(self, tau, A):
        S, T = self._pair_sums(tau, A)
        with np.errstate(divide="ignore", invalid="ignore"):
            theta = np.where(T > 0, S / np.where(T > 0, T, 1), 0.0)
        theta = (theta + theta.T) / 2.0
        return tau.mean(axis=0), theta

    @staticmethod
    def logs(pi, theta):
        th = np.clip(theta, THETA_CLAMP, 1 - THETA_CLAMP)
        return np.log(np.maximum(pi, 1e-300)), np.log(th), np.log1p(-th)

    def objective(self, tau, A, logs):
        logpi, L, M = logs
        S, T = self._pair_sums(tau, A)
        quad = 0.5 * np.sum(S * L + (T - S) * M)
        return float(quad + tau.sum(axis=0) @ logpi - np.sum(xlogy(tau, tau)))

    @staticmethod
    def _softmax(logits):
        e = np.exp(logits - logits.max(axis=-1, keepdims=True))
        return e / e.sum(axis=-1, keepdims=True)

    def estep(self, tau, A, logs, current):
        """One damped fixed-point update of ``tau`` that never lowers the objective."""
        logpi, L, M = logs
        s = tau.sum(axis=0)
        logits = logpi + A @ L + (s - tau - A) @ M
        new = tau + self.damping * (self._softmax(logits) - tau)
        A_new = self.Y @ new
        if self.objective(new, A_new, logs) >= current:
            return new, A_new
        # Simultaneous updates can overshoot; vertex-by-vertex updates are
        # coordinate ascent on a concave function of each row and cannot.
        tau = tau.copy()
        for i in range(self.n):
            a = self.Y[i] @ tau
            row = logpi + a @ L + (s - tau[i] - a) @ M
            step = self.damping * (self._softmax(row) - tau[i])
            tau[i] += step
            s += step
        return tau, self.Y @ tau

    def run(self, tau, tol, max_iter):
        A = self.Y @ tau
        logs = self.logs(*self.mstep(tau, A))
        J = self.objective(tau, A, logs)
        trace = [J]
        for _ in range(max_iter):
            tau, A = self.estep(tau, A, logs, J)
            logs = self.logs(*self.mstep(tau, A))
            J_new = self.objective(tau, A, logs)
            trace.append(J_new)
            if abs(J_new - J) < tol:
                break
            J = J_new
        return tau, trace


def _spectral_init(Y, K, seed):
    deg = Y.sum(axis=1)
    inv = np.zeros_like(deg)
    inv[deg > 0] = 1.0 / np.sqrt(deg[deg > 0])
    L = inv[:, None] * Y * inv[None, :]
    _, vecs = np.linalg.eigh(L)
    U = vecs[:, -K:]
    norms = np.linalg.norm(U, axis=1, keepdims=True)
    U = U / np.where(norms > 0, norms, 1.0)
    # KMeans only takes 32-bit seeds
    km = KMeans(n_clusters=K, n_init=4, random_state=seed % 2**32).fit(U)
    return km.labels_


def _profile_batch(E, D, nk, n):
    """``_profile_loglik`` over leading batch axes of (..., K, K) count arrays."""
    K = E.shape[-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        theta = np.where(D > 0, E / np.where(D > 0, D, 1), 0.0)
    f = (xlogy(E, theta) + xlogy(D - E, 1.0 - theta)) * np.triu(np.ones((K, K)))
    return f.sum(axis=(-1, -2)) + xlogy(nk, nk / n).sum(axis=-1)


def _classification_em(Y, z, K, max_iter=100):
    """Hard-assignment EM: reassign every vertex to its most likely group given
    the current estimates. Stops when the complete-data likelihood stalls."""
    best = complete_loglik(Y, z)
    for _ in range(max_iter):
        Z = _one_hot(z, K)
        C = Y @ Z
        E, D, nk = _block_counts(Y, z, K)
        with np.errstate(divide="ignore", invalid="ignore"):
            theta = np.where(D > 0, E / np.where(D > 0, D, 1), 0.0)
            logpi = np.log(nk / z.size)
        th = np.clip(theta, THETA_CLAMP, 1 - THETA_CLAMP)
        logits = logpi + C @ np.log(th) + (nk - Z - C) @ np.log1p(-th)
        z_new = np.argmax(logits, axis=1)
        if np.array_equal(z_new, z):
            break
        cl = complete_loglik(Y, z_new)
        if cl <= best + 1e-10:
            break
        z, best = z_new, cl
    return z


def _greedy_moves(Y, z, K):
    """Apply the best single-vertex move while it raises the complete-data
    log-likelihood. All (vertex, target group) moves are scored at once."""
    n = z.size
    z = z.copy()
    eye = np.eye(K)
    idx = np.arange(K)
    while True:
        Z = _one_hot(z, K)
        C = Y @ Z
        Ef = Z.T @ C  # within-group edges counted twice on the diagonal
        nk = Z.sum(axis=0)
        Ea = eye[z]
        Ef0 = Ef - Ea[:, :, None] * C[:, None, :] - C[:, :, None] * Ea[:, None, :]
        nk0 = nk - Ea
        Eb = (Ef0[:, None] + eye[None, :, :, None] * C[:, None, None, :]
              + C[:, None, :, None] * eye[None, :, None, :])
        nkb = nk0[:, None, :] + eye[None]
        Eb[..., idx, idx] /= 2.0
        Db = nkb[..., :, None] * nkb[..., None, :]
        Db[..., idx, idx] = nkb * (nkb - 1) / 2.0
        gain = _profile_batch(Eb, Db, nkb, n) - complete_loglik(Y, z)
        gain[np.arange(n), z] = -np.inf
        i, b = np.unravel_index(np.argmax(gain), gain.shape)
        if gain[i, b] <= 1e-10:
            return z
        z[i] = b


def _refine(Y, z, K):
    return _greedy_moves(Y, _classification_em(Y, z, K), K)


def _hard_model(Y, z, labels):
    z = _compact(z)
    K = int(z.max()) + 1
    E, D, nk = _block_counts(Y, z, K)
    with np.errstate(divide="ignore", invalid="ignore"):
        theta = np.where(D > 0, E / np.where(D > 0, D, 1), 0.0)
    return BlockModel(z, nk / z.size, theta, labels)


def _single_block(Y, labels):
    n = Y.shape[0]
    # same expression as the observed density, so the estimate matches it exactly
    dens = float(Y.sum()) / (n * (n - 1)) if n > 1 else 0.0
    return BlockModel(np.zeros(n, dtype=np.int64), np.ones(1), np.array([[dens]]), labels)


def fit(y, k: int, cfg: FitConfig | None = None) -> FitResult:
    """Fit a ``k``-group Bernoulli SBM; keep the best of ``cfg.restarts`` runs.

    Restart 0 starts from spectral clustering of the normalised adjacency, the
    rest from uniformly random hard assignments. Restart ``r`` draws from seed
    ``cfg.seed + r``. Runs are ranked by the complete-data log-likelihood of
    their hard assignment, then the winner is canonicalised.
    """
    cfg = cfg or FitConfig()
    y = check_adjacency(y)
    n = y.n
    if k < 1:
        raise ValidationError("k must be >= 1")
    if n < k:
        raise GraphSizeError(f"cannot fit {k} groups to {n} vertices")
    if n < 2:
        raise GraphSizeError("need at least 2 vertices")
    Y = y.matrix.astype(float)

    if k == 1:
        model = _single_block(Y, y.labels)
        cl = complete_loglik(Y, model.membership)
        vem = _VEM(Y, 1, cfg.damping)
        tau = np.ones((n, 1))
        A = Y @ tau
        J = vem.objective(tau, A, vem.logs(*vem.mstep(tau, A)))
        return FitResult(model, cl - icl_penalty(1, n), cl, (J,), 1, cfg.seed, 1, tau)

    vem = _VEM(Y, k, cfg.damping)
    best = None
    for r in range(cfg.restarts):
        rng = np.random.default_rng(cfg.seed + r)
        if r == 0:
            z0 = _spectral_init(Y, k, cfg.seed)
        else:
            z0 = rng.integers(0, k, size=n)
        if cfg.refine:
            z0 = _classification_em(Y, z0, k)
        tau, trace = vem.run(_one_hot(z0, k), cfg.tol, cfg.max_iter)
        z = np.argmax(tau, axis=1)
        if cfg.refine:
            z = _refine(Y, z, k)
        cl = complete_loglik(Y, _compact(z))
        if best is None or cl > best[0] + 1e-10:
            best = (cl, z, tau, trace)
    cl, z, tau, trace = best
    model = canonicalize(_hard_model(Y, z, y.labels))
    return FitResult(
        model,
        cl - icl_penalty(model.K, n),
        cl,
        tuple(trace),
        cfg.restarts,
        cfg.seed,
        k,
        tau,
    )


def select_k(y, k_range, cfg: FitConfig | None = None) -> FitResult:
    """Fit every group count in ``k_range`` (inclusive ``(lo, hi)`` or an
    iterable) and return the fit with the largest ICL, preferring fewer groups
    on ties."""
    cfg = cfg or FitConfig()
    y = check_adjacency(y)
    ks = _k_values(k_range)
    if not ks:
        raise ValidationError("k_range is empty")
    if ks[0] < 1 or ks[-1] > y.n:
        raise ValidationError(f"k_range must lie within [1, {y.n}], got {ks[0]}..{ks[-1]}")
    fits = [fit(y, k, cfg) for k in ks]
    best = max(fits, key=lambda f: (f.icl, -f.K, -f.n_groups_requested))
    return replace(best, icl_by_k={f.n_groups_requested: f.icl for f in fits})


def _k_values(k_range):
    if isinstance(k_range, tuple) and len(k_range) == 2:
        lo, hi = k_range
        return list(range(int(lo), int(hi) + 1))
    return sorted(int(k) for k in k_range)


def canonicalize(model: BlockModel) -> BlockModel:
    """Renumber groups by size (largest first); equal sizes are ordered by
    their smallest member label. ``membership``, ``pi`` and ``theta`` are
    permuted together."""
    z = model.membership
    sizes = model.sizes
    first = []
    for g in range(model.K):
        members = [model.labels[i] for i in np.flatnonzero(z == g)]
        first.append(min(members) if members else None)
    order = sorted(
        range(model.K),
        key=lambda g: (-sizes[g], first[g] is None, first[g] or "", g),
    )
    new_of_old = np.empty(model.K, dtype=np.int64)
    new_of_old[order] = np.arange(model.K)
    return BlockModel(
        new_of_old[z],
        model.pi[order],
        model.theta[np.ix_(order, order)],
        model.labels,
    )


# -- estimator API ----------------------------------------------------------


class BernoulliSBM(ClusterMixin, BaseEstimator):
    """Bernoulli stochastic block model for undirected binary networks.

    ``fit`` takes the network itself (adjacency array, ``networkx.Graph`` or
    :class:`AdjacencyMatrix`), not a feature matrix. ``labels_`` holds the
    canonical 0-based group of each vertex.

    Parameters
    ----------
    n_groups : int
        Number of groups requested. Groups left empty are dropped, so
        ``n_groups_`` can be smaller.
    restarts : int
        Initialisations tried; the best complete-data likelihood is kept.
    tol, max_iter : float, int
        Stopping rule on the change of the variational objective.
    damping : float
        Step size towards the mean-field fixed point at each E-step.
    refine : bool
        Polish each run's hard assignment with greedy vertex moves.
    random_state : int
        Base seed; restart ``r`` uses ``random_state + r``.
    """

    def __init__(self, n_groups=2, restarts=20, tol=1e-6, max_iter=500, damping=0.7,
                 refine=True, random_state=0):
        self.n_groups = n_groups
        self.restarts = restarts
        self.tol = tol
        self.max_iter = max_iter
        self.damping = damping
        self.refine = refine
        self.random_state = random_state

    def _config(self):
        return FitConfig(self.tol, self.max_iter, self.restarts, self.damping, self.refine,
                         int(self.random_state or 0))

    def _store(self, result):
        self.fit_result_ = result
        self.block_model_ = result.model
        self.labels_ = result.model.membership
        self.n_groups_ = result.model.K
        self.pi_ = result.model.pi
        self.theta_ = result.model.theta
        self.icl_ = result.icl
        self.complete_loglik_ = result.complete_loglik
        self.loglik_trace_ = np.asarray(result.loglik_trace)
        self.vertex_labels_ = result.model.labels
        return self

    def fit(self, Y, y=None):
        return self._store(fit(check_adjacency(Y), self.n_groups, self._config()))

    def sample(self, n=None, seed=0):
        """Simulate a network from the fitted model."""
        from .simulate import simulate

        check_is_fitted(self, "block_model_")
        return simulate(self.block_model_, n or len(self.labels_), seed)


class ICLSelector(BernoulliSBM):
    """Choose the number of groups by maximising ICL over ``k_range``.

    After fitting, ``icl_path_`` maps each requested group count to its ICL and
    the fitted-model attributes describe the selected model.
    """

    def __init__(self, k_range=(1, 6), restarts=20, tol=1e-6, max_iter=500, damping=0.7,
                 refine=True, random_state=0):
        self.k_range = k_range
        self.restarts = restarts
        self.tol = tol
        self.max_iter = max_iter
        self.damping = damping
        self.refine = refine
        self.random_state = random_state

    def fit(self, Y, y=None):
        result = select_k(check_adjacency(Y), self.k_range, self._config())
        self.icl_path_ = dict(result.icl_by_k)
        return self._store(result)
