"""k-means with classical or swap-test distances, and nearest-centroid prediction."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .backend import BackendError, BackendProfile
from .dist import EstimatorConfig, distance_matrix, job_seed


class InfeasibleSeparation(ValueError):
    """No set of k points is epsilon-separated within the rejection budget."""


class NoSeedFound(RuntimeError):
    pass


@dataclass(frozen=True)
class ClusterConfig:
    k: int
    epsilon: float = 0.0
    max_iterations: int = 10
    convergence_tol: float = 1e-4
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.convergence_tol <= 0:
            raise ValueError("convergence_tol must be > 0")


@dataclass
class ClusteringRun:
    labels: np.ndarray
    centroids: np.ndarray
    iterations: int
    history: list = field(default_factory=list)
    converged: bool = False
    initial_centroids: np.ndarray | None = None

    def to_dict(self) -> dict:
        return {
            "labels": self.labels.tolist(),
            "centroids": self.centroids.tolist(),
            "initial_centroids": None if self.initial_centroids is None
            else self.initial_centroids.tolist(),
            "iterations": self.iterations,
            "converged": self.converged,
            "history": [h.tolist() for h in self.history],
        }


def init_centroids(data, k: int, epsilon: float = 0.0, seed: int = 0) -> np.ndarray:
    """Draw k data points, rejecting any within ``epsilon`` of one already chosen."""
    data = np.asarray(data, dtype=float)
    n = len(data)
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= {n} points, got k={k}")
    rng = np.random.default_rng(seed)
    chosen: list[int] = []
    rejections = 0
    while len(chosen) < k:
        remaining = np.setdiff1d(np.arange(n), chosen)
        idx = int(rng.choice(remaining))
        if chosen and np.min(np.linalg.norm(data[chosen] - data[idx], axis=1)) < epsilon:
            rejections += 1
            if rejections >= 1000 * k:
                raise InfeasibleSeparation(
                    f"could not place {k} centroids {epsilon} apart "
                    f"after {rejections} rejections"
                )
            continue
        chosen.append(idx)
    return data[chosen].copy()


def assign(dists) -> np.ndarray:
    """Nearest centroid per row; ties go to the lowest index."""
    dists = np.asarray(dists, dtype=float)
    if dists.size == 0:
        raise ValueError("empty distance matrix")
    return np.argmin(dists, axis=1)


def update_centroids(data, labels, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Cluster means with empty clusters dropped.

    Returns ``(centroids, labels)`` where labels are re-indexed densely in
    the original cluster order.
    """
    data = np.asarray(data, dtype=float)
    labels = np.asarray(labels)
    if labels.size and (labels.min() < 0 or labels.max() >= k):
        raise ValueError(f"labels must lie in [0, {k})")
    live = [c for c in range(k) if np.any(labels == c)]
    if not live:
        raise ValueError("all clusters are empty")
    remap = np.full(k, -1)
    remap[live] = np.arange(len(live))
    centroids = np.array([data[labels == c].mean(axis=0) for c in live])
    return centroids, remap[labels]


def wcss(data, labels, centroids) -> float:
    data = np.asarray(data, dtype=float)
    diff = data - np.asarray(centroids)[np.asarray(labels)]
    return float(np.sum(diff * diff))


def _lloyd(data, cfg: ClusterConfig, init, distances) -> ClusteringRun:
    data = np.asarray(data, dtype=float)
    if init is None:
        init = init_centroids(data, cfg.k, cfg.epsilon, cfg.seed)
    centroids = np.array(init, dtype=float)
    history = [centroids.copy()]
    converged = False
    labels = None
    iterations = 0
    for it in range(cfg.max_iterations):
        try:
            dists = distances(centroids, it)
        except BackendError as exc:
            raise type(exc)(f"iteration {it}: {exc}") from exc
        labels = assign(dists)
        new, labels = update_centroids(data, labels, len(centroids))
        iterations += 1
        history.append(new.copy())
        same_count = len(new) == len(centroids)
        moved = np.max(np.linalg.norm(new - centroids, axis=1)) if same_count else np.inf
        centroids = new
        if moved < cfg.convergence_tol:
            converged = True
            break
    return ClusteringRun(labels, centroids, iterations, history, converged,
                         np.array(init, dtype=float))


def kmeans_classical(data, cfg: ClusterConfig, init=None) -> ClusteringRun:
    """Lloyd iterations on exact squared Euclidean distances."""
    data = np.asarray(data, dtype=float)

    def distances(centroids, _it):
        diff = data[:, None, :] - centroids[None, :, :]
        return np.einsum("ijk,ijk->ij", diff, diff)

    return _lloyd(data, cfg, init, distances)


def kmeans_quantum(data, cfg: ClusterConfig, profile: BackendProfile | None = None,
                   init=None) -> ClusteringRun:
    """Lloyd iterations with every point-centroid distance from a swap test.

    All circuits of one iteration go out together, split into as few jobs
    as the profile allows; ``cfg.estimator.workers`` switches to one request
    per circuit.
    """
    data = np.asarray(data, dtype=float)

    def distances(centroids, it):
        return distance_matrix(data, centroids, cfg.estimator, profile,
                               job_seed(cfg.seed, it))

    return _lloyd(data, cfg, init, distances)


def nn_classify(points, centroids, estimator: EstimatorConfig,
                profile: BackendProfile | None = None, seed: int = 0) -> np.ndarray:
    """One assignment pass against fixed centroids."""
    centroids = np.asarray(centroids, dtype=float)
    if centroids.size == 0:
        raise ValueError("no centroids")
    return assign(distance_matrix(points, centroids, estimator, profile, seed))


def classical_nn(points, centroids) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    centroids = np.asarray(centroids, dtype=float)
    diff = points[:, None, :] - centroids[None, :, :]
    return assign(np.einsum("ijk,ijk->ij", diff, diff))


def seed_search(data, k: int, iteration_budget: int, seeds_to_try: int, epsilon: float = 0.0,
                first_seed: int = 0, convergence_tol: float = 1e-4) -> tuple[int, np.ndarray]:
    """First seed whose classical run converges within ``iteration_budget``."""
    if seeds_to_try < 1:
        raise ValueError("seeds_to_try must be >= 1")
    for seed in range(first_seed, first_seed + seeds_to_try):
        cfg = ClusterConfig(k, epsilon, iteration_budget, convergence_tol, seed=seed)
        try:
            run = kmeans_classical(data, cfg)
        except InfeasibleSeparation:
            continue
        if run.converged:
            return seed, run.initial_centroids
    raise NoSeedFound(
        f"no seed in [{first_seed}, {first_seed + seeds_to_try}) converged "
        f"within {iteration_budget} iterations"
    )
