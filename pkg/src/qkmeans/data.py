"""Datasets: synthetic blobs, CSV persistence, PCA and the elbow curve."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .cluster import ClusterConfig, kmeans_classical, wcss


class DataError(ValueError):
    pass


@dataclass
class Dataset:
    points: np.ndarray
    true_labels: np.ndarray | None = None
    centers: np.ndarray | None = None

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if self.true_labels is not None:
            self.true_labels = np.asarray(self.true_labels, dtype=int)
            if len(self.true_labels) != len(self.points):
                raise DataError(
                    f"{len(self.true_labels)} labels for {len(self.points)} points"
                )

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return len(self.points)


def gen_clusters(k: int, points_per: int, dim: int, variance: float, min_sep: float = 0.0,
                 seed: int = 0, box: tuple[float, float] = (0.0, 10.0)) -> Dataset:
    """Isotropic Gaussian blobs around k centers drawn uniformly in ``box``^dim.

    A center closer than ``min_sep`` to an accepted one is redrawn.
    """
    if k < 1 or points_per < 1 or dim < 1:
        raise DataError("k, points_per and dim must be >= 1")
    if variance < 0:
        raise DataError("variance must be >= 0")
    rng = np.random.default_rng(seed)
    lo, hi = box
    centers: list[np.ndarray] = []
    rejections = 0
    while len(centers) < k:
        c = rng.uniform(lo, hi, size=dim)
        if centers and np.min(np.linalg.norm(np.array(centers) - c, axis=1)) < min_sep:
            rejections += 1
            if rejections >= 1000 * k:
                raise DataError(
                    f"could not place {k} centers {min_sep} apart in {box}^{dim}"
                )
            continue
        centers.append(c)
    std = np.sqrt(variance)
    points = np.concatenate(
        [c + std * rng.standard_normal((points_per, dim)) for c in centers]
    )
    labels = np.repeat(np.arange(k), points_per)
    return Dataset(points, labels, np.array(centers))


def save_csv(dataset: Dataset, path) -> None:
    header = [f"f{i}" for i in range(dataset.dim)]
    has_labels = dataset.true_labels is not None
    if has_labels:
        header.append("label")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i, row in enumerate(dataset.points):
            cells = [repr(float(x)) for x in row]
            if has_labels:
                cells.append(str(int(dataset.true_labels[i])))
            writer.writerow(cells)


def load_csv(path) -> Dataset:
    """Read ``f0,...,f{d-1}[,label]`` rows written by :func:`save_csv`."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataError(f"{path}: empty file, expected a header row")
    header = [h.strip() for h in rows[0]]
    has_labels = bool(header) and header[-1] == "label"
    features = header[:-1] if has_labels else header
    if not features or features != [f"f{i}" for i in range(len(features))]:
        raise DataError(f"{path}: line 1: header must be f0,...,f{{d-1}}[,label], got {header}")
    points, labels = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise DataError(f"{path}: line {lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            points.append([float(x) for x in row[:len(features)]])
            if has_labels:
                labels.append(int(row[-1]))
        except ValueError as exc:
            raise DataError(f"{path}: line {lineno}: {exc}") from exc
    if not points:
        raise DataError(f"{path}: no data rows")
    return Dataset(np.array(points), np.array(labels) if has_labels else None)


def save_labels(labels, path, column: str = "label") -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([column])
        writer.writerows([[int(x)] for x in labels])


def load_labels(path) -> np.ndarray:
    """Labels from a one-column file or the ``label`` column of a dataset CSV."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if "label" not in header:
        raise DataError(f"{path}: no 'label' column")
    col = header.index("label")
    try:
        return np.array([int(r[col]) for r in rows[1:] if r])
    except (ValueError, IndexError) as exc:
        raise DataError(f"{path}: {exc}") from exc


@dataclass
class PCAModel:
    mean: np.ndarray
    components: np.ndarray
    explained_variance_ratio: np.ndarray

    def to_json(self) -> str:
        return json.dumps({
            "mean": self.mean.tolist(),
            "components": self.components.tolist(),
            "explained_variance_ratio": self.explained_variance_ratio.tolist(),
        }, indent=2)

    @classmethod
    def from_json(cls, text: str) -> PCAModel:
        d = json.loads(text)
        return cls(np.array(d["mean"], dtype=float), np.array(d["components"], dtype=float),
                   np.array(d["explained_variance_ratio"], dtype=float))


def pca_fit(dataset: Dataset, out_dim: int) -> PCAModel:
    """Top ``out_dim`` eigenvectors of the sample covariance."""
    x = dataset.points
    if not 1 <= out_dim <= min(dataset.dim, len(x)):
        raise DataError(f"out_dim must be in [1, {min(dataset.dim, len(x))}], got {out_dim}")
    mean = x.mean(axis=0)
    centered = x - mean
    cov = centered.T @ centered / max(len(x) - 1, 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = np.clip(eigvals[order], 0.0, None)
    eigvecs = eigvecs[:, order]
    total = eigvals.sum()
    if total <= 0:
        raise DataError("data has zero variance")
    components = eigvecs[:, :out_dim].T
    # fix the sign so the largest-magnitude entry of each component is positive
    pivots = np.argmax(np.abs(components), axis=1)
    signs = np.sign(components[np.arange(out_dim), pivots])
    components = components * signs[:, None]
    return PCAModel(mean, components, eigvals[:out_dim] / total)


def pca_transform(model: PCAModel, dataset: Dataset) -> Dataset:
    return Dataset((dataset.points - model.mean) @ model.components.T, dataset.true_labels)


def elbow_curve(dataset: Dataset, k_max: int, seed: int = 0, n_init: int = 5,
                max_iterations: int = 300) -> list[float]:
    """Best-of-``n_init`` classical WCSS for each k in 1..k_max."""
    n = len(dataset)
    if not 1 <= k_max <= n:
        raise DataError(f"k_max must be in [1, {n}]")
    curve = []
    for k in range(1, k_max + 1):
        best = np.inf
        for trial in range(n_init):
            cfg = ClusterConfig(k, max_iterations=max_iterations, seed=seed * 1000 + trial)
            run = kmeans_classical(dataset.points, cfg)
            best = min(best, wcss(dataset.points, run.labels, run.centroids))
        curve.append(float(best))
    return curve
