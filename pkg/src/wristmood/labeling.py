"""Valence-arousal clustering: seeded k-means (k-means++ init, Lloyd
iterations) and agreement between the k=2 clusters and the binary mood
labels."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import BinaryMood
from .errors import DegenerateInputError, SpecError


@dataclass(frozen=True)
class VAPoint:
    valence: int
    arousal: int
    mood: BinaryMood


@dataclass(frozen=True)
class ClusterModel:
    centroids: np.ndarray        # shape (k, 2)
    assignments: np.ndarray      # shape (n,)
    inertia: float
    inertia_history: tuple[float, ...]


def _assign(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    d2 = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    return d2.argmin(axis=1)


def _inertia(points: np.ndarray, centroids: np.ndarray, assign: np.ndarray) -> float:
    return float(((points - centroids[assign]) ** 2).sum())


def _kmeanspp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    centroids = np.empty((k, points.shape[1]))
    centroids[0] = points[rng.integers(n)]
    for j in range(1, k):
        d2 = ((points[:, None, :] - centroids[None, :j, :]) ** 2).sum(axis=2).min(axis=1)
        total = d2.sum()
        if total == 0:
            centroids[j] = points[rng.integers(n)]
        else:
            centroids[j] = points[rng.choice(n, p=d2 / total)]
    return centroids


def kmeans(points: Sequence[Sequence[float]], k: int, seed: int,
           tol: float = 1e-6, max_iter: int = 300) -> ClusterModel:
    """Lloyd's algorithm with k-means++ seeding. Deterministic given the seed.
    An emptied cluster is reseeded at the point farthest from its assigned
    centroid."""
    pts = np.asarray(points, dtype=float)
    if k < 1:
        raise SpecError("k must be >= 1")
    if len(np.unique(pts, axis=0)) < k:
        raise DegenerateInputError(f"need at least {k} distinct points")
    rng = np.random.default_rng(seed)
    centroids = _kmeanspp_init(pts, k, rng)
    history: list[float] = []
    assign = _assign(pts, centroids)
    for _ in range(max_iter):
        new_centroids = centroids.copy()
        for j in range(k):
            mask = assign == j
            if mask.any():
                new_centroids[j] = pts[mask].mean(axis=0)
            else:
                # reseed at the point currently worst-served
                d2 = ((pts - centroids[assign]) ** 2).sum(axis=1)
                new_centroids[j] = pts[d2.argmax()]
        assign = _assign(pts, new_centroids)
        history.append(_inertia(pts, new_centroids, assign))
        movement = np.abs(new_centroids - centroids).max()
        centroids = new_centroids
        if movement < tol:
            break
    return ClusterModel(centroids=centroids, assignments=assign,
                        inertia=history[-1], inertia_history=tuple(history))


def cluster_label_agreement(model: ClusterModel, moods: Sequence[BinaryMood]) -> float:
    """Best matching fraction over the two cluster->mood bijections (k=2
    only). Always >= 0.5."""
    if model.centroids.shape[0] != 2:
        raise SpecError("agreement is defined for k = 2")
    if len(moods) != len(model.assignments):
        raise SpecError("assignments and moods lengths differ")
    mood_idx = np.array([0 if m == BinaryMood.PLEASANT else 1 for m in moods])
    match_a = float(np.mean(model.assignments == mood_idx))
    return max(match_a, 1.0 - match_a)
