"""Neighbourhood-based feature weights: ReliefF and the Laplacian score."""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist

from ..data import Dataset
from ..errors import InsufficientClass, InsufficientSamples
from .stats import EPSILON


def _minmax(x: np.ndarray) -> np.ndarray:
    lo, hi = x.min(axis=0), x.max(axis=0)
    span = hi - lo
    out = np.zeros_like(x)
    ok = span > 0
    out[:, ok] = (x[:, ok] - lo[ok]) / span[ok]
    return out


def _zscore(x: np.ndarray) -> np.ndarray:
    mu = x.mean(axis=0)
    sd = x.std(axis=0)
    out = np.zeros_like(x)
    ok = sd > EPSILON
    out[:, ok] = (x[:, ok] - mu[ok]) / sd[ok]
    return out


def nearest_weights(dist: np.ndarray, k: int) -> np.ndarray:
    """Weights selecting the k nearest candidates, ties at the k-th distance shared.

    Candidates strictly closer than the k-th distance get weight 1; those tied
    with it split the remaining slots equally. The result does not depend on
    candidate order.
    """
    w = np.zeros(dist.size)
    if dist.size == 0:
        return w
    if dist.size <= k:
        w[:] = 1.0
        return w
    kth = np.partition(dist, k - 1)[k - 1]
    closer = dist < kth
    tied = dist == kth
    w[closer] = 1.0
    w[tied] = (k - closer.sum()) / tied.sum()
    return w


def relieff_weights(dataset: Dataset, k: int = 10) -> np.ndarray:
    """Deterministic ReliefF over every sample.

    Features are min-max normalized and neighbours found by Manhattan
    distance. Same-class samples identical to the query are not counted as
    hits, so duplicating rows leaves the weights unchanged (for k=1, or with k
    doubled).
    """
    x = _minmax(np.asarray(dataset.features, dtype=float))
    y = np.asarray(dataset.labels)
    n, d = x.shape
    classes, counts = np.unique(y, return_counts=True)
    if classes.size < 2:
        raise InsufficientClass("relieff needs both classes")
    if counts.min() <= k:
        raise InsufficientClass(f"each class needs more than k={k} samples, got {counts.tolist()}")
    prior = dict(zip(classes.tolist(), counts / n))

    dist = cdist(x, x, metric="cityblock")
    weights = np.zeros(d)
    for i in range(n):
        diff = np.abs(x - x[i])
        same = (y == y[i]) & (dist[i] > 0)
        if same.any():
            w = nearest_weights(dist[i, same], k)
            weights -= w @ diff[same] / w.sum()
        for c in classes:
            if c == y[i]:
                continue
            other = y == c
            w = nearest_weights(dist[i, other], k)
            scale = prior[c] / (1.0 - prior[y[i]])
            weights += scale * (w @ diff[other]) / w.sum()
    return weights / n


def knn_graph(x: np.ndarray, k: int) -> np.ndarray:
    """Boolean adjacency of the k-nearest-neighbour graph, symmetrized by union.

    Every point at distance <= the k-th neighbour distance is included, which
    keeps the graph independent of sample order.
    """
    n = x.shape[0]
    if n <= k:
        raise InsufficientSamples(f"kNN graph needs n > k, got n={n}, k={k}")
    d2 = cdist(x, x, metric="sqeuclidean")
    np.fill_diagonal(d2, np.inf)
    kth = np.partition(d2, k - 1, axis=1)[:, k - 1]
    adj = d2 <= kth[:, None]
    np.fill_diagonal(adj, False)
    return adj | adj.T


def laplacian_scores(dataset: Dataset, k: int = 5, t: float | None = None,
                     epsilon: float = EPSILON) -> np.ndarray:
    """Laplacian score per feature (smaller preserves locality better).

    Features whose degree-weighted variance vanishes (constants) get +inf so
    that they rank last.
    """
    x = _zscore(np.asarray(dataset.features, dtype=float))
    n = x.shape[0]
    adj = knn_graph(x, k)
    d2 = cdist(x, x, metric="sqeuclidean")
    if t is None:
        t = d2.sum() / (n * (n - 1))
        if t <= 0:
            t = 1.0
    W = np.where(adj, np.exp(-d2 / t), 0.0)
    deg = W.sum(axis=1)
    L = np.diag(deg) - W
    total = deg.sum()

    scores = np.empty(x.shape[1])
    for j in range(x.shape[1]):
        f = x[:, j]
        ft = f - (f @ deg) / total
        spread = ft @ (deg * ft)
        if spread / total <= epsilon:
            scores[j] = np.inf
        else:
            scores[j] = (ft @ L @ ft) / (spread + epsilon)
    return scores
