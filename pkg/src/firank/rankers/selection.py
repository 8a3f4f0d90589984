"""Rankings that come from a selection order: CFS forward search and the lasso path."""

from __future__ import annotations

import math

import numpy as np

from ..data import Dataset, Ranking
from ..errors import InvalidGrid
from .neighbors import _zscore


def abs_correlations(dataset: Dataset) -> tuple[np.ndarray, np.ndarray]:
    """|Pearson| feature-label vector and feature-feature matrix.

    Zero-variance columns correlate 0 with everything.
    """
    z = _zscore(np.asarray(dataset.features, dtype=float))
    y = np.asarray(dataset.labels, dtype=float)[:, None]
    zy = _zscore(y)[:, 0]
    n = z.shape[0]
    r_cf = np.abs(z.T @ zy) / n
    r_ff = np.abs(z.T @ z) / n
    np.fill_diagonal(r_ff, 1.0)
    return np.clip(r_cf, 0.0, 1.0), np.clip(r_ff, 0.0, 1.0)


def cfs_merit(subset, r_cf: np.ndarray, r_ff: np.ndarray) -> float:
    s = list(subset)
    k = len(s)
    mean_cf = r_cf[s].mean()
    if k == 1:
        return float(mean_cf)
    block = r_ff[np.ix_(s, s)]
    mean_ff = (block.sum() - np.trace(block)) / (k * (k - 1))
    return float(k * mean_cf / math.sqrt(k + k * (k - 1) * mean_ff))


def cfs_ranking(dataset: Dataset, tol: float = 1e-12) -> Ranking:
    """Greedy forward CFS; inclusion order is the ranking.

    Once no candidate raises the merit, the rest follow by individual
    feature-label correlation. Scores are the |Pearson| feature-label values.
    """
    r_cf, r_ff = abs_correlations(dataset)
    d = r_cf.size
    chosen: list[int] = []
    current = 0.0
    remaining = list(range(d))
    while remaining:
        merits = np.array([cfs_merit(chosen + [j], r_cf, r_ff) for j in remaining])
        best = merits.max()
        if best <= current + tol:
            break
        pick = remaining[int(np.flatnonzero(merits >= best - tol)[0])]
        chosen.append(pick)
        remaining.remove(pick)
        current = best
    remaining.sort(key=lambda j: (-r_cf[j], j))
    order = [j + 1 for j in chosen + remaining]
    return Ranking("cfs", tuple(order), r_cf, dataset.feature_names)


def lasso_lambda_max(z: np.ndarray, yc: np.ndarray) -> float:
    return float(np.max(np.abs(z.T @ yc)) / z.shape[0])


def lasso_grid(lam_max: float, count: int = 100, ratio: float = 1e-4) -> np.ndarray:
    if count == 1:
        return np.array([lam_max])
    return np.geomspace(lam_max, lam_max * ratio, count)


ENTRY_RTOL = 1e-12


def lasso_path(z: np.ndarray, yc: np.ndarray, grid, tol: float = 1e-10,
               max_sweeps: int = 10_000) -> np.ndarray:
    """Coefficients along ``grid`` for (1/2n)||y - Zb||^2 + lam*||b||_1.

    Warm-started cyclic coordinate descent; returns a (len(grid), p) array.
    """
    n, p = z.shape
    col_sq = (z ** 2).sum(axis=0) / n
    b = np.zeros(p)
    r = yc.astype(float).copy()
    path = np.zeros((len(grid), p))
    for g, lam in enumerate(grid):
        for _ in range(max_sweeps):
            delta = 0.0
            for j in range(p):
                if col_sq[j] == 0:
                    continue
                rho = z[:, j] @ r / n + col_sq[j] * b[j]
                excess = abs(rho) - lam
                # an excess at round-off level (e.g. at lam = lambda_max) is zero
                new = np.sign(rho) * excess / col_sq[j] if excess > ENTRY_RTOL * lam else 0.0
                if new != b[j]:
                    r -= z[:, j] * (new - b[j])
                    delta = max(delta, abs(new - b[j]))
                    b[j] = new
            if delta < tol:
                break
        path[g] = b
    return path


def lasso_ranking(dataset: Dataset, grid=None, count: int = 100, ratio: float = 1e-4) -> Ranking:
    """Order features by when they first enter the lasso path.

    ``grid`` (absolute penalties, strictly decreasing) overrides the default
    log-spaced grid from lambda_max down to lambda_max*ratio. Features entering
    at the same penalty, and features that never enter, are ordered by
    |coefficient| at the last penalty, then by index. Scores are the entry
    penalty (0 for features that never enter).
    """
    z = _zscore(np.asarray(dataset.features, dtype=float))
    y = np.asarray(dataset.labels, dtype=float)
    yc = y - y.mean()
    lam_max = lasso_lambda_max(z, yc)
    if grid is None:
        if count < 1 or not 0 < ratio < 1:
            raise InvalidGrid(f"grid needs count >= 1 and 0 < ratio < 1, got {count}, {ratio}")
        grid = lasso_grid(lam_max, count, ratio) if lam_max > 0 else np.zeros(0)
    else:
        grid = np.asarray(grid, dtype=float)
        if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) >= 0) or np.any(grid < 0):
            raise InvalidGrid("penalty grid must be non-empty, non-negative and strictly decreasing")

    d = z.shape[1]
    if grid.size:
        path = lasso_path(z, yc, grid)
        active = path != 0
        entered = active.any(axis=0)
        first = np.where(entered, active.argmax(axis=0), grid.size)
        final = np.abs(path[-1])
        scores = np.where(entered, grid[np.minimum(first, grid.size - 1)], 0.0)
    else:
        first = np.zeros(d, dtype=int)
        final = np.zeros(d)
        scores = np.zeros(d)
    order = sorted(range(d), key=lambda j: (first[j], -final[j], j))
    return Ranking("lasso", tuple(j + 1 for j in order), scores, dataset.feature_names)
