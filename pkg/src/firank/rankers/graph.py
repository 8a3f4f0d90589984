"""Feature-graph rankers: eigenvector centrality (EC-FS) and Inf-FS."""

from __future__ import annotations

import numpy as np
from scipy.stats import rankdata

from ..data import Dataset, Ranking, order_by_scores
from ..errors import ConvergenceFailure, InvalidValue
from .stats import EPSILON, fisher_score


def spearman_matrix(x: np.ndarray) -> np.ndarray:
    """Spearman correlation between columns; constant columns correlate 0."""
    r = np.apply_along_axis(rankdata, 0, np.asarray(x, dtype=float))
    r -= r.mean(axis=0)
    norm = np.sqrt((r ** 2).sum(axis=0))
    ok = norm > EPSILON
    r[:, ok] /= norm[ok]
    r[:, ~ok] = 0.0
    rho = r.T @ r
    rho = (rho + rho.T) / 2
    np.fill_diagonal(rho, 1.0)
    return np.clip(rho, -1.0, 1.0)


def feature_affinity(dataset: Dataset, alpha: float = 0.5, epsilon: float = EPSILON) -> np.ndarray:
    """d x d affinity mixing Fisher relevance and Spearman non-redundancy.

    A[i, j] = alpha * max(s_i, s_j) + (1 - alpha) * (1 - |rho_ij|), with s the
    min-max normalized Fisher scores (all 0 when every score is equal).
    """
    if not 0.0 <= alpha <= 1.0:
        raise InvalidValue(f"alpha must lie in [0, 1], got {alpha}")
    x = np.asarray(dataset.features, dtype=float)
    s = np.array([fisher_score(x[:, j], dataset.labels, epsilon) for j in range(x.shape[1])])
    span = s.max() - s.min()
    s_hat = (s - s.min()) / span if span > 0 else np.zeros_like(s)
    A = alpha * np.maximum.outer(s_hat, s_hat) + (1 - alpha) * (1 - np.abs(spearman_matrix(x)))
    np.fill_diagonal(A, 0.0)
    return np.clip((A + A.T) / 2, 0.0, None)


def perron_vector(A: np.ndarray, tol: float = 1e-10, max_iter: int = 10_000) -> tuple[np.ndarray, float]:
    """Dominant eigenpair of a symmetric non-negative matrix by power iteration.

    The iteration runs on A + sI with s = half the largest row sum, which
    removes the period-2 oscillation of bipartite graphs without changing the
    eigenvectors. The vector is non-negative with unit 1-norm.
    """
    A = np.asarray(A, dtype=float)
    d = A.shape[0]
    v = np.full(d, 1.0 / d)
    rowmax = A.sum(axis=1).max() if d else 0.0
    if rowmax <= 0:
        return v, 0.0
    B = A + 0.5 * rowmax * np.eye(d)
    for _ in range(max_iter):
        w = B @ v
        w /= w.sum()
        if np.abs(w - v).sum() < tol:
            v = w
            break
        v = w
    else:
        raise ConvergenceFailure(f"power iteration did not converge in {max_iter} iterations")
    rho = float(v @ A @ v / (v @ v))
    return v, rho


def ecfs_ranking(dataset: Dataset, alpha: float = 0.5) -> Ranking:
    A = feature_affinity(dataset, alpha)
    centrality, _ = perron_vector(A)
    return Ranking("ecfs", order_by_scores(centrality), centrality, dataset.feature_names)


def inffs_energies(A: np.ndarray, factor: float = 0.9) -> np.ndarray:
    """Row sums of S = (I - rA)^-1 - I with r = factor / rho(A)."""
    A = np.asarray(A, dtype=float)
    d = A.shape[0]
    _, rho = perron_vector(A)
    if rho <= 0:
        return np.zeros(d)
    r = factor / rho
    S = np.linalg.solve(np.eye(d) - r * A, np.eye(d)) - np.eye(d)
    return S.sum(axis=1)


def inffs_ranking(dataset: Dataset, alpha: float = 0.5) -> Ranking:
    energy = inffs_energies(feature_affinity(dataset, alpha))
    return Ranking("inffs", order_by_scores(energy), energy, dataset.feature_names)
