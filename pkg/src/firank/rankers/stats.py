"""Per-feature statistical and class-separability criteria."""

from __future__ import annotations

import math

import numpy as np
from scipy.stats import rankdata

from ..errors import InsufficientClass, InvalidValue

EPSILON = 1e-12

CRITERIA = ("ttest", "entropy", "bhattacharyya", "roc", "wilcoxon")


def split_by_class(values, labels) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(values, dtype=float)
    y = np.asarray(labels)
    return x[y == 0], x[y == 1]


def _tie_term(ranks_or_values) -> float:
    """sum(t**3 - t) over groups of tied values."""
    _, counts = np.unique(ranks_or_values, return_counts=True)
    counts = counts.astype(float)
    return float(np.sum(counts ** 3 - counts))


def mann_whitney_u(x0, x1) -> float:
    """U statistic of class 1 against class 0, midranks for ties.

    Equals the number of (x1 > x0) pairs plus half the tied pairs.
    """
    n1 = len(x1)
    r = rankdata(np.concatenate([x0, x1]))
    return float(r[len(x0):].sum() - n1 * (n1 + 1) / 2)


def separability_score(x0, x1, criterion: str, epsilon: float = EPSILON) -> float:
    """Two-class separability of one feature; larger means better separated.

    ``x0`` and ``x1`` are the feature values of class 0 and class 1. Gaussian
    criteria use sample (n-1) variances floored at ``epsilon``.
    """
    x0 = np.asarray(x0, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    if criterion not in CRITERIA:
        raise InvalidValue(f"unknown criterion {criterion!r}; expected one of {CRITERIA}")
    n0, n1 = x0.size, x1.size
    if n0 < 2 or n1 < 2:
        raise InsufficientClass(f"each class needs >= 2 samples, got {n0} and {n1}")

    if criterion in ("roc", "wilcoxon"):
        u = mann_whitney_u(x0, x1)
        if criterion == "roc":
            return abs(u / (n0 * n1) - 0.5)
        n = n0 + n1
        var = n0 * n1 / 12.0 * ((n + 1) - _tie_term(np.concatenate([x0, x1])) / (n * (n - 1)))
        return abs(u - n0 * n1 / 2.0) / math.sqrt(max(var, epsilon))

    m0, m1 = x0.mean(), x1.mean()
    v0 = max(x0.var(ddof=1), epsilon)
    v1 = max(x1.var(ddof=1), epsilon)
    dm2 = (m0 - m1) ** 2
    if criterion == "ttest":
        return math.sqrt(dm2) / math.sqrt(v0 / n0 + v1 / n1)
    if criterion == "entropy":
        # KL(p||q) + KL(q||p) for two Gaussians; the log terms cancel
        return (v0 + dm2) / (2 * v1) + (v1 + dm2) / (2 * v0) - 1.0
    # bhattacharyya
    return 0.25 * dm2 / (v0 + v1) + 0.5 * math.log((v0 + v1) / (2 * math.sqrt(v0 * v1)))


def _require_two_classes(values, labels):
    x0, x1 = split_by_class(values, labels)
    if x0.size == 0 or x1.size == 0:
        raise InsufficientClass("both classes must be present")
    return x0, x1


def kruskal_wallis_score(values, labels) -> float:
    """Tie-corrected Kruskal-Wallis H; 0 when every value is tied."""
    x0, x1 = _require_two_classes(values, labels)
    x = np.concatenate([x0, x1])
    n = x.size
    r = rankdata(x)
    r0, r1 = r[:x0.size].sum(), r[x0.size:].sum()
    h = 12.0 / (n * (n + 1)) * (r0 ** 2 / x0.size + r1 ** 2 / x1.size) - 3.0 * (n + 1)
    correction = 1.0 - _tie_term(x) / (n ** 3 - n)
    if correction <= 0:
        return 0.0
    return max(h / correction, 0.0)


def fisher_score(values, labels, epsilon: float = EPSILON) -> float:
    """Classical Fisher score: between-class over within-class scatter."""
    x0, x1 = _require_two_classes(values, labels)
    mu = np.concatenate([x0, x1]).mean()
    between = x0.size * (x0.mean() - mu) ** 2 + x1.size * (x1.mean() - mu) ** 2
    within = x0.size * x0.var() + x1.size * x1.var()
    return float(between / (within + epsilon))


def _gini_impurity(labels) -> float:
    if labels.size == 0:
        return 0.0
    p = labels.mean()
    return 1.0 - p ** 2 - (1 - p) ** 2


def equal_frequency_bins(values, bins: int) -> np.ndarray:
    """Bin ids from interior quantile edges; equal values always share a bin."""
    x = np.asarray(values, dtype=float)
    edges = np.quantile(x, np.linspace(0.0, 1.0, bins + 1)[1:-1])
    return np.searchsorted(edges, x, side="right")


def gini_score(values, labels, bins: int = 10) -> float:
    """Gini impurity reduction over an equal-frequency discretization."""
    if bins < 2:
        raise InvalidValue(f"gini needs >= 2 bins, got {bins}")
    y = np.asarray(labels, dtype=float)
    b = equal_frequency_bins(values, bins)
    child = 0.0
    for bin_id in np.unique(b):
        sel = y[b == bin_id]
        child += sel.size / y.size * _gini_impurity(sel)
    return float(_gini_impurity(y) - child)
