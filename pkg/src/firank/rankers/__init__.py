"""Fourteen feature-importance rankers behind :func:`rank`.

Method identifiers::

    ttest  entropy  bhattacharyya  roc  wilcoxon  relieff  lasso
    fisher  gini  kruskal_wallis  laplacian  cfs  ecfs  inffs

``fisher`` is the classical per-feature Fisher score, not the generalized
(quadratically constrained) variant. Every method breaks ties by ascending
feature index. The Laplacian score ranks ascending; everything else descending.

New methods plug in by adding a :class:`Method` entry to :data:`METHODS`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..data import Dataset, Ranking, order_by_scores
from ..errors import InsufficientClass, InvalidValue, UnknownMethod
from .graph import ecfs_ranking, feature_affinity, inffs_energies, inffs_ranking, perron_vector
from .neighbors import knn_graph, laplacian_scores, nearest_weights, relieff_weights
from .selection import cfs_merit, cfs_ranking, lasso_path, lasso_ranking
from .stats import (
    CRITERIA,
    EPSILON,
    fisher_score,
    gini_score,
    kruskal_wallis_score,
    mann_whitney_u,
    separability_score,
    split_by_class,
)


@dataclass(frozen=True)
class MethodParams:
    relieff_k: int = 10
    lap_k: int = 5
    lap_t: float | None = None  # None: mean squared pairwise distance
    gini_bins: int = 10
    lasso_count: int = 100
    lasso_ratio: float = 1e-4
    graph_alpha: float = 0.5
    epsilon: float = EPSILON

    def __post_init__(self):
        for name in ("relieff_k", "lap_k", "gini_bins", "lasso_count"):
            if getattr(self, name) < 1:
                raise InvalidValue(f"{name} must be >= 1")
        if self.epsilon <= 0:
            raise InvalidValue("epsilon must be positive")
        if not 0 < self.lasso_ratio < 1:
            raise InvalidValue("lasso_ratio must lie in (0, 1) so the grid decreases")
        if self.lap_t is not None and self.lap_t <= 0:
            raise InvalidValue("lap_t must be positive")


def _per_feature(fn: Callable[[np.ndarray, np.ndarray], float]):
    def scorer(ds: Dataset, params: MethodParams) -> np.ndarray:
        x = np.asarray(ds.features)
        return np.array([fn(x[:, j], ds.labels, params) for j in range(x.shape[1])])
    return scorer


def _criterion(name):
    def fn(values, labels, params):
        x0, x1 = split_by_class(values, labels)
        return separability_score(x0, x1, name, params.epsilon)
    return _per_feature(fn)


@dataclass(frozen=True)
class Method:
    name: str
    supervised: bool
    scorer: Callable[[Dataset, MethodParams], np.ndarray] | None = None
    ranker: Callable[[Dataset, MethodParams], Ranking] | None = None
    descending: bool = True


METHODS: dict[str, Method] = {m.name: m for m in [
    *(Method(c, True, _criterion(c)) for c in CRITERIA),
    Method("relieff", True, lambda ds, p: relieff_weights(ds, p.relieff_k)),
    Method("lasso", True, ranker=lambda ds, p: lasso_ranking(ds, count=p.lasso_count, ratio=p.lasso_ratio)),
    Method("fisher", True, _per_feature(lambda x, y, p: fisher_score(x, y, p.epsilon))),
    Method("gini", True, _per_feature(lambda x, y, p: gini_score(x, y, p.gini_bins))),
    Method("kruskal_wallis", True, _per_feature(lambda x, y, p: kruskal_wallis_score(x, y))),
    Method("laplacian", False, lambda ds, p: laplacian_scores(ds, p.lap_k, p.lap_t, p.epsilon),
           descending=False),
    Method("cfs", True, ranker=lambda ds, p: cfs_ranking(ds)),
    Method("ecfs", True, ranker=lambda ds, p: ecfs_ranking(ds, p.graph_alpha)),
    Method("inffs", True, ranker=lambda ds, p: inffs_ranking(ds, p.graph_alpha)),
]}

METHOD_NAMES = tuple(METHODS)


def rank(dataset: Dataset, method: str, params: MethodParams | None = None) -> Ranking:
    """Rank the features of ``dataset`` with one of :data:`METHOD_NAMES`."""
    try:
        entry = METHODS[method]
    except KeyError:
        raise UnknownMethod(f"unknown method {method!r}; valid: {', '.join(METHOD_NAMES)}") from None
    params = params or MethodParams()
    if entry.supervised:
        n0, n1 = dataset.class_counts()
        if n0 == 0 or n1 == 0:
            raise InsufficientClass(f"{method} needs both classes present")
    if entry.ranker is not None:
        return entry.ranker(dataset, params)
    scores = entry.scorer(dataset, params)
    return Ranking(method, order_by_scores(scores, entry.descending), scores, dataset.feature_names)


__all__ = [
    "CRITERIA", "METHODS", "METHOD_NAMES", "Method", "MethodParams", "cfs_merit", "cfs_ranking",
    "ecfs_ranking", "feature_affinity", "fisher_score", "gini_score", "inffs_energies",
    "inffs_ranking", "knn_graph", "kruskal_wallis_score", "laplacian_scores", "lasso_path",
    "lasso_ranking", "mann_whitney_u", "nearest_weights", "perron_vector", "rank",
    "relieff_weights", "separability_score",
]
