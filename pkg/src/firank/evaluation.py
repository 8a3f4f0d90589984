"""Exhaustive subset search with cross-validated linear-SVM AUC, eff, reports."""

from __future__ import annotations

import csv
import io
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .data import Dataset, EffResult, Ranking, make_rng
from .errors import (
    EvaluationFailure,
    InsufficientClass,
    InvalidBound,
    InvalidIndex,
    ShapeError,
    TooManyFeatures,
)
from .svm import apply_normalizer, auc, decision_values, fit_normalizer, train

log = logging.getLogger(__name__)

MAX_SEARCH_FEATURES = 25


# -- folds -----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FoldSplit:
    """k disjoint test folds (0-based sample indices, each sorted) and their seed."""

    folds: tuple[np.ndarray, ...]
    seed: int

    @property
    def k(self) -> int:
        return len(self.folds)

    def train_test(self, i: int, n: int) -> tuple[np.ndarray, np.ndarray]:
        test = self.folds[i]
        keep = np.ones(n, dtype=bool)
        keep[test] = False
        return np.flatnonzero(keep), test

    def same_as(self, other: "FoldSplit") -> bool:
        return self.k == other.k and all(np.array_equal(a, b) for a, b in zip(self.folds, other.folds))


def stratified_folds(labels, k: int = 10, seed: int = 42) -> FoldSplit:
    """Stratified k-fold split.

    Each class is shuffled with the seeded generator, the classes are laid end
    to end and dealt round-robin to the folds. Per-class fold counts therefore
    differ by at most one, and so do fold sizes.
    """
    y = np.asarray(labels)
    if k < 2:
        raise InvalidBound(f"need k >= 2 folds, got {k}")
    rng = make_rng(seed)
    queue = []
    for c in (0, 1):
        members = np.flatnonzero(y == c)
        if members.size < k:
            raise InsufficientClass(f"class {c} has {members.size} samples, fewer than k={k}")
        queue.append(rng.permutation(members))
    order = np.concatenate(queue)
    folds = tuple(np.sort(order[i::k]) for i in range(k))
    return FoldSplit(folds, int(seed))


# -- subsets ---------------------------------------------------------------------

def enumerate_subsets(d: int, kmax: int) -> Iterator[tuple[int, ...]]:
    """Every non-empty subset of {1..d} with at most kmax elements, by (size, lexicographic)."""
    if not 1 <= kmax <= d:
        raise InvalidBound(f"need 1 <= kmax <= d, got kmax={kmax}, d={d}")
    for size in range(1, kmax + 1):
        yield from itertools.combinations(range(1, d + 1), size)


def subset_count(d: int, kmax: int) -> int:
    return sum(math.comb(d, k) for k in range(1, kmax + 1))


# -- cross-validated AUC -----------------------------------------------------------

class CVScore(NamedTuple):
    mean: float
    std: float
    skipped: tuple[int, ...] = ()
    nonconverged: int = 0


class _PreparedFolds:
    """Per-fold train/test matrices z-scored with train-only statistics.

    Column statistics are per feature, so normalizing all columns once per
    fold equals fitting on each subset's own columns.
    """

    def __init__(self, dataset: Dataset, folds: FoldSplit):
        x = np.asarray(dataset.features, dtype=float)
        y = np.asarray(dataset.labels)
        self.parts = []
        self.skipped = []
        for i in range(folds.k):
            tr, te = folds.train_test(i, x.shape[0])
            if np.unique(y[te]).size < 2:
                log.info("fold %d skipped: single-class test split", i + 1)
                self.skipped.append(i + 1)
                continue
            if np.unique(y[tr]).size < 2:
                log.info("fold %d skipped: single-class train split", i + 1)
                self.skipped.append(i + 1)
                continue
            norm = fit_normalizer(x[tr])
            self.parts.append((np.ascontiguousarray(apply_normalizer(norm, x[tr])), y[tr],
                               apply_normalizer(norm, x[te]), y[te]))
        if not self.parts:
            raise EvaluationFailure("every fold was skipped")

    def score(self, subset: Sequence[int], C: float) -> CVScore:
        cols = [i - 1 for i in subset]
        aucs = []
        stalled = 0
        for xtr, ytr, xte, yte in self.parts:
            model = train(xtr[:, cols], ytr, C)
            stalled += not model.converged
            aucs.append(auc(decision_values(model, xte[:, cols]), yte))
        a = np.array(aucs)
        std = float(a.std(ddof=1)) if a.size > 1 else 0.0
        return CVScore(float(a.mean()), std, tuple(self.skipped), stalled)


def _check_subset(subset: Sequence[int], d: int) -> tuple[int, ...]:
    subset = tuple(int(i) for i in subset)
    if not subset:
        raise InvalidIndex("empty feature subset")
    bad = [i for i in subset if not 1 <= i <= d]
    if bad:
        raise InvalidIndex(f"feature indices {bad} outside 1..{d}")
    return subset


def cv_auc(dataset: Dataset, subset: Sequence[int], folds: FoldSplit, C: float = 1.0) -> CVScore:
    """Mean and sample std of per-fold test AUC for one feature subset.

    Folds whose test split holds a single class are skipped and reported in
    ``skipped`` (1-based fold numbers).
    """
    subset = _check_subset(subset, dataset.n_features)
    return _PreparedFolds(dataset, folds).score(subset, C)


# -- exhaustive search ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SearchResult:
    best_subset: tuple[int, ...]
    best_mean_auc: float
    best_std_auc: float
    evaluated_count: int
    per_subset: list[tuple[tuple[int, ...], float, float]] = field(repr=False)
    seed: int = 0
    k_folds: int = 0
    C: float = 1.0
    kmax: int = 0
    skipped_folds: tuple[int, ...] = ()
    nonconverged_fits: int = 0

    def top(self, count: int = 50) -> list[tuple[tuple[int, ...], float, float]]:
        return sorted(self.per_subset, key=lambda r: subset_sort_key(r[0], r[1]))[:count]


def subset_sort_key(subset: Sequence[int], mean: float):
    """Higher mean AUC first, then smaller subsets, then lexicographic."""
    return (-mean, len(subset), tuple(subset))


def exhaustive_search(dataset: Dataset, kmax: int = 8, folds: FoldSplit | None = None,
                      C: float = 1.0, threads: int = 1, seed: int = 42, k: int = 10) -> SearchResult:
    """Evaluate every subset of up to ``kmax`` features with the same folds.

    The result does not depend on ``threads``: scores are collected per
    subset and the winner is picked after all evaluations finish.
    """
    d = dataset.n_features
    if d > MAX_SEARCH_FEATURES:
        raise TooManyFeatures(f"exhaustive search is limited to {MAX_SEARCH_FEATURES} features, got {d}")
    subsets = list(enumerate_subsets(d, kmax))
    if folds is None:
        folds = stratified_folds(dataset.labels, k, seed)
    prepared = _PreparedFolds(dataset, folds)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            scores = list(pool.map(lambda s: prepared.score(s, C), subsets, chunksize=64))
    else:
        scores = [prepared.score(s, C) for s in subsets]

    per_subset = [(s, sc.mean, sc.std) for s, sc in zip(subsets, scores)]
    best = min(per_subset, key=lambda r: subset_sort_key(r[0], r[1]))
    return SearchResult(best[0], best[1], best[2], len(per_subset), per_subset,
                        seed=folds.seed, k_folds=folds.k, C=C, kmax=kmax,
                        skipped_folds=tuple(prepared.skipped),
                        nonconverged_fits=sum(sc.nonconverged for sc in scores))


def format_search_result(result: SearchResult, top: int = 50, config: dict | None = None) -> str:
    """Key-value header followed by a table of the best subsets."""
    lines = []
    for key, value in (config or {}).items():
        lines.append(f"config.{key} = {value}")
    lines += [
        f"seed = {result.seed}",
        f"folds = {result.k_folds}",
        f"C = {result.C!r}",
        f"kmax = {result.kmax}",
        f"evaluated_count = {result.evaluated_count}",
        f"skipped_folds = {','.join(map(str, result.skipped_folds)) or '-'}",
        f"nonconverged_fits = {result.nonconverged_fits}",
        f"best_subset = {','.join(map(str, result.best_subset))}",
        f"best_mean_auc = {result.best_mean_auc!r}",
        f"best_std_auc = {result.best_std_auc!r}",
        "",
        "rank\tsubset\tmean_auc\tstd_auc",
    ]
    for i, (subset, mean, std) in enumerate(result.top(top), start=1):
        lines.append(f"{i}\t{','.join(map(str, subset))}\t{mean!r}\t{std!r}")
    return "\n".join(lines) + "\n"


# -- effectiveness and reports -------------------------------------------------------

def effectiveness(ranking: Ranking | Sequence[int], optimal_subset: Sequence[int]) -> EffResult:
    """eff = m / n, n being the shortest ranking prefix holding the optimal subset."""
    order = ranking.order if isinstance(ranking, Ranking) else tuple(int(i) for i in ranking)
    d = len(order)
    optimal = set(int(i) for i in optimal_subset)
    if not optimal:
        raise InvalidIndex("optimal subset is empty")
    bad = sorted(i for i in optimal if not 1 <= i <= d)
    if bad:
        raise InvalidIndex(f"optimal indices {bad} outside 1..{d}")
    position = {idx: pos for pos, idx in enumerate(order, start=1)}
    missing = sorted(optimal - position.keys())
    if missing:
        raise InvalidIndex(f"optimal indices {missing} absent from the ranking")
    return EffResult(len(optimal), max(position[i] for i in optimal))


@dataclass(frozen=True)
class ReportRow:
    method: str
    order: tuple[int, ...]
    eff: EffResult


@dataclass(frozen=True)
class Report:
    rows: tuple[ReportRow, ...]
    optimal: tuple[int, ...]

    def to_csv(self, comments=()) -> str:
        buf = io.StringIO()
        for c in comments:
            buf.write(f"# {c}\n")
        w = csv.writer(buf, lineterminator="\n")
        d = len(self.rows[0].order) if self.rows else 0
        w.writerow(["method", *(f"rank_{i}" for i in range(1, d + 1)), "m", "n", "eff"])
        for r in self.rows:
            w.writerow([r.method, *r.order, r.eff.m, r.eff.n_prefix, r.eff.fraction])
        return buf.getvalue()

    def to_text(self) -> str:
        if not self.rows:
            return ""
        d = len(self.rows[0].order)
        head = ["method", *map(str, range(1, d + 1)), "eff"]
        body = [[r.method, *map(str, r.order), r.eff.fraction] for r in self.rows]
        widths = [max(len(row[i]) for row in [head, *body]) for i in range(len(head))]
        fmt = lambda row: "  ".join(  # noqa: E731
            cell.ljust(widths[i]) if i == 0 else cell.rjust(widths[i]) for i, cell in enumerate(row))
        rule = "-" * len(fmt(head))
        return "\n".join([fmt(head), rule, *map(fmt, body)]) + "\n"


def build_report(rankings: Sequence[Ranking], optimal_subset: Sequence[int]) -> Report:
    """One row per ranking: method, ranked indices, eff as a literal m/n fraction."""
    sizes = {r.n_features for r in rankings}
    if len(sizes) > 1:
        raise ShapeError(f"rankings cover different feature counts: {sorted(sizes)}")
    rows = tuple(ReportRow(r.method, r.order, effectiveness(r, optimal_subset)) for r in rankings)
    return Report(rows, tuple(sorted(int(i) for i in optimal_subset)))
