"""Shared domain types: datasets, rankings, effectiveness results.

Feature indices are 1-based wherever they leave the process (files, reports,
CLI) and in :attr:`Ranking.order`; arrays inside a :class:`Dataset` are
ordinary 0-based numpy arrays.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyInput, InvalidLabel, InvalidValue, ParseError, ShapeError


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable n x d feature matrix with binary labels (0 benign, 1 malignant)."""

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...]

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def class_counts(self) -> tuple[int, int]:
        n1 = int(self.labels.sum())
        return self.n_samples - n1, n1

    def column(self, index: int) -> np.ndarray:
        """Column for a 1-based feature index."""
        return self.features[:, index - 1]

    def take_rows(self, rows) -> "Dataset":
        return Dataset(_frozen(self.features[rows], float),
                       _frozen(self.labels[rows], np.int8), self.feature_names)

    def take_features(self, indices: Sequence[int]) -> "Dataset":
        """Sub-dataset restricted to 1-based feature indices, in the given order."""
        cols = [i - 1 for i in indices]
        return Dataset(_frozen(self.features[:, cols], float), self.labels,
                       tuple(self.feature_names[c] for c in cols))

    def equals(self, other: "Dataset") -> bool:
        return (self.feature_names == other.feature_names
                and np.array_equal(self.labels, other.labels)
                and np.array_equal(self.features, other.features))


def validate_dataset(matrix, labels, feature_names: Sequence[str] | None = None) -> Dataset:
    """Check raw inputs and build a :class:`Dataset`.

    Raises EmptyInput, ShapeError, InvalidValue (NaN/Inf) or InvalidLabel.
    """
    try:
        x = np.asarray(matrix, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ShapeError(f"feature matrix is not rectangular numeric data: {exc}") from exc
    if x.ndim == 1 and x.size == 0:
        raise EmptyInput("empty feature matrix")
    if x.ndim != 2:
        raise ShapeError(f"feature matrix must be 2-D, got {x.ndim}-D")
    if x.size == 0:
        raise EmptyInput("empty feature matrix")
    n, d = x.shape
    if n < 2:
        raise EmptyInput(f"need at least 2 samples, got {n}")
    if not np.all(np.isfinite(x)):
        bad = np.argwhere(~np.isfinite(x))[0]
        raise InvalidValue(f"non-finite value at row {bad[0] + 1}, feature {bad[1] + 1}")

    y_raw = np.asarray(labels)
    if y_raw.ndim != 1 or y_raw.shape[0] != n:
        raise ShapeError(f"labels length {y_raw.shape} does not match {n} rows")
    try:
        y_float = y_raw.astype(float)
    except (TypeError, ValueError) as exc:
        raise InvalidLabel(f"non-numeric label: {exc}") from exc
    bad = ~np.isin(y_float, (0.0, 1.0))
    if bad.any():
        raise InvalidLabel(f"label {y_raw[bad][0]!r} is not 0 or 1")

    if feature_names is None:
        feature_names = [f"f{j + 1}" for j in range(d)]
    names = tuple(str(s) for s in feature_names)
    if len(names) != d:
        raise ShapeError(f"{len(names)} feature names for {d} features")
    return Dataset(_frozen(x, float), _frozen(y_float, np.int8), names)


# -- CSV interchange ---------------------------------------------------------

def _data_lines(text: str) -> list[str]:
    return [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def format_real(v: float) -> str:
    # repr gives the shortest round-tripping form (up to 17 significant digits)
    v = float(v)
    if math.isnan(v):
        return ""
    return repr(v)


def dataset_to_csv(ds: Dataset, comments: Iterable[str] = ()) -> str:
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label", *ds.feature_names])
    for row, y in zip(ds.features, ds.labels):
        w.writerow([int(y), *(format_real(v) for v in row)])
    return buf.getvalue()


def dataset_from_csv(text: str, source: str = "<string>") -> Dataset:
    lines = _data_lines(text)
    if not lines:
        raise EmptyInput(f"{source}: no header row")
    rows = list(csv.reader(lines))
    header = [h.strip() for h in rows[0]]
    if not header or header[0] != "label":
        raise ParseError(f"{source}: first column must be 'label', got {header[:1]}")
    body = rows[1:]
    if not body:
        raise EmptyInput(f"{source}: no data rows")
    labels, matrix = [], []
    for lineno, r in enumerate(body, start=2):
        if len(r) != len(header):
            raise ParseError(f"{source}: row {lineno} has {len(r)} fields, expected {len(header)}")
        try:
            labels.append(float(r[0]))
            matrix.append([float(v) for v in r[1:]])
        except ValueError as exc:
            raise ParseError(f"{source}: row {lineno}: {exc}") from exc
    return validate_dataset(matrix, labels, header[1:])


def write_dataset(ds: Dataset, path, comments: Iterable[str] = ()) -> None:
    Path(path).write_text(dataset_to_csv(ds, comments))


def read_dataset(path) -> Dataset:
    path = Path(path)
    return dataset_from_csv(path.read_text(), source=str(path))


# -- rankings ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Ranking:
    """Features ordered most important first.

    ``order`` holds 1-based feature indices; ``scores[j]`` is the score of
    feature ``j + 1`` (aligned to feature index, not to rank position).
    """

    method: str
    order: tuple[int, ...]
    scores: np.ndarray = field(repr=False)
    feature_names: tuple[str, ...] | None = None

    def __post_init__(self):
        order = tuple(int(i) for i in self.order)
        if sorted(order) != list(range(1, len(order) + 1)):
            raise ShapeError(f"{self.method}: order is not a permutation of 1..{len(order)}")
        object.__setattr__(self, "order", order)
        scores = _frozen(self.scores, float)
        if scores.shape != (len(order),):
            raise ShapeError(f"{self.method}: {scores.shape[0]} scores for {len(order)} features")
        object.__setattr__(self, "scores", scores)

    @property
    def n_features(self) -> int:
        return len(self.order)

    def position(self, index: int) -> int:
        """1-based rank position of a 1-based feature index."""
        return self.order.index(index) + 1


TIE_RTOL = 1e-9


def _close(a: float, b: float, rtol: float) -> bool:
    if a == b:
        return True
    if not (math.isfinite(a) and math.isfinite(b)):
        return False
    return abs(a - b) <= rtol * max(abs(a), abs(b))


def order_by_scores(scores, descending: bool = True, rtol: float = TIE_RTOL) -> tuple[int, ...]:
    """1-based order sorted by score with ties broken by ascending index.

    Scores within ``rtol`` (relative) of the first score of a run count as
    tied, so round-off from summation order cannot flip equal features.
    """
    s = np.asarray(scores, dtype=float)
    if np.isnan(s).any():
        raise InvalidValue("cannot order NaN scores")
    key = -s if descending else s
    # lexsort: last key is primary
    idx = [int(i) for i in np.lexsort((np.arange(s.size), key))]
    order: list[int] = []
    group = [idx[0]] if idx else []
    for i in idx[1:]:
        if _close(key[group[0]], key[i], rtol):
            group.append(i)
        else:
            order.extend(sorted(group))
            group = [i]
    order.extend(sorted(group))
    return tuple(i + 1 for i in order)


RANKING_HEADER = ["method", "rank_position", "feature_index", "feature_name", "score"]


def rankings_to_csv(rankings: Iterable[Ranking], comments: Iterable[str] = ()) -> str:
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RANKING_HEADER)
    for r in rankings:
        names = r.feature_names or tuple(f"f{j + 1}" for j in range(r.n_features))
        for pos, idx in enumerate(r.order, start=1):
            w.writerow([r.method, pos, idx, names[idx - 1], format_real(r.scores[idx - 1])])
    return buf.getvalue()


def rankings_from_csv(text: str, source: str = "<string>") -> list[Ranking]:
    lines = _data_lines(text)
    if not lines:
        raise EmptyInput(f"{source}: empty ranking file")
    rows = list(csv.reader(lines))
    if [h.strip() for h in rows[0]] != RANKING_HEADER:
        raise ParseError(f"{source}: header must be {','.join(RANKING_HEADER)}")
    blocks: dict[str, list[tuple[int, int, str, float]]] = {}
    for lineno, r in enumerate(rows[1:], start=2):
        if len(r) != len(RANKING_HEADER):
            raise ParseError(f"{source}: row {lineno} has {len(r)} fields")
        try:
            pos, idx = int(r[1]), int(r[2])
            score = float(r[4]) if r[4].strip() else float("nan")
        except ValueError as exc:
            raise ParseError(f"{source}: row {lineno}: {exc}") from exc
        blocks.setdefault(r[0], []).append((pos, idx, r[3], score))
    out = []
    for method, entries in blocks.items():
        entries.sort()
        if [e[0] for e in entries] != list(range(1, len(entries) + 1)):
            raise ParseError(f"{source}: {method}: rank positions are not 1..{len(entries)}")
        d = len(entries)
        order = [e[1] for e in entries]
        if sorted(order) != list(range(1, d + 1)):
            raise ParseError(f"{source}: {method}: feature indices are not a permutation of 1..{d}")
        scores = np.full(d, np.nan)
        names = [""] * d
        for _, idx, name, score in entries:
            scores[idx - 1] = score
            names[idx - 1] = name
        out.append(Ranking(method, tuple(order), scores, tuple(names)))
    return out


def read_rankings(path) -> list[Ranking]:
    path = Path(path)
    return rankings_from_csv(path.read_text(), source=str(path))


# -- effectiveness -------------------------------------------------------------

@dataclass(frozen=True)
class EffResult:
    """eff = m / n_prefix, kept as integers so the fraction prints unreduced."""

    m: int
    n_prefix: int

    @property
    def eff(self) -> Fraction:
        return Fraction(self.m, self.n_prefix)

    @property
    def fraction(self) -> str:
        return f"{self.m}/{self.n_prefix}"

    def __str__(self):
        return self.fraction


def make_rng(seed: int) -> np.random.Generator:
    """Seeded generator used by every randomized operation."""
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise InvalidValue(f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.default_rng(np.random.PCG64(seed))
