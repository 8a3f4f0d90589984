"""Linear SVM (L1 hinge) trained by dual coordinate descent, plus AUC.

The bias is learned by appending a constant 1 column, so it is regularized
together with the weights and the dual stays a plain box-constrained QP::

    min_a  1/2 a'Qa - sum(a)   s.t. 0 <= a_i <= C,   Q_ij = y_i y_j x_i.x_j
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numba
import numpy as np
from scipy.stats import rankdata

from .errors import InsufficientClass, ShapeError

log = logging.getLogger(__name__)

STD_FLOOR = 1e-12
# weights this small relative to the model scale are round-off, not signal
WEIGHT_SNAP = 1e-9


@dataclass(frozen=True, eq=False)
class LinearModel:
    weights: np.ndarray
    bias: float
    C: float
    dual: np.ndarray
    converged: bool = True
    epochs: int = 0
    violation: float = 0.0


@numba.njit(cache=True, nogil=True)
def _dual_cd(X, ys, C, tol, max_iter, alpha):
    """Cyclic dual coordinate descent; X already augmented with the bias column.

    Returns (w, epochs, final max projected-gradient violation). ``alpha`` is
    updated in place. After a sweep below tolerance, w is rebuilt from the
    duals and the violation re-measured without updates, so the reported
    residual belongs to the returned model.
    """
    n, p = X.shape
    qd = np.empty(n)
    for i in range(n):
        s = 0.0
        for j in range(p):
            s += X[i, j] * X[i, j]
        qd[i] = s
    w = np.zeros(p)
    for i in range(n):
        if alpha[i] != 0.0:
            for j in range(p):
                w[j] += alpha[i] * ys[i] * X[i, j]

    epoch = 0
    viol = np.inf
    while epoch < max_iter:
        epoch += 1
        sweep_max = 0.0
        for i in range(n):
            g = 0.0
            for j in range(p):
                g += w[j] * X[i, j]
            g = ys[i] * g - 1.0
            a = alpha[i]
            if a == 0.0:
                pg = min(g, 0.0)
            elif a == C:
                pg = max(g, 0.0)
            else:
                pg = g
            if abs(pg) > sweep_max:
                sweep_max = abs(pg)
            if pg != 0.0:
                new = min(max(a - g / qd[i], 0.0), C)
                step = (new - a) * ys[i]
                if step != 0.0:
                    for j in range(p):
                        w[j] += step * X[i, j]
                alpha[i] = new
        if sweep_max < tol:
            # rebuild w exactly from the duals and verify KKT without updating
            w[:] = 0.0
            for i in range(n):
                if alpha[i] != 0.0:
                    for j in range(p):
                        w[j] += alpha[i] * ys[i] * X[i, j]
            viol = 0.0
            for i in range(n):
                g = 0.0
                for j in range(p):
                    g += w[j] * X[i, j]
                g = ys[i] * g - 1.0
                a = alpha[i]
                if a == 0.0:
                    pg = min(g, 0.0)
                elif a == C:
                    pg = max(g, 0.0)
                else:
                    pg = g
                if abs(pg) > viol:
                    viol = abs(pg)
            if viol < tol:
                return w, epoch, viol
        else:
            viol = sweep_max
    return w, epoch, viol


def _check_labels(y) -> np.ndarray:
    y = np.asarray(y)
    n1 = int(np.sum(y == 1))
    if n1 == 0 or n1 == y.size:
        raise InsufficientClass("training needs both classes")
    return np.where(y == 1, 1.0, -1.0)


def augment(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return np.hstack([X, np.ones((X.shape[0], 1))])


def train(X, y, C: float = 1.0, tol: float = 1e-6, max_iter: int = 20_000) -> LinearModel:
    """Fit a linear SVM; labels are 0/1.

    Sweep order is fixed (sample order), so results are bit-reproducible.
    A model that hits ``max_iter`` epochs is returned with ``converged=False``.
    Weights below ``WEIGHT_SNAP`` times max(1, |w|_inf, |b|) are set to zero:
    when the optimum is w = 0 the residual sign is arbitrary and would
    otherwise decide the ranking of test scores.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != np.asarray(y).shape[0]:
        raise ShapeError(f"X {X.shape} does not match {np.asarray(y).shape[0]} labels")
    ys = _check_labels(y)
    Xa = np.ascontiguousarray(augment(X))
    alpha = np.zeros(X.shape[0])
    w, epochs, viol = _dual_cd(Xa, ys, float(C), float(tol), int(max_iter), alpha)
    converged = viol < tol
    if not converged:
        log.debug("dual CD stopped after %d epochs with violation %.3g", epochs, viol)
    alpha.setflags(write=False)
    weights = w[:-1].copy()
    scale = max(1.0, float(np.abs(w).max()))
    weights[np.abs(weights) < WEIGHT_SNAP * scale] = 0.0
    weights.setflags(write=False)
    return LinearModel(weights, float(w[-1]), float(C), alpha, converged, int(epochs), float(viol))


def decision_values(model: LinearModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != model.weights.shape[0]:
        raise ShapeError(f"model has {model.weights.shape[0]} features, X has {X.shape[1]}")
    return X @ model.weights + model.bias


def primal_objective(model: LinearModel, X, y) -> float:
    """1/2 ||(w, b)||^2 + C * sum of hinge losses (bias regularized)."""
    ys = np.where(np.asarray(y) == 1, 1.0, -1.0)
    margins = ys * decision_values(model, X)
    w = np.append(model.weights, model.bias)
    return float(0.5 * w @ w + model.C * np.maximum(0.0, 1.0 - margins).sum())


def auc(scores, labels) -> float:
    """Area under the ROC curve in Mann-Whitney form; tied pairs count 1/2."""
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels)
    pos = y == 1
    n_pos = int(pos.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise InsufficientClass("AUC needs both classes")
    r = rankdata(s)
    return float((r[pos].sum() - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))


@dataclass(frozen=True, eq=False)
class Normalizer:
    mean: np.ndarray
    std: np.ndarray  # floored at STD_FLOOR; floored columns map to 0

    def apply(self, X) -> np.ndarray:
        return apply_normalizer(self, X)


def fit_normalizer(X) -> Normalizer:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ShapeError("normalizer needs a 2-D matrix with at least 2 rows")
    mean = X.mean(axis=0)
    std = np.maximum(X.std(axis=0), STD_FLOOR)
    return Normalizer(mean, std)


def apply_normalizer(norm: Normalizer, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.shape[-1] != norm.mean.shape[0]:
        raise ShapeError(f"normalizer has {norm.mean.shape[0]} columns, X has {X.shape[-1]}")
    live = norm.std > STD_FLOOR
    return np.where(live, (X - norm.mean) / norm.std, 0.0)
