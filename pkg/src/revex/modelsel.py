"""Choosing C by k-fold cross-validation and iterative grid refinement.

The coarse pass scores decade values of C. Each refinement pass then scans
the lattice one decimal finer around the current best value, until the
lattice step drops below ``10 ** -refinement_decimals``.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from revex import jsonio
from revex.errors import TooFewInstancesError
from revex.linsvm import DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE, as_labels, as_matrix, class_weights, train

log = logging.getLogger(__name__)

METRICS = ("recall_positive", "accuracy")
COARSE_EXPONENTS = range(-3, 4)


@dataclass(frozen=True)
class GridSearchConfig:
    c_low: float = 1e-4
    c_high: float = 1000.0
    k: int = 10
    metric: str = "recall_positive"
    refinement_decimals: int = 4
    seed: int = 0
    tolerance: float = DEFAULT_TOLERANCE
    max_iterations: int = DEFAULT_MAX_ITERATIONS

    def __post_init__(self):
        if not 0 < self.c_low < self.c_high:
            raise ValueError(f"need 0 < c_low < c_high, got {self.c_low}, {self.c_high}")
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if self.refinement_decimals < 1:
            raise ValueError("refinement_decimals must be at least 1")
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}")


@dataclass
class CvResult:
    C: float
    fold_metrics: list = field(default_factory=list)
    mean: float = float("nan")
    stage: int = 0

    def to_json(self) -> dict:
        return {
            "stage": self.stage,
            "C": float(self.C),
            "fold_metrics": [None if math.isnan(m) else float(m) for m in self.fold_metrics],
            "mean": None if math.isnan(self.mean) else float(self.mean),
        }


def kfold_split(n: int, k: int, seed: int = 0, labels=None) -> list[np.ndarray]:
    """Shuffle 0..n-1 into k folds whose sizes differ by at most one.

    With ``labels`` the split is stratified: positives are dealt round-robin
    first and negatives continue the same cycle, so per-fold positive counts
    also differ by at most one.
    """
    if n < k:
        raise TooFewInstancesError(f"{n} instances cannot fill {k} folds")
    rng = np.random.default_rng(seed)
    if labels is None:
        order = rng.permutation(n)
    else:
        y = as_labels(labels)
        if len(y) != n:
            raise ValueError("labels length differs from n")
        pos = np.flatnonzero(y > 0)
        neg = np.flatnonzero(y <= 0)
        if len(pos) < k:
            log.warning("only %d positives for %d folds; some folds get none", len(pos), k)
        order = np.concatenate([rng.permutation(pos), rng.permutation(neg)])
    folds = [order[f::k] for f in range(k)]
    return [np.sort(f) for f in folds]


def fold_metric(y_true, y_pred, metric: str) -> float:
    y_true = np.asarray(y_true) > 0
    y_pred = np.asarray(y_pred) > 0
    if metric == "accuracy":
        return float((y_true == y_pred).mean()) if len(y_true) else float("nan")
    if metric == "recall_positive":
        n_pos = int(y_true.sum())
        return float((y_true & y_pred).sum() / n_pos) if n_pos else float("nan")
    raise ValueError(f"unknown metric {metric!r}")


def cross_validate(vectors, labels, C: float, config: GridSearchConfig = GridSearchConfig(),
                   folds=None, warm: dict | None = None) -> CvResult:
    """Train on k-1 folds and score the held-out fold, for every fold.

    Balanced class weights are recomputed from each training portion.
    Folds whose metric is undefined (no positives under recall) are kept
    as NaN and left out of the mean. ``warm`` (fold number -> (C, dual
    solution)) is read and updated to warm-start successive calls.
    """
    X = as_matrix(vectors)
    y = as_labels(labels)
    if folds is None:
        folds = kfold_split(len(y), config.k, config.seed, y)
    scores = []
    everything = np.arange(len(y))
    for fold_no, held in enumerate(folds):
        mask = np.ones(len(y), dtype=bool)
        mask[held] = False
        tr = everything[mask]
        ytr = y[tr]
        weights = class_weights(int((ytr > 0).sum()), int((ytr <= 0).sum()), "balanced")
        start = None
        if warm is not None and fold_no in warm:
            prev_C, prev_alpha = warm[fold_no]
            start = prev_alpha * (C / prev_C)
        model, report = train(X[tr], ytr, C=C, weights=weights, tolerance=config.tolerance,
                              max_iterations=config.max_iterations, seed=config.seed,
                              initial_alpha=start)
        if warm is not None:
            warm[fold_no] = (C, report.alpha)
        pred = np.where(model.decision_function(X[held]) > 0.0, 1.0, -1.0)
        scores.append(fold_metric(y[held], pred, config.metric))
    defined = [s for s in scores if not math.isnan(s)]
    mean = float(np.mean(defined)) if defined else float("nan")
    return CvResult(C=float(C), fold_metrics=scores, mean=mean)


def coarse_grid(config: GridSearchConfig) -> list[float]:
    points = {float(10.0 ** e) for e in COARSE_EXPONENTS if config.c_low < 10.0 ** e <= config.c_high}
    points.add(float(config.c_high))
    return sorted(points)


def _decade(c: float) -> int:
    e = math.floor(math.log10(c))
    # guard against log10 rounding just below an exact power of ten
    if 10.0 ** (e + 1) <= c * (1 + 1e-12):
        e += 1
    return e


def _better(a: CvResult, b: CvResult | None) -> bool:
    """Is ``a`` strictly preferable to ``b``? Ties go to the smaller C."""
    if b is None:
        return True
    am = -math.inf if math.isnan(a.mean) else a.mean
    bm = -math.inf if math.isnan(b.mean) else b.mean
    if am > bm + 1e-12:
        return True
    if abs(am - bm) <= 1e-12:
        return a.C < b.C
    return False


def grid_search_C(vectors=None, labels=None, config: GridSearchConfig = GridSearchConfig(),
                  evaluate: Callable[[float], CvResult | float] | None = None):
    """Return (best C, trace of CvResult in evaluation order).

    ``evaluate`` replaces cross-validation (it receives C and returns a
    CvResult or a bare metric value); otherwise the vectors and labels are
    cross-validated with one fixed fold assignment.
    """
    if evaluate is None:
        X = as_matrix(vectors)
        y = as_labels(labels)
        folds = kfold_split(len(y), config.k, config.seed, y)
        warm: dict = {}

        def evaluate(C):
            return cross_validate(X, y, C, config, folds, warm)

    seen: dict[float, CvResult] = {}
    trace: list[CvResult] = []
    best: CvResult | None = None

    def run_stage(stage, points):
        nonlocal best
        for c in sorted(points):
            if c in seen:
                continue
            res = evaluate(c)
            if not isinstance(res, CvResult):
                res = CvResult(C=c, fold_metrics=[float(res)], mean=float(res))
            res.C = float(c)
            res.stage = stage
            seen[c] = res
            trace.append(res)
            if _better(res, best):
                best = res

    run_stage(0, coarse_grid(config))
    # the coarse grid is spaced a decade apart around the best point, so the
    # first refinement step is one tenth of that spacing
    step_exp = _decade(best.C) + 1
    stage = 0
    while step_exp - 1 >= -config.refinement_decimals:
        step_exp -= 1
        stage += 1
        step = 10.0 ** step_exp
        centre = best.C
        points = []
        for j in range(-9, 10):
            c = round(centre + j * step, max(0, -step_exp))
            if 0.0 < c <= config.c_high:
                points.append(float(c))
        run_stage(stage, points)
    return best.C, trace


def write_trace(path, trace) -> None:
    jsonio.write_text_atomic(path, "".join(jsonio.dumps_line(r.to_json()) + "\n" for r in trace))


def read_trace(path) -> list[CvResult]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                row = json.loads(line)
                out.append(CvResult(
                    C=float(row["C"]),
                    fold_metrics=[float("nan") if m is None else float(m) for m in row["fold_metrics"]],
                    mean=float("nan") if row["mean"] is None else float(row["mean"]),
                    stage=int(row["stage"]),
                ))
    return out


__all__ = [
    "CvResult", "GridSearchConfig", "METRICS", "coarse_grid",
    "cross_validate", "fold_metric", "grid_search_C", "kfold_split", "read_trace", "write_trace",
]
