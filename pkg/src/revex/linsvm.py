"""Class-weighted linear soft-margin SVM with an unregularised bias.

Training minimises

    0.5 * ||w||^2 + C * sum_i cw[y_i] * max(0, 1 - y_i * (w . x_i + b))

through its dual with SMO (see ``_smo.pyx``). After every round of SMO
steps the primal point is rebuilt from the dual variables, the bias is set
by exact one-dimensional minimisation and the duality gap is measured;
training stops once that gap is at most ``tolerance``, which bounds the
distance of the returned objective from the optimum.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from revex import jsonio
from revex._backend import BACKEND, smo_run
from revex.corpusgen import NEGATIVE, POSITIVE
from revex.errors import DataError, SingleClassError
from revex.featurize import FeatureSpace, FeatureVector

log = logging.getLogger(__name__)

MODEL_FORMAT = "revex-linear-svm/1"
MODEL_NOTES = "hinge loss, L2 penalty on weights only; the bias term is not regularised"

DEFAULT_TOLERANCE = 1e-6
DEFAULT_MAX_ITERATIONS = 10000
_MIN_KKT_EPS = 1e-15
# rounds between subspace steps while SMO is still making full rounds
_POLISH_EVERY = 10
_MAX_POLISH_FREE = 1000


def class_weights(n_pos: int, n_neg: int, mode: str = "balanced") -> dict[str, float]:
    """Per-class loss multipliers.

    ``balanced`` gives each class N / (2 * N_class) so both classes carry the
    same total weight; ``uniform`` gives both 1.
    """
    if n_pos <= 0 or n_neg <= 0:
        raise SingleClassError(f"need both classes, got {n_pos} positive / {n_neg} negative")
    if mode == "uniform":
        return {POSITIVE: 1.0, NEGATIVE: 1.0}
    if mode != "balanced":
        raise ValueError(f"unknown class weight mode {mode!r}")
    n = n_pos + n_neg
    return {POSITIVE: n / (2.0 * n_pos), NEGATIVE: n / (2.0 * n_neg)}


@dataclass
class LinearModel:
    weights: np.ndarray
    bias: float
    C: float
    class_weights: dict
    feature_space: FeatureSpace | None = None
    element_kind: str = ""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.feature_space is not None and len(self.weights) != self.feature_space.n_features:
            raise DataError("weight vector length does not match the feature space")
        if not self.C > 0:
            raise DataError("C must be positive")
        if min(self.class_weights.values()) <= 0:
            raise DataError("class weights must be positive")

    def decision_function(self, X) -> np.ndarray:
        return np.asarray(X @ self.weights).ravel() + self.bias

    def to_json(self) -> dict:
        space = self.feature_space
        return {
            "schema_version": jsonio.SCHEMA_VERSION,
            "version": MODEL_FORMAT,
            "notes": MODEL_NOTES,
            "element_kind": self.element_kind,
            "C": float(self.C),
            "class_weights": {POSITIVE: float(self.class_weights[POSITIVE]),
                              NEGATIVE: float(self.class_weights[NEGATIVE])},
            "bias": float(self.bias),
            "binary_features": bool(space.binary) if space is not None else False,
            "metadata": dict(self.metadata),
            "feature_space": space.to_json() if space is not None else {},
            "weights": [float(v) for v in self.weights],
        }

    @classmethod
    def from_json(cls, payload: dict) -> "LinearModel":
        try:
            space = FeatureSpace.from_json(payload["feature_space"],
                                           binary=bool(payload.get("binary_features", False)))
            return cls(
                weights=np.array([float(v) for v in payload["weights"]], dtype=np.float64),
                bias=float(payload["bias"]),
                C=float(payload["C"]),
                class_weights={k: float(v) for k, v in payload["class_weights"].items()},
                feature_space=space,
                element_kind=payload.get("element_kind", ""),
                metadata=dict(payload.get("metadata", {})),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed model file: {exc}") from exc

    def save(self, path) -> None:
        jsonio.write_json(path, self.to_json())

    @classmethod
    def load(cls, path) -> "LinearModel":
        return cls.from_json(jsonio.read_json(path))


@dataclass
class TrainReport:
    objective: float
    iterations: int
    converged: bool
    duality_gap: float = float("nan")
    updates: int = 0
    polish_steps: int = 0
    alpha: np.ndarray | None = field(default=None, repr=False)
    # dual objective (minimisation form) after each round; non-increasing
    trace: list = field(default_factory=list)


def as_matrix(vectors, n_features: int | None = None) -> sp.csr_matrix:
    """Coerce FeatureVectors, a dense array or a sparse matrix to CSR."""
    if sp.issparse(vectors):
        X = sp.csr_matrix(vectors, dtype=np.float64)
    elif isinstance(vectors, np.ndarray):
        X = sp.csr_matrix(np.atleast_2d(vectors).astype(np.float64))
    else:
        vectors = list(vectors)
        rows, cols, vals = [], [], []
        for r, v in enumerate(vectors):
            entries = v.entries if isinstance(v, FeatureVector) else v
            for c, x in entries:
                rows.append(r)
                cols.append(c)
                vals.append(float(x))
        if n_features is None:
            n_features = max(cols) + 1 if cols else 0
        X = sp.csr_matrix((vals, (rows, cols)), shape=(len(vectors), n_features), dtype=np.float64)
    X.sum_duplicates()
    X.sort_indices()
    return X


def as_labels(labels) -> np.ndarray:
    """Map labels ("positive"/"negative", +-1, 1/0, booleans) to +-1 floats."""
    if isinstance(labels, np.ndarray) and labels.dtype.kind in "fiub":
        return np.where(labels > 0, 1.0, -1.0)
    out = []
    for lab in labels:
        if lab in (POSITIVE, 1, True) or (isinstance(lab, (int, float)) and lab > 0):
            out.append(1.0)
        elif lab in (NEGATIVE, -1, 0, False) or (isinstance(lab, (int, float)) and lab < 0):
            out.append(-1.0)
        else:
            raise DataError(f"unrecognised label {lab!r}")
    return np.asarray(out, dtype=np.float64)


def optimal_bias_interval(f: np.ndarray, y: np.ndarray, upper: np.ndarray) -> tuple[float, float]:
    """Interval of b minimising sum_i upper_i * max(0, 1 - y_i (f_i + b)).

    The loss is convex and piecewise linear in b with a kink at y_i - f_i
    for every example, so the minimiser is found by sweeping the sorted
    kinks until the right derivative becomes non-negative.
    """
    kinks = y - f
    order = np.argsort(kinks, kind="stable")
    ks = kinks[order]
    us = upper[order]
    pos = y[order] > 0
    total_pos = float(us[pos].sum())
    tol = 1e-12 * float(us.sum())
    # right derivative just after every kink with all tied kinks included
    deriv = -(total_pos - np.cumsum(np.where(pos, us, 0.0))) + np.cumsum(np.where(pos, 0.0, us))
    last_of_group = np.flatnonzero(np.append(ks[1:] != ks[:-1], True))
    values = ks[last_of_group]
    slopes = deriv[last_of_group]
    k = int(np.argmax(slopes >= -tol))
    lo = float(values[k])
    if abs(slopes[k]) <= tol and k + 1 < len(values):
        return lo, float(values[k + 1])
    return lo, lo


def _subspace_step(X, y, upper, alpha, grad, fit_bias, max_free=_MAX_POLISH_FREE) -> bool:
    """One exact step on the free dual variables, the others held fixed.

    Pairwise SMO updates crawl when the kernel matrix is rank deficient
    (fewer features than support vectors): the optimum sits along a flat
    valley no coordinate pair points down. Solving the equality-constrained
    Newton system on the free set jumps along it; an inconsistent system
    means a zero-curvature descent ray, followed to the nearest bound.
    Returns True when alpha was changed.
    """
    slack = 1e-12 * float(upper.max())
    free = np.flatnonzero((alpha > slack) & (alpha < upper - slack))
    m = len(free)
    if m == 0 or m > max_free:
        return False
    yf = y[free]
    XF = X[free]
    Q = np.asarray((XF @ XF.T).todense()) * np.outer(yf, yf)
    g = grad[free]
    if fit_bias:
        kkt = np.zeros((m + 1, m + 1))
        kkt[:m, :m] = Q
        kkt[:m, m] = yf
        kkt[m, :m] = yf
        rhs = np.r_[-g, 0.0]
    else:
        kkt = Q
        rhs = -g
    z = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
    resid = (rhs - kkt @ z)[:m]
    ray = float(resid @ resid) > 1e-12 * (float(rhs @ rhs) + 1.0)
    step = resid if ray else z[:m]
    a = alpha[free]
    u = upper[free]
    with np.errstate(divide="ignore", invalid="ignore"):
        room = np.where(step > 0, (u - a) / step, np.where(step < 0, -a / step, np.inf))
    t = float(room.min())
    if not ray:
        t = min(t, 1.0)
    if not (np.isfinite(t) and t > 0):
        return False
    change = t * float(g @ step) + 0.5 * t * t * float(step @ Q @ step)
    if not change < 0:
        return False
    new = a + t * step
    blocked = room <= t
    new[blocked & (step > 0)] = u[blocked & (step > 0)]
    new[blocked & (step < 0)] = 0.0
    alpha[free] = np.clip(new, 0.0, u)
    return True


def primal_objective(w, b, X, y, upper) -> float:
    f = np.asarray(X @ w).ravel()
    return 0.5 * float(w @ w) + float(upper @ np.maximum(0.0, 1.0 - y * (f + b)))


def train(vectors, labels, C: float = 1.0, weights: dict | None = None,
          tolerance: float = DEFAULT_TOLERANCE, max_iterations: int = DEFAULT_MAX_ITERATIONS,
          seed: int = 0, feature_space: FeatureSpace | None = None, fit_bias: bool = True,
          element_kind: str = "", initial_alpha: np.ndarray | None = None,
          ) -> tuple[LinearModel, TrainReport]:
    """Fit the weighted soft-margin SVM.

    ``weights`` maps "positive"/"negative" to class multipliers; balanced
    weights are computed from ``labels`` when omitted. The solver is
    deterministic; ``seed`` is only recorded in the model metadata.
    ``initial_alpha`` warm-starts the dual; it must satisfy the box and,
    with a bias, the equality constraint (a solution for another C scaled
    by C_new / C_old does).
    Non-convergence is reported through ``TrainReport.converged``.
    """
    if not C > 0:
        raise ValueError(f"C must be positive, got {C}")
    X = as_matrix(vectors, feature_space.n_features if feature_space is not None else None)
    y = as_labels(labels)
    if X.shape[0] != len(y):
        raise DataError(f"{X.shape[0]} vectors but {len(y)} labels")
    n_pos = int((y > 0).sum())
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassError(f"need both classes, got {n_pos} positive / {n_neg} negative")
    if weights is None:
        weights = class_weights(n_pos, n_neg, "balanced")
    weights = {POSITIVE: float(weights[POSITIVE]), NEGATIVE: float(weights[NEGATIVE])}
    if min(weights.values()) <= 0:
        raise ValueError("class weights must be positive")

    n, d = X.shape
    upper = C * np.where(y > 0, weights[POSITIVE], weights[NEGATIVE])
    csc = X.tocsc()
    csc.sort_indices()
    arrays = (
        X.indptr.astype(np.int64), X.indices.astype(np.int32), X.data.astype(np.float64),
        csc.indptr.astype(np.int64), csc.indices.astype(np.int32), csc.data.astype(np.float64),
    )
    diag = np.asarray(X.multiply(X).sum(axis=1), dtype=np.float64).ravel()
    if initial_alpha is None:
        alpha = np.zeros(n)
        grad = -np.ones(n)
        w = np.zeros(d)
    else:
        alpha = np.clip(np.asarray(initial_alpha, dtype=np.float64), 0.0, upper)
        w = np.asarray(X.T @ (alpha * y)).ravel()
        grad = y * np.asarray(X @ w).ravel() - 1.0
    b = 0.0
    eps = 1e-3
    round_size = max(n, 64)
    report = TrainReport(objective=float("inf"), iterations=0, converged=False)

    for iteration in range(1, max_iterations + 1):
        updates, _ = smo_run(*arrays, y, upper, alpha, grad, w, diag, eps, round_size, fit_bias)
        report.updates += int(updates)
        # rebuild from alpha to shed accumulated rounding
        w = np.asarray(X.T @ (alpha * y)).ravel()
        f = np.asarray(X @ w).ravel()
        grad = y * f - 1.0
        if fit_bias:
            lo, hi = optimal_bias_interval(f, y, upper)
            b = 0.5 * (lo + hi)
        ww = float(w @ w)
        primal = 0.5 * ww + float(upper @ np.maximum(0.0, 1.0 - y * (f + b)))
        dual = float(alpha.sum()) - 0.5 * ww
        report.trace.append(-dual)
        report.iterations = iteration
        report.objective = primal
        report.duality_gap = primal - dual
        if report.duality_gap <= tolerance:
            report.converged = True
            break
        if updates == round_size and iteration % _POLISH_EVERY == 0:
            if _subspace_step(X, y, upper, alpha, grad, fit_bias):
                report.polish_steps += 1
                w = np.asarray(X.T @ (alpha * y)).ravel()
                grad[:] = y * np.asarray(X @ w).ravel() - 1.0
            continue
        if updates < round_size:
            if eps <= _MIN_KKT_EPS:
                break
            eps = max(eps / 10.0, _MIN_KKT_EPS)

    if not report.converged:
        log.warning("SVM did not reach duality gap %.3g (gap %.3g after %d rounds)",
                    tolerance, report.duality_gap, report.iterations)
    report.alpha = alpha
    model = LinearModel(
        weights=w, bias=float(b), C=float(C), class_weights=weights,
        feature_space=feature_space, element_kind=element_kind,
        metadata={"seed": int(seed), "converged": report.converged,
                  "iterations": report.iterations, "tolerance": float(tolerance)},
    )
    return model, report


def predict(model: LinearModel, sentence) -> tuple[str, float]:
    """Label one sentence; a margin of exactly zero counts as negative."""
    if model.feature_space is None:
        raise DataError("model has no feature space; use decision_function on vectors")
    vec = model.feature_space.vectorize(sentence)
    margin = float(sum(model.weights[i] * c for i, c in vec.entries)) + model.bias
    return (POSITIVE if margin > 0.0 else NEGATIVE), margin


__all__ = [
    "BACKEND", "LinearModel", "TrainReport", "as_labels", "as_matrix", "class_weights",
    "optimal_bias_interval", "predict", "primal_objective", "train",
]
