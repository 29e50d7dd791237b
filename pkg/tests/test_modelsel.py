import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from revex.errors import TooFewInstancesError
from revex.modelsel import (
    CvResult, GridSearchConfig, coarse_grid, cross_validate, fold_metric, grid_search_C,
    kfold_split, read_trace, write_trace,
)

PEAK = 4.263


def peaked(c):
    return 1.0 / (1.0 + (c - PEAK) ** 2)


def test_config_defaults_and_validation():
    cfg = GridSearchConfig()
    assert (cfg.c_high, cfg.k, cfg.refinement_decimals, cfg.metric) == (1000.0, 10, 4, "recall_positive")
    for bad in ({"c_low": 0.0}, {"c_low": 5.0, "c_high": 1.0}, {"k": 1},
                {"refinement_decimals": 0}, {"metric": "f1"}):
        with pytest.raises(ValueError):
            GridSearchConfig(**bad)


def test_kfold_forced_sizes():
    assert [len(f) for f in kfold_split(10, 10)] == [1] * 10
    assert sorted(len(f) for f in kfold_split(10, 3)) == [3, 3, 4]


def test_kfold_stratified_brute_force():
    labels = np.r_[np.ones(6), -np.ones(14)]
    folds = kfold_split(20, 2, seed=3, labels=labels)
    assert [int((labels[f] > 0).sum()) for f in folds] == [3, 3]


def test_kfold_errors_and_warning(caplog):
    with pytest.raises(TooFewInstancesError):
        kfold_split(3, 4)
    with caplog.at_level(logging.WARNING, logger="revex.modelsel"):
        kfold_split(10, 5, labels=[1, 1] + [-1] * 8)
    assert "positives" in caplog.text


@given(st.integers(2, 60), st.integers(2, 10), st.integers(0, 2**31), st.data())
def test_kfold_properties(n, k, seed, data):
    if n < k:
        with pytest.raises(TooFewInstancesError):
            kfold_split(n, k, seed)
        return
    labels = np.array(data.draw(st.lists(st.sampled_from([1, -1]), min_size=n, max_size=n)))
    folds = kfold_split(n, k, seed, labels)
    joined = np.concatenate(folds)
    assert sorted(joined.tolist()) == list(range(n))
    sizes = [len(f) for f in folds]
    assert max(sizes) - min(sizes) <= 1
    pos = [int((labels[f] > 0).sum()) for f in folds]
    assert max(pos) - min(pos) <= 1
    again = kfold_split(n, k, seed, labels)
    assert all(np.array_equal(a, b) for a, b in zip(folds, again))


def test_fold_metrics():
    y_true = [1] + [-1] * 9
    y_pred = [-1] * 10
    assert fold_metric(y_true, y_pred, "accuracy") == pytest.approx(0.9)
    assert fold_metric(y_true, y_pred, "recall_positive") == 0.0
    assert math.isnan(fold_metric([-1, -1], [-1, 1], "recall_positive"))


def test_cross_validate_separable():
    rng = np.random.default_rng(0)
    X = np.vstack([rng.uniform(1, 2, size=(10, 2)), -rng.uniform(1, 2, size=(20, 2))])
    y = np.r_[np.ones(10), -np.ones(20)]
    for metric in ("recall_positive", "accuracy"):
        res = cross_validate(X, y, 100.0, GridSearchConfig(k=5, metric=metric))
        assert res.mean == 1.0 and len(res.fold_metrics) == 5
        assert res.mean == pytest.approx(float(np.mean(res.fold_metrics)))


def test_cross_validate_warm_start_matches_cold():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(40, 3))
    y = np.where(X[:, 0] + 0.5 * rng.normal(size=40) > 0, 1.0, -1.0)
    cfg = GridSearchConfig(k=4, metric="accuracy")
    warm = {}
    cross_validate(X, y, 0.5, cfg, warm=warm)
    assert cross_validate(X, y, 2.0, cfg, warm=warm).fold_metrics == cross_validate(X, y, 2.0, cfg).fold_metrics


def test_coarse_grid():
    assert coarse_grid(GridSearchConfig()) == [0.001, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0]
    assert coarse_grid(GridSearchConfig(c_low=0.05, c_high=50.0)) == [0.1, 1.0, 10.0, 50.0]


def test_peak_found():
    best, trace = grid_search_C(config=GridSearchConfig(), evaluate=peaked)
    assert abs(best - PEAK) <= 1e-4
    assert best in [r.C for r in trace]


def test_peak_found_from_either_side():
    for metric in (lambda c: -abs(c - PEAK), lambda c: -abs(math.log(c / PEAK))):
        best, _ = grid_search_C(config=GridSearchConfig(), evaluate=metric)
        assert abs(best - PEAK) <= 1e-4


def test_constant_metric_prefers_smallest():
    best, trace = grid_search_C(config=GridSearchConfig(), evaluate=lambda c: 0.5)
    assert best == min(r.C for r in trace)


def test_cv_results_accepted_from_seam():
    best, _ = grid_search_C(config=GridSearchConfig(refinement_decimals=1),
                            evaluate=lambda c: CvResult(c, [peaked(c)], peaked(c)))
    assert best == pytest.approx(4.3)


def test_nan_metric_never_wins():
    best, _ = grid_search_C(config=GridSearchConfig(refinement_decimals=1),
                            evaluate=lambda c: math.nan if c > 1 else 0.1)
    assert best <= 1


@settings(max_examples=60, deadline=None)
@given(st.floats(0.002, 999.0), st.integers(1, 4), st.sampled_from([1.0, 100.0, 1000.0]))
def test_trace_invariants(peak, decimals, c_high):
    cfg = GridSearchConfig(c_high=c_high, refinement_decimals=decimals)
    metric = lambda c: -abs(math.log(c / peak))  # noqa: E731
    best, trace = grid_search_C(config=cfg, evaluate=metric)
    means = [r.mean for r in trace]
    assert best in [r.C for r in trace]
    assert metric(best) == max(means)
    assert len({r.C for r in trace}) == len(trace)
    assert all(0 < r.C <= c_high for r in trace)
    stages = max(r.stage for r in trace)
    first_step = 10.0 ** (math.floor(math.log10(max(r.C for r in trace if r.stage == 0))) + 1)
    assert stages <= decimals + math.ceil(math.log10(first_step))
    assert len(trace) <= len(coarse_grid(cfg)) + 18 * stages
    assert grid_search_C(config=cfg, evaluate=metric) == (best, trace)


def test_trace_round_trip(tmp_path):
    trace = [CvResult(0.5, [1.0, float("nan")], 1.0, 2)]
    write_trace(tmp_path / "t.jsonl", trace)
    assert (tmp_path / "t.jsonl").read_text() == '{"stage": 2, "C": 0.5, "fold_metrics": [1, null], "mean": 1}\n'
    back = read_trace(tmp_path / "t.jsonl")
    assert back[0].C == 0.5 and back[0].stage == 2 and math.isnan(back[0].fold_metrics[1])
