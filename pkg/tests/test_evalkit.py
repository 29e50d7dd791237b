import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import BENCHMARK_ROWS, BENCHMARK_PRECISION, BENCHMARK_RECALL, benchmark_macro, benchmark_sets
from revex.corpusgen import NEGATIVE, POSITIVE
from revex.errors import DataError
from revex.evalkit import (
    ArticleResult, aggregate, evaluate, extract_sentences, load_gold, load_predictions,
    natural_key, report_json, report_table, score_article,
)
from revex.featurize import fit_feature_space
from revex.linsvm import LinearModel, train
from revex.textcore import Document, make_document


def test_table_rows_from_counts():
    r = score_article({0, 10, 11, 12, 13, 14, 15}, {0})
    assert (r.true_positive, r.false_positive, r.false_negative) == (1, 6, 0)
    assert r.recall == 1.0 and r.precision == pytest.approx(1 / 7)
    r = score_article({0, 1, 10, 11, 12, 13}, {0, 1, 2, 3})
    assert r.recall == 0.5 and r.precision == pytest.approx(1 / 3)


def test_vacuous_article_rates_undefined():
    r = score_article(set(), set(), "a")
    assert (r.true_positive, r.false_positive, r.false_negative) == (0, 0, 0)
    assert r.recall is None and r.precision is None


def test_benchmark_aggregate():
    predictions, gold = benchmark_sets()
    results, agg = evaluate(predictions, gold)
    recall, precision = benchmark_macro()
    assert agg.macro_recall == float(recall) == 0.9375
    assert agg.macro_precision == pytest.approx(float(precision), abs=1e-15)
    assert abs(agg.macro_precision - 0.27) <= 0.005
    assert abs(agg.reading_burden - 3.7) <= 0.1
    assert agg.micro_recall == pytest.approx(27 / 31)
    assert [r.recall for r in results] == BENCHMARK_RECALL
    # displayed two-decimal precisions match the published column
    assert [float(f"{r.precision:.2f}") for r in results] == BENCHMARK_PRECISION


def test_macro_differs_from_micro():
    _, agg = evaluate(*benchmark_sets())
    assert agg.micro_recall < agg.macro_recall


def test_undefined_rates_left_out_of_means():
    agg = aggregate([ArticleResult("a", 1, 1, 0), ArticleResult("b", 0, 0, 0)])
    assert agg.macro_precision == 0.5 and agg.macro_recall == 1.0


def test_empty_aggregate_rejected():
    with pytest.raises(DataError):
        aggregate([])


def test_exact_and_disjoint():
    _, agg = evaluate({"a": {1, 2}}, {"a": {1, 2}})
    assert (agg.macro_recall, agg.macro_precision, agg.reading_burden) == (1.0, 1.0, 1.0)
    _, agg = evaluate({"a": {3}}, {"a": {1, 2}})
    assert (agg.macro_recall, agg.macro_precision, agg.reading_burden) == (0.0, 0.0, None)


def test_unknown_articles_rejected():
    with pytest.raises(DataError, match="zzz"):
        evaluate({"zzz": {1}}, {"a": {1}})


def test_natural_order():
    ids = ["Test Sample 10", "Test Sample 2", "Test Sample 1"]
    assert sorted(ids, key=natural_key) == ["Test Sample 1", "Test Sample 2", "Test Sample 10"]


def test_table_text():
    results, agg = evaluate(*benchmark_sets())
    text = report_table(results, agg)
    lines = text.splitlines()
    assert lines[0].split() == ["Article", "Id", "True", "Positive", "False", "Negative",
                                "False", "Positive", "Recall", "Precision"]
    assert lines[2].split()[-2:] == ["1.00", "0.50"]
    assert "macro recall     0.94" in text and "reading burden   3.7" in text
    assert report_json(results, agg)["aggregate"]["macro_recall"] == 0.9375


def test_gold_and_prediction_files(tmp_path):
    (tmp_path / "g.json").write_text(json.dumps({"a": [1, 2]}))
    (tmp_path / "g2.json").write_text(json.dumps({"schema_version": 1, "articles": {"a": [1]}}))
    (tmp_path / "p.json").write_text(json.dumps(
        {"schema_version": 1, "articles": [{"article_id": "a", "candidates": [{"index": 2, "margin": 1}]}]}))
    assert load_gold(tmp_path / "g.json") == {"a": {1, 2}}
    assert load_gold(tmp_path / "g2.json") == {"a": {1}}
    assert load_predictions(tmp_path / "p.json") == {"a": {2}}
    (tmp_path / "bad.json").write_text(json.dumps({"a": ["x"]}))
    with pytest.raises(DataError):
        load_gold(tmp_path / "bad.json")


def test_extract_rules():
    space = fit_feature_space([["a", "b"], ["c"]])
    zero = LinearModel(np.zeros(space.n_features), 0.0, 1.0, {POSITIVE: 1.0, NEGATIVE: 1.0}, space)
    doc = make_document("d", "A b. C.")
    assert extract_sentences(zero, doc) == []
    assert extract_sentences(zero, Document("e", ())) == []


def test_extract_finds_verbatim_positive():
    positive = "Adults aged over forty with chronic heart failure were eligible."
    negatives = ["The trial ran in six centres.", "Funding came from a charity.",
                 "Randomisation used sealed envelopes.", "Outcomes were assessed at one year."]
    sentences = [make_document("t", s).sentences[0] for s in [positive] + negatives]
    space = fit_feature_space(sentences)
    X = space.transform(sentences)
    model, _ = train(X, [1, -1, -1, -1, -1], C=10.0, feature_space=space)
    assert np.all((model.decision_function(X) > 0) == np.array([True, False, False, False, False]))
    article = make_document("new", "Nothing relevant here. " + positive + " Weather was mild.")
    hits = extract_sentences(model, article)
    assert hits[0][0] == 1
    margins = [m for _, m in hits]
    assert margins == sorted(margins, reverse=True)


counts = st.tuples(st.integers(0, 5), st.integers(0, 5), st.integers(0, 5))


@given(st.sets(st.integers(0, 30)), st.sets(st.integers(0, 30)))
def test_count_identities(predicted, gold):
    r = score_article(predicted, gold)
    assert r.true_positive + r.false_negative == len(gold)
    assert r.true_positive + r.false_positive == len(predicted)


@given(st.lists(counts, min_size=1, max_size=30))
def test_aggregate_properties(rows):
    results = [ArticleResult(str(i), tp, fp, fn) for i, (tp, fp, fn) in enumerate(rows)]
    agg = aggregate(results)
    for v in (agg.macro_recall, agg.macro_precision, agg.micro_recall, agg.micro_precision):
        assert v is None or 0.0 <= v <= 1.0
    if agg.macro_precision:
        assert agg.reading_burden >= 1.0
    defined = [Fraction(r.true_positive, r.true_positive + r.false_negative)
               for r in results if r.true_positive + r.false_negative]
    if defined:
        assert agg.macro_recall == pytest.approx(float(sum(defined) / len(defined)), abs=1e-12)
    single = aggregate(results[:1])
    assert single.macro_recall == results[0].recall and single.macro_precision == results[0].precision
