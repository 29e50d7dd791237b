"""Per-article precision/recall and their aggregates.

The headline aggregate is the macro average (mean of per-article rates);
micro rates from pooled counts are reported alongside.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from revex import jsonio
from revex.errors import DataError


@dataclass(frozen=True)
class ArticleResult:
    article_id: str
    true_positive: int
    false_positive: int
    false_negative: int

    @property
    def recall(self) -> float | None:
        denom = self.true_positive + self.false_negative
        return self.true_positive / denom if denom else None

    @property
    def precision(self) -> float | None:
        denom = self.true_positive + self.false_positive
        return self.true_positive / denom if denom else None

    def to_json(self) -> dict:
        return {
            "article_id": self.article_id,
            "true_positive": self.true_positive,
            "false_negative": self.false_negative,
            "false_positive": self.false_positive,
            "recall": self.recall,
            "precision": self.precision,
        }


@dataclass(frozen=True)
class AggregateReport:
    macro_recall: float | None
    macro_precision: float | None
    micro_recall: float | None
    micro_precision: float | None
    n_articles: int

    @property
    def reading_burden(self) -> float | None:
        """Sentences read per relevant sentence found, 1 / macro precision."""
        if not self.macro_precision:
            return None
        return 1.0 / self.macro_precision

    def to_json(self) -> dict:
        return {
            "macro_recall": self.macro_recall,
            "macro_precision": self.macro_precision,
            "micro_recall": self.micro_recall,
            "micro_precision": self.micro_precision,
            "n_articles": self.n_articles,
            "reading_burden": self.reading_burden,
        }


def score_article(predicted, gold, article_id: str = "") -> ArticleResult:
    predicted = set(predicted)
    gold = set(gold)
    return ArticleResult(
        article_id,
        true_positive=len(predicted & gold),
        false_positive=len(predicted - gold),
        false_negative=len(gold - predicted),
    )


def _mean(values):
    values = [v for v in values if v is not None]
    return math.fsum(values) / len(values) if values else None


def aggregate(results) -> AggregateReport:
    results = list(results)
    if not results:
        raise DataError("cannot aggregate an empty result list")
    tp = sum(r.true_positive for r in results)
    fp = sum(r.false_positive for r in results)
    fn = sum(r.false_negative for r in results)
    return AggregateReport(
        macro_recall=_mean(r.recall for r in results),
        macro_precision=_mean(r.precision for r in results),
        micro_recall=tp / (tp + fn) if tp + fn else None,
        micro_precision=tp / (tp + fp) if tp + fp else None,
        n_articles=len(results),
    )


def extract_sentences(model, article) -> list[tuple[int, float]]:
    """(sentence index, margin) for every sentence the model calls positive.

    Sorted by decreasing margin, ties by index.
    """
    if not len(article.sentences):
        return []
    X = model.feature_space.transform(article.sentences)
    margins = model.decision_function(X)
    hits = [(s.index, float(m)) for s, m in zip(article.sentences, margins) if m > 0.0]
    return sorted(hits, key=lambda h: (-h[1], h[0]))


_NUM = re.compile(r"(\d+)")


def natural_key(text: str):
    return [int(p) if p.isdigit() else p for p in _NUM.split(text)]


def evaluate(predictions: dict, gold: dict) -> tuple[list[ArticleResult], AggregateReport]:
    """Score every predicted article against the gold indices."""
    unknown = sorted(set(predictions) - set(gold))
    if unknown:
        raise DataError("predicted articles missing from gold: " + ", ".join(unknown))
    results = [score_article(predictions[a], gold[a], a) for a in sorted(predictions, key=natural_key)]
    return results, aggregate(results)


def load_gold(path) -> dict[str, set[int]]:
    try:
        payload = jsonio.read_json(path)
        if "articles" in payload and isinstance(payload["articles"], dict):
            payload = payload["articles"]
        return {str(k): {int(i) for i in v} for k, v in payload.items() if k != "schema_version"}
    except (ValueError, TypeError, AttributeError) as exc:
        raise DataError(f"malformed gold file {path}: {exc}") from exc


def load_predictions(path) -> dict[str, set[int]]:
    """Accept ``extract`` output or a plain {article_id: [indices]} mapping."""
    try:
        payload = jsonio.read_json(path)
        if isinstance(payload, dict) and isinstance(payload.get("articles"), list):
            return {str(a["article_id"]): {int(c["index"]) for c in a["candidates"]}
                    for a in payload["articles"]}
        return {str(k): {int(i) for i in v} for k, v in payload.items() if k != "schema_version"}
    except (ValueError, TypeError, KeyError, AttributeError) as exc:
        raise DataError(f"malformed predictions file {path}: {exc}") from exc


def _fmt(x) -> str:
    # round-half-even on the stored binary value
    return "-" if x is None else f"{x:.2f}"


def report_json(results, agg: AggregateReport) -> dict:
    return {
        "schema_version": jsonio.SCHEMA_VERSION,
        "articles": [r.to_json() for r in results],
        "aggregate": agg.to_json(),
    }


def report_table(results, agg: AggregateReport) -> str:
    header = ("Article Id", "True Positive", "False Negative", "False Positive", "Recall", "Precision")
    rows = [(r.article_id, str(r.true_positive), str(r.false_negative), str(r.false_positive),
             _fmt(r.recall), _fmt(r.precision)) for r in results]
    widths = [max(len(h), *(len(row[i]) for row in rows)) if rows else len(h)
              for i, h in enumerate(header)]

    def line(cells):
        first = cells[0].ljust(widths[0])
        rest = [c.rjust(w) for c, w in zip(cells[1:], widths[1:])]
        return "  ".join([first, *rest]).rstrip()

    out = [line(header), line(["-" * w for w in widths])]
    out.extend(line(r) for r in rows)
    out.append("")
    out.append(f"macro recall     {_fmt(agg.macro_recall)}   macro precision  {_fmt(agg.macro_precision)}")
    out.append(f"micro recall     {_fmt(agg.micro_recall)}   micro precision  {_fmt(agg.micro_precision)}")
    burden = "-" if agg.reading_burden is None else f"{agg.reading_burden:.1f}"
    out.append(f"articles         {agg.n_articles}      reading burden   {burden}")
    return "\n".join(out) + "\n"
