"""Distantly supervised gold-standard construction.

Each review record names a reference article and carries the value the
reviewers extracted for one data element. Sentences of the reference are
scored against that value; the top band (within ``alpha`` of the best
score) becomes positive, sentences that barely overlap (score at most
``beta``) become negative, and everything in between is left out.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field

from revex import jsonio
from revex.errors import DataError, EmptyQueryError, MissingDocumentError
from revex.simmatch import SCORE_EPS, ScoredSentence, rank_sentences
from revex.textcore import Document, Sentence, segment_sentences

POSITIVE = "positive"
NEGATIVE = "negative"

DEFAULT_ALPHA = 0.2
DEFAULT_BETA = 0.005

_LIST_MARKER = re.compile(r"^\s*(?:\(?\d{1,3}[.)]|[•‣◦*\-–])\s+")


@dataclass(frozen=True)
class DataElementQuery:
    review_id: str
    reference_id: str
    element_kind: str
    query_sentences: tuple[Sentence, ...]

    def __post_init__(self):
        if not self.query_sentences:
            raise EmptyQueryError(record=f"review {self.review_id!r}, reference {self.reference_id!r}")
        for s in self.query_sentences:
            if not s.term_set:
                raise EmptyQueryError(
                    record=f"review {self.review_id!r}, reference {self.reference_id!r}: {s.text!r}"
                )


@dataclass(frozen=True)
class LabeledInstance:
    sentence: Sentence
    label: str
    element_kind: str
    source_score: float
    review_id: str = ""

    @property
    def key(self):
        return (self.sentence.doc_id, self.sentence.index)


@dataclass
class TrainingCorpus:
    element_kind: str
    alpha: float
    beta: float
    positives: list[LabeledInstance] = field(default_factory=list)
    negatives: list[LabeledInstance] = field(default_factory=list)

    @property
    def instances(self) -> list[LabeledInstance]:
        """All instances in provenance order (review, reference, sentence)."""
        return sorted(
            self.positives + self.negatives,
            key=lambda i: (i.review_id, i.sentence.doc_id, i.sentence.index),
        )

    def __len__(self):
        return len(self.positives) + len(self.negatives)

    def to_json(self) -> dict:
        return {
            "schema_version": jsonio.SCHEMA_VERSION,
            "element_kind": self.element_kind,
            "alpha": float(self.alpha),
            "beta": float(self.beta),
            "instances": [
                {
                    "doc_id": inst.sentence.doc_id,
                    "sentence_index": inst.sentence.index,
                    "text": inst.sentence.text,
                    "label": inst.label,
                    "score": float(inst.source_score),
                    "review_id": inst.review_id,
                }
                for inst in self.instances
            ],
        }

    @classmethod
    def from_json(cls, payload: dict) -> "TrainingCorpus":
        try:
            corpus = cls(payload["element_kind"], float(payload["alpha"]), float(payload["beta"]))
            for row in payload["instances"]:
                sentence = Sentence(row["doc_id"], int(row["sentence_index"]), row["text"])
                inst = LabeledInstance(sentence, row["label"], corpus.element_kind,
                                       float(row["score"]), row.get("review_id", ""))
                if inst.label == POSITIVE:
                    corpus.positives.append(inst)
                elif inst.label == NEGATIVE:
                    corpus.negatives.append(inst)
                else:
                    raise DataError(f"unknown label {inst.label!r} in corpus")
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed corpus file: {exc}") from exc
        return corpus

    def save(self, path) -> None:
        jsonio.write_json(path, self.to_json())

    @classmethod
    def load(cls, path) -> "TrainingCorpus":
        return cls.from_json(jsonio.read_json(path))


def _check_threshold(name, value):
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


def split_value_text(value_text: str) -> list[str]:
    """Break a review-side value into sentences and list items."""
    items = []
    for line in value_text.splitlines():
        line = _LIST_MARKER.sub("", line).strip()
        if line:
            items.extend(s.text for s in segment_sentences(line))
    return items


def query_from_record(record: dict, index: int | None = None) -> DataElementQuery:
    where = f"record {index}" if index is not None else "record"
    try:
        review_id = str(record["review_id"])
        reference_id = str(record["reference_id"])
        element_kind = str(record["element_kind"])
        value_text = record["value_text"]
    except (KeyError, TypeError) as exc:
        raise DataError(f"malformed review {where}: missing field {exc}") from exc
    if not isinstance(value_text, str):
        raise DataError(f"malformed review {where}: value_text must be a string")
    items = split_value_text(value_text)
    sentences = tuple(Sentence(f"{review_id}:{reference_id}", i, t) for i, t in enumerate(items))
    if not sentences or any(not s.term_set for s in sentences):
        raise EmptyQueryError(record=f"{where}: review {review_id!r}, reference {reference_id!r}")
    return DataElementQuery(review_id, reference_id, element_kind, sentences)


def load_queries(path, element_kind: str | None = None) -> list[DataElementQuery]:
    try:
        payload = jsonio.read_json(path)
    except ValueError as exc:
        raise DataError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(payload, list):
        raise DataError(f"{path}: review records must be a JSON array")
    queries = [query_from_record(rec, i) for i, rec in enumerate(payload)]
    if element_kind is not None:
        queries = [q for q in queries if q.element_kind == element_kind]
    return queries


def select_positives(ranked: list[ScoredSentence], alpha: float, element_kind: str = "",
                     min_match_floor: float = 0.0, review_id: str = "") -> list[LabeledInstance]:
    """Every sentence whose score is within ``alpha`` of the top score.

    Nothing is selected when the top score does not exceed
    ``min_match_floor`` (a reference that never mentions the element).
    """
    _check_threshold("alpha", alpha)
    if not ranked or ranked[0].score <= min_match_floor:
        return []
    top = ranked[0].score
    return [
        LabeledInstance(r.sentence, POSITIVE, element_kind, r.score, review_id)
        for r in ranked
        if top - r.score <= alpha + SCORE_EPS
    ]


def select_negatives(ranked: list[ScoredSentence], beta: float, element_kind: str = "",
                     exclude=(), review_id: str = "") -> list[LabeledInstance]:
    """Every sentence scoring at most ``beta`` that is not in ``exclude``."""
    _check_threshold("beta", beta)
    taken = {(i.sentence.doc_id, i.sentence.index) if isinstance(i, LabeledInstance) else i
             for i in exclude}
    return [
        LabeledInstance(r.sentence, NEGATIVE, element_kind, r.score, review_id)
        for r in ranked
        if r.score <= beta + SCORE_EPS and (r.sentence.doc_id, r.sentence.index) not in taken
    ]


def build_gold_standard(queries, documents, alpha: float = DEFAULT_ALPHA,
                        beta: float = DEFAULT_BETA, min_match_floor: float = 0.0,
                        element_kind: str | None = None) -> TrainingCorpus:
    """Label reference sentences for one data element across all reviews.

    A sentence is positive if any query sentence puts it in its alpha band,
    negative if its best score over every query against that reference is
    at most beta, and excluded otherwise. Positive wins over negative when
    several reviews cite the same reference.
    """
    _check_threshold("alpha", alpha)
    _check_threshold("beta", beta)
    queries = list(queries)
    kinds = {q.element_kind for q in queries}
    if element_kind is None:
        if len(kinds) > 1:
            raise DataError(f"queries mix element kinds {sorted(kinds)}; pick one")
        element_kind = kinds.pop() if kinds else ""
    else:
        queries = [q for q in queries if q.element_kind == element_kind]

    missing = [q.reference_id for q in queries if q.reference_id not in documents]
    if missing:
        raise MissingDocumentError(missing)

    by_reference: dict[str, list[DataElementQuery]] = defaultdict(list)
    for q in sorted(queries, key=lambda q: (q.review_id, q.reference_id)):
        by_reference[q.reference_id].append(q)

    corpus = TrainingCorpus(element_kind, alpha, beta)
    for ref_id in sorted(by_reference):
        doc: Document = documents[ref_id]
        best = [0.0] * len(doc)
        positive: dict[int, LabeledInstance] = {}
        for q in by_reference[ref_id]:
            for qs in q.query_sentences:
                ranked = rank_sentences(qs, doc)
                for r in ranked:
                    i = r.sentence.index
                    if r.score > best[i]:
                        best[i] = r.score
                for inst in select_positives(ranked, alpha, element_kind, min_match_floor, q.review_id):
                    i = inst.sentence.index
                    if i not in positive or inst.source_score > positive[i].source_score + SCORE_EPS:
                        positive[i] = inst
        owner = by_reference[ref_id][0].review_id
        for i in sorted(positive):
            corpus.positives.append(positive[i])
        for s in doc.sentences:
            if s.index not in positive and best[s.index] <= beta + SCORE_EPS:
                corpus.negatives.append(LabeledInstance(s, NEGATIVE, element_kind, best[s.index], owner))
    return corpus


def reference_summary(corpus: TrainingCorpus) -> list[tuple[str, int, int]]:
    """(reference id, positives, negatives) per reference, sorted by id."""
    counts: dict[str, list[int]] = defaultdict(lambda: [0, 0])
    for inst in corpus.positives:
        counts[inst.sentence.doc_id][0] += 1
    for inst in corpus.negatives:
        counts[inst.sentence.doc_id][1] += 1
    return [(ref, c[0], c[1]) for ref, c in sorted(counts.items())]
