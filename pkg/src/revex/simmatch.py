"""Query-normalised (modified) Jaccard similarity and sentence ranking."""

from __future__ import annotations

from dataclasses import dataclass

from revex.errors import EmptyQueryError
from revex.textcore import Document, Sentence

# Scores closer than this are treated as equal when ranking.
SCORE_EPS = 1e-12


@dataclass(frozen=True)
class ScoredSentence:
    sentence: Sentence
    score: float


def jac_mod(sx, sy) -> float:
    """Share of the query terms ``sx`` that also occur in ``sy``.

    Unlike the symmetric Jaccard index, the denominator is the size of the
    query only, so ``jac_mod(a, b) != jac_mod(b, a)`` in general.
    """
    if not sx:
        raise EmptyQueryError()
    if not isinstance(sx, (set, frozenset)):
        sx = frozenset(sx)
    return len(sx.intersection(sy)) / len(sx)


def _query_terms(query) -> frozenset:
    if isinstance(query, Sentence):
        return query.term_set
    return frozenset(query)


def score_document(query, doc: Document) -> list[ScoredSentence]:
    """Score every sentence of ``doc`` against ``query``, in document order."""
    sx = _query_terms(query)
    if not sx:
        raise EmptyQueryError(record=getattr(query, "text", None))
    return [ScoredSentence(s, jac_mod(sx, s.term_set)) for s in doc.sentences]


def rank_sentences(query, doc: Document) -> list[ScoredSentence]:
    """Rank the sentences of ``doc`` by decreasing similarity to ``query``.

    ``query`` is a query Sentence or a term set. Ties (within SCORE_EPS)
    keep document order.
    """
    scored = score_document(query, doc)
    # Stable sort on score alone would split near-equal floats; bucket them.
    ordered = sorted(scored, key=lambda s: -s.score)
    ranked: list[ScoredSentence] = []
    group: list[ScoredSentence] = []
    for item in ordered:
        if group and group[0].score - item.score > SCORE_EPS:
            ranked.extend(sorted(group, key=lambda s: s.sentence.index))
            group = []
        group.append(item)
    ranked.extend(sorted(group, key=lambda s: s.sentence.index))
    return ranked
