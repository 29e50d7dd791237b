"""Seeded synthetic reviews, reference articles and gold labels.

The real review tables and full texts are not redistributable, so the
pipeline is exercised on generated data instead. Words come in two pools:
a small "element" lexicon that data-element values are written in, and a
large background pool for everything else. Every reference article gets
one planted sentence that paraphrases its review-side value (a fraction
``paraphrase_noise`` of the value's terms swapped for background words),
plus a few distractor sentences that borrow element words.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from revex import jsonio
from revex.textcore import abbreviations, segment_sentences

_ONSETS = ["b", "c", "d", "f", "g", "h", "j", "k", "l", "m", "n", "p", "r", "s", "t", "v", "w",
           "z", "br", "cl", "dr", "fl", "gr", "pl", "pr", "st", "tr", "ch", "sh", "th"]
_NUCLEI = ["a", "e", "i", "o", "u", "ai", "ea", "io", "ou"]
_CODAS = ["", "", "n", "r", "s", "l", "m", "x", "nd", "st"]


@dataclass(frozen=True)
class SynthSpec:
    n_reviews: int = 30
    refs_per_review: int = 3
    sentences_per_article: int = 60
    vocabulary_size: int = 2000
    paraphrase_noise: float = 0.3
    seed: int = 0
    n_test_articles: int = 20
    element_kind: str = "inclusion_criteria"
    element_fraction: float = 0.05
    distractors_per_article: int = 2
    min_query_terms: int = 8
    max_query_terms: int = 12

    def __post_init__(self):
        if not 0.0 <= self.paraphrase_noise < 1.0:
            raise ValueError("paraphrase_noise must lie in [0, 1)")
        if self.sentences_per_article < 1 + self.distractors_per_article:
            raise ValueError("sentences_per_article too small for the planted and distractor sentences")
        if not 1 <= self.min_query_terms <= self.max_query_terms:
            raise ValueError("need 1 <= min_query_terms <= max_query_terms")
        if self.n_element_words < self.max_query_terms:
            raise ValueError("element lexicon smaller than max_query_terms")
        if self.vocabulary_size - self.n_element_words < 50:
            raise ValueError("vocabulary_size too small")

    @property
    def n_element_words(self) -> int:
        return max(self.max_query_terms, math.ceil(self.vocabulary_size * self.element_fraction))


def _vocabulary(rng: np.random.Generator, size: int) -> list[str]:
    banned = {a.split()[-1].rstrip(".") for a in abbreviations()}
    words: list[str] = []
    seen: set[str] = set()
    while len(words) < size:
        n_syl = int(rng.integers(2, 4))
        w = "".join(
            _ONSETS[rng.integers(len(_ONSETS))] + _NUCLEI[rng.integers(len(_NUCLEI))]
            + _CODAS[rng.integers(len(_CODAS))]
            for _ in range(n_syl)
        )
        if w not in seen and w not in banned:
            seen.add(w)
            words.append(w)
    return words


def _sentence(words) -> str:
    text = " ".join(words)
    return text[0].upper() + text[1:] + "."


@dataclass
class _Article:
    article_id: str
    sentences: list[str]
    planted: int


class _Generator:
    def __init__(self, spec: SynthSpec):
        self.spec = spec
        self.rng = np.random.default_rng(spec.seed)
        vocab = _vocabulary(self.rng, spec.vocabulary_size)
        self.element = vocab[:spec.n_element_words]
        self.background = vocab[spec.n_element_words:]

    def pick(self, pool, k, replace=False):
        idx = self.rng.choice(len(pool), size=k, replace=replace)
        return [pool[i] for i in idx]

    def query(self) -> list[str]:
        k = int(self.rng.integers(self.spec.min_query_terms, self.spec.max_query_terms + 1))
        return self.pick(self.element, k)

    def background_sentence(self) -> list[str]:
        return self.pick(self.background, int(self.rng.integers(8, 21)), replace=True)

    def planted(self, query: list[str]) -> list[str]:
        words = list(query)
        n_swap = int(math.floor(self.spec.paraphrase_noise * len(words) + 1e-9))
        swap_at = self.rng.choice(len(words), size=n_swap, replace=False)
        fillers = [w for w in self.pick(self.background, n_swap + 5) if w not in query]
        for pos, new in zip(sorted(swap_at), fillers):
            words[pos] = new
        lead = self.pick(self.background, int(self.rng.integers(0, 4)), replace=True)
        return lead + words

    def distractor(self) -> list[str]:
        words = self.background_sentence()
        for w in self.pick(self.element, int(self.rng.integers(1, 3))):
            words.insert(int(self.rng.integers(0, len(words) + 1)), w)
        return words

    def article(self, article_id: str, query: list[str]) -> _Article:
        n = self.spec.sentences_per_article
        planted_at = int(self.rng.integers(0, n))
        others = [i for i in range(n) if i != planted_at]
        distract = set(self.rng.choice(others, size=self.spec.distractors_per_article, replace=False).tolist())
        sentences = []
        for i in range(n):
            if i == planted_at:
                words = self.planted(query)
            elif i in distract:
                words = self.distractor()
            else:
                words = self.background_sentence()
            sentences.append(_sentence(words))
        return _Article(article_id, sentences, planted_at)


def _article_text(sentences: list[str]) -> str:
    paragraphs = [" ".join(sentences[i:i + 8]) for i in range(0, len(sentences), 8)]
    return "\n\n".join(paragraphs) + "\n"


def generate(spec: SynthSpec):
    """Build (review records, training articles, test articles, gold) in memory."""
    gen = _Generator(spec)
    records = []
    train_articles = []
    for r in range(spec.n_reviews):
        review_id = f"review{r + 1:03d}"
        for j in range(spec.refs_per_review):
            ref_id = f"ref{r * spec.refs_per_review + j + 1:04d}"
            query = gen.query()
            records.append({
                "review_id": review_id,
                "reference_id": ref_id,
                "element_kind": spec.element_kind,
                "value_text": _sentence(query),
            })
            train_articles.append(gen.article(ref_id, query))
    test_articles = [gen.article(f"test{t + 1:04d}", gen.query()) for t in range(spec.n_test_articles)]
    gold = {a.article_id: [a.planted] for a in train_articles + test_articles}
    return records, train_articles, test_articles, gold


def write_synthetic(spec: SynthSpec, out_dir) -> dict:
    """Write reviews.json, articles/, test_articles/ and gold.json under ``out_dir``."""
    out = Path(out_dir)
    records, train_articles, test_articles, gold = generate(spec)
    for sub, articles in (("articles", train_articles), ("test_articles", test_articles)):
        for a in articles:
            text = _article_text(a.sentences)
            segmented = segment_sentences(text, a.article_id)
            if [s.text for s in segmented] != a.sentences:
                raise RuntimeError(f"generated article {a.article_id} does not segment cleanly")
            jsonio.write_text_atomic(out / sub / f"{a.article_id}.txt", text)
    jsonio.write_json(out / "reviews.json", records)
    jsonio.write_json(out / "gold.json", {
        "schema_version": jsonio.SCHEMA_VERSION,
        "seed": spec.seed,
        "articles": gold,
    })
    jsonio.write_json(out / "synth_spec.json", {"schema_version": jsonio.SCHEMA_VERSION, **asdict(spec)})
    return {"reviews": len(records), "train_articles": len(train_articles),
            "test_articles": len(test_articles)}
