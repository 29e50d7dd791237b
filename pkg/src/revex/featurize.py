"""Unigram, bigram and trigram count features."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from revex.errors import DataError, EmptyCorpusError

NGRAM_ORDERS = (1, 2, 3)


def ngrams(tokens, orders=NGRAM_ORDERS):
    """Yield every n-gram of ``tokens`` as a space-joined string."""
    tokens = list(tokens)
    for n in orders:
        for i in range(len(tokens) - n + 1):
            yield " ".join(tokens[i:i + n])


@dataclass(frozen=True)
class FeatureVector:
    """Sparse (index, count) pairs, strictly increasing by index."""

    entries: tuple[tuple[int, int], ...]

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def indices(self):
        return [i for i, _ in self.entries]

    @property
    def counts(self):
        return [c for _, c in self.entries]


class FeatureSpace:
    """Vocabulary of n-grams with lexicographically assigned columns."""

    def __init__(self, vocabulary: dict[str, int], binary: bool = False):
        self.vocabulary = dict(vocabulary)
        self.binary = bool(binary)
        if sorted(self.vocabulary.values()) != list(range(len(self.vocabulary))):
            raise DataError("feature indices must be a bijection onto 0..n_features-1")

    @property
    def n_features(self) -> int:
        return len(self.vocabulary)

    def __eq__(self, other):
        return (isinstance(other, FeatureSpace) and self.vocabulary == other.vocabulary
                and self.binary == other.binary)

    def __repr__(self):
        return f"FeatureSpace(n_features={self.n_features}, binary={self.binary})"

    def to_json(self) -> dict:
        return dict(sorted(self.vocabulary.items(), key=lambda kv: kv[1]))

    @classmethod
    def from_json(cls, mapping: dict, binary: bool = False) -> "FeatureSpace":
        return cls({str(k): int(v) for k, v in mapping.items()}, binary=binary)

    def _counts(self, tokens) -> Counter:
        vocab = self.vocabulary
        return Counter(vocab[g] for g in ngrams(tokens) if g in vocab)

    def vectorize(self, sentence) -> FeatureVector:
        counts = self._counts(_tokens_of(sentence))
        return FeatureVector(tuple(
            (i, 1 if self.binary else c) for i, c in sorted(counts.items())
        ))

    def transform(self, sentences) -> sp.csr_matrix:
        """Stack vectorised sentences into a CSR matrix (float64)."""
        indptr = [0]
        indices: list[int] = []
        data: list[float] = []
        for s in sentences:
            counts = self._counts(_tokens_of(s))
            for i in sorted(counts):
                indices.append(i)
                data.append(1.0 if self.binary else float(counts[i]))
            indptr.append(len(indices))
        return sp.csr_matrix(
            (np.asarray(data, dtype=np.float64), np.asarray(indices, dtype=np.int32),
             np.asarray(indptr, dtype=np.int64)),
            shape=(len(indptr) - 1, self.n_features),
        )


def _tokens_of(sentence):
    return sentence.tokens if hasattr(sentence, "tokens") else sentence


def fit_feature_space(corpus, binary: bool = False) -> FeatureSpace:
    """Collect every 1/2/3-gram occurring in the corpus sentences.

    ``corpus`` may be a TrainingCorpus or any iterable of sentences or
    token sequences.
    """
    items = corpus.instances if hasattr(corpus, "instances") else corpus
    grams = set()
    n = 0
    for item in items:
        sentence = getattr(item, "sentence", item)
        grams.update(ngrams(_tokens_of(sentence)))
        n += 1
    if n == 0:
        raise EmptyCorpusError("cannot fit a feature space on an empty corpus")
    return FeatureSpace({g: i for i, g in enumerate(sorted(grams))}, binary=binary)


def vectorize(sentence, space: FeatureSpace) -> FeatureVector:
    return space.vectorize(sentence)
