"""Sentence segmentation, tokenization and term sets.

Everything downstream (matching, features, evaluation) sees text only
through these functions, so they are kept deterministic and free of
any statistical model.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

_BLANK_LINE = re.compile(r"\n[^\S\n]*\n\s*")
_TERMINATOR = re.compile(r"[.?!]+(?=\s)")


@lru_cache(maxsize=1)
def abbreviations() -> tuple[str, ...]:
    """Lowercased abbreviations that never end a sentence, longest first."""
    raw = resources.files("revex.data").joinpath("abbreviations.txt").read_text("utf-8")
    entries = {
        line.strip().lower()
        for line in raw.splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    }
    return tuple(sorted(entries, key=lambda a: (-len(a), a)))


def tokenize(text: str) -> list[str]:
    """Lowercase ``text`` and split it on every run of non-alphanumerics.

    >>> tokenize("Fasting tHcy 8.5 mol/L")
    ['fasting', 'thcy', '8', '5', 'mol', 'l']
    """
    return [
        "".join(chars)
        for is_alnum, chars in itertools.groupby(text.lower(), key=str.isalnum)
        if is_alnum
    ]


def term_set(tokens) -> frozenset[str]:
    return frozenset(tokens)


@dataclass(frozen=True)
class Sentence:
    doc_id: str
    index: int
    text: str
    tokens: tuple[str, ...] = field(init=False, repr=False, compare=False)
    term_set: frozenset[str] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        toks = tuple(tokenize(self.text))
        object.__setattr__(self, "tokens", toks)
        object.__setattr__(self, "term_set", term_set(toks))


@dataclass(frozen=True)
class Document:
    id: str
    sentences: tuple[Sentence, ...]

    def __len__(self):
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    def __getitem__(self, index):
        return self.sentences[index]


def _is_abbreviation(block: str, end: int) -> bool:
    # ``end`` is the index one past the terminating period.
    head = block[:end].lower()
    for abbr in abbreviations():
        if head.endswith(abbr):
            start = end - len(abbr)
            if start == 0 or not block[start - 1].isalnum():
                return True
    return False


def _split_block(block: str) -> list[str]:
    pieces = []
    start = 0
    for m in _TERMINATOR.finditer(block):
        nxt = block[m.end():].lstrip()
        if not nxt or not (nxt[0].isupper() or nxt[0].isdigit()):
            continue
        if m.group() == "." and _is_abbreviation(block, m.end()):
            continue
        pieces.append(block[start:m.end()])
        start = m.end()
    pieces.append(block[start:])
    return pieces


def segment_sentences(text: str, doc_id: str = "") -> list[Sentence]:
    """Split raw article text into sentences.

    A sentence ends at ``.``, ``?`` or ``!`` followed by whitespace and an
    uppercase letter or a digit, unless the period closes a listed
    abbreviation. Blank lines always end a sentence.
    """
    texts = []
    for block in _BLANK_LINE.split(text):
        for piece in _split_block(block):
            piece = piece.strip()
            if piece:
                texts.append(piece)
    return [Sentence(doc_id, i, t) for i, t in enumerate(texts)]


def make_document(doc_id: str, text: str) -> Document:
    return Document(doc_id, tuple(segment_sentences(text, doc_id)))


def load_document(path) -> Document:
    """Read a UTF-8 article; the file stem becomes the document id."""
    path = Path(path)
    return make_document(path.stem, path.read_text(encoding="utf-8"))


def load_documents(directory) -> dict[str, Document]:
    directory = Path(directory)
    return {p.stem: load_document(p) for p in sorted(directory.glob("*.txt"))}
