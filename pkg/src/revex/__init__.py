"""Distantly supervised data-element sentence extraction for systematic reviews."""

from revex.errors import (
    DataError,
    EmptyCorpusError,
    EmptyQueryError,
    MissingDocumentError,
    RevexError,
    SingleClassError,
    TooFewInstancesError,
)

__version__ = "0.1.0"

__all__ = [
    "DataError",
    "EmptyCorpusError",
    "EmptyQueryError",
    "MissingDocumentError",
    "RevexError",
    "SingleClassError",
    "TooFewInstancesError",
]
