"""Corpus ingestion, sentence splitting, and artifact persistence."""

from .ingest import IngestError, IngestFilter, ingest_reviews
from .models import CorpusError, InvalidReviewError, Review, ReviewSet, Sentence, Store
from .sentences import EmptyTextError, normalize_whitespace, reconstructs, split_sentences
from .store import (
    SCHEMA_VERSION,
    SchemaVersionError,
    append_manifest,
    canonical_json,
    content_hash,
    read_document,
    read_records,
    write_document,
    write_records,
)

__all__ = [
    "CorpusError",
    "EmptyTextError",
    "IngestError",
    "IngestFilter",
    "InvalidReviewError",
    "Review",
    "ReviewSet",
    "SCHEMA_VERSION",
    "SchemaVersionError",
    "Sentence",
    "Store",
    "append_manifest",
    "canonical_json",
    "content_hash",
    "ingest_reviews",
    "normalize_whitespace",
    "read_document",
    "read_records",
    "reconstructs",
    "split_sentences",
    "write_document",
    "write_records",
]
