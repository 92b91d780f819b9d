"""Core corpus records: reviews, stores, sentences."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field


class CorpusError(Exception):
    """Base class for corpus-level failures."""


class InvalidReviewError(CorpusError):
    pass


@dataclass(frozen=True)
class Review:
    """One normalized corpus record.

    ``reviewer_elite_years`` counts elite-status years strictly before the
    review date; ``reviewer_join_year`` is the year the reviewer joined the
    platform (None when no reviewer metadata was joinable).
    """

    review_id: str
    store_id: str
    reviewer_id: str
    date: dt.date
    stars: int
    text: str
    state: str = ""
    reviewer_join_year: int | None = None
    reviewer_elite_years: int = 0

    def __post_init__(self) -> None:
        if self.stars not in (1, 2, 3, 4, 5):
            raise InvalidReviewError(
                f"review {self.review_id!r}: stars must be in 1..5, got {self.stars!r}"
            )
        if not self.text.strip():
            raise InvalidReviewError(f"review {self.review_id!r}: empty text")
        if self.reviewer_elite_years < 0:
            raise InvalidReviewError(
                f"review {self.review_id!r}: negative elite-year count"
            )

    def to_record(self) -> dict:
        return {
            "review_id": self.review_id,
            "store_id": self.store_id,
            "reviewer_id": self.reviewer_id,
            "date": self.date.isoformat(),
            "stars": self.stars,
            "text": self.text,
            "state": self.state,
            "reviewer_join_year": self.reviewer_join_year,
            "reviewer_elite_years": self.reviewer_elite_years,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "Review":
        return cls(
            review_id=rec["review_id"],
            store_id=rec["store_id"],
            reviewer_id=rec["reviewer_id"],
            date=dt.date.fromisoformat(rec["date"]),
            stars=int(rec["stars"]),
            text=rec["text"],
            state=rec.get("state", ""),
            reviewer_join_year=rec.get("reviewer_join_year"),
            reviewer_elite_years=int(rec.get("reviewer_elite_years", 0)),
        )


@dataclass(frozen=True)
class Store:
    """Business-side metadata for one store, joined at ingest time."""

    store_id: str
    name: str = ""
    state: str = ""
    latitude: float | None = None
    longitude: float | None = None

    def to_record(self) -> dict:
        return {
            "store_id": self.store_id,
            "name": self.name,
            "state": self.state,
            "latitude": self.latitude,
            "longitude": self.longitude,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "Store":
        return cls(
            store_id=rec["store_id"],
            name=rec.get("name", ""),
            state=rec.get("state", ""),
            latitude=rec.get("latitude"),
            longitude=rec.get("longitude"),
        )


@dataclass(frozen=True)
class Sentence:
    """One sentence of a review, 0-indexed by position."""

    index: int
    text: str


@dataclass
class ReviewSet:
    """Ingest output: filtered reviews plus the store table and skip counts."""

    reviews: list[Review] = field(default_factory=list)
    stores: dict[str, Store] = field(default_factory=dict)
    skipped_malformed: int = 0
    skipped_unjoinable: int = 0
    skipped_filtered: int = 0

    def __len__(self) -> int:
        return len(self.reviews)
