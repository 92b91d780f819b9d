"""Corpus ingestion from Yelp-open-dataset style line-delimited files.

Three source files: reviews (one JSON object per line with review_id,
user_id, business_id, stars, date, text), businesses (business_id, name,
state, categories, coordinates) and, optionally, users (user_id,
yelping_since, elite). Reviews are joined to businesses on business_id;
unjoinable records are skipped with a warning count, malformed lines are
counted and skipped. Sampling without replacement is a seeded permutation
so a (source, filter, seed) triple always yields the same ReviewSet.
"""

from __future__ import annotations

import datetime as dt
import json
import random
from dataclasses import dataclass
from pathlib import Path

from .models import CorpusError, InvalidReviewError, Review, ReviewSet, Store


class IngestError(CorpusError):
    """Fatal ingest failure (missing file, unreadable source)."""


@dataclass(frozen=True)
class IngestFilter:
    """Business predicate plus sampling controls.

    A business matches when its categories contain ``category_contains``
    (case-insensitive substring) and its name contains ``name_contains``.
    Either may be None (no constraint). ``sample_size`` reviews are drawn
    without replacement using ``seed``; None keeps every match.
    """

    category_contains: str | None = None
    name_contains: str | None = None
    sample_size: int | None = None
    seed: int = 0
    date_from: dt.date | None = None
    date_to: dt.date | None = None

    def matches_business(self, business: dict) -> bool:
        if self.category_contains is not None:
            cats = business.get("categories") or ""
            if isinstance(cats, list):
                cats = ", ".join(cats)
            if self.category_contains.lower() not in cats.lower():
                return False
        if self.name_contains is not None:
            if self.name_contains.lower() not in (business.get("name") or "").lower():
                return False
        return True

    def in_window(self, date: dt.date) -> bool:
        if self.date_from is not None and date < self.date_from:
            return False
        if self.date_to is not None and date > self.date_to:
            return False
        return True

    def to_record(self) -> dict:
        return {
            "category_contains": self.category_contains,
            "name_contains": self.name_contains,
            "sample_size": self.sample_size,
            "seed": self.seed,
            "date_from": self.date_from.isoformat() if self.date_from else None,
            "date_to": self.date_to.isoformat() if self.date_to else None,
        }


def _iter_json_lines(path: Path):
    """Yield (parsed_object | None) per non-empty line; None marks malformed."""
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError:
                yield None
                continue
            yield obj if isinstance(obj, dict) else None


def _parse_date(raw: str) -> dt.date:
    return dt.date.fromisoformat(raw[:10])


def _elite_years_before(elite_field, review_year: int) -> int:
    """Count elite-status years strictly before the review's year."""
    if not elite_field:
        return 0
    if isinstance(elite_field, str):
        parts = [p for p in elite_field.split(",") if p.strip()]
    else:
        parts = list(elite_field)
    years = set()
    for p in parts:
        try:
            years.add(int(p))
        except (TypeError, ValueError):
            continue
    return sum(1 for y in years if y < review_year)


def ingest_reviews(
    review_path: str | Path,
    business_path: str | Path,
    filter: IngestFilter,
    user_path: str | Path | None = None,
) -> ReviewSet:
    """Load, join, filter and deterministically sample the review corpus."""
    review_path = Path(review_path)
    business_path = Path(business_path)
    for p in (review_path, business_path):
        if not p.exists():
            raise IngestError(f"source file not found: {p}")
    if user_path is not None:
        user_path = Path(user_path)
        if not user_path.exists():
            raise IngestError(f"source file not found: {user_path}")

    result = ReviewSet()

    businesses: dict[str, dict] = {}
    for obj in _iter_json_lines(business_path):
        if obj is None or "business_id" not in obj:
            result.skipped_malformed += 1
            continue
        businesses[obj["business_id"]] = obj

    users: dict[str, dict] = {}
    if user_path is not None:
        for obj in _iter_json_lines(user_path):
            if obj is None or "user_id" not in obj:
                result.skipped_malformed += 1
                continue
            users[obj["user_id"]] = obj

    matched: list[Review] = []
    for obj in _iter_json_lines(review_path):
        if obj is None:
            result.skipped_malformed += 1
            continue
        try:
            store_id = obj["business_id"]
            date = _parse_date(obj["date"])
            business = businesses.get(store_id)
            if business is None:
                result.skipped_unjoinable += 1
                continue
            if not filter.matches_business(business) or not filter.in_window(date):
                result.skipped_filtered += 1
                continue
            user = users.get(obj.get("user_id", ""), {})
            join_year = None
            if user.get("yelping_since"):
                join_year = _parse_date(user["yelping_since"]).year
            review = Review(
                review_id=obj["review_id"],
                store_id=store_id,
                reviewer_id=obj.get("user_id", ""),
                date=date,
                stars=int(obj["stars"]),
                text=obj["text"],
                state=business.get("state", ""),
                reviewer_join_year=join_year,
                reviewer_elite_years=_elite_years_before(user.get("elite"), date.year),
            )
        except (KeyError, TypeError, ValueError, InvalidReviewError):
            result.skipped_malformed += 1
            continue
        matched.append(review)

    if filter.sample_size is not None and filter.sample_size < len(matched):
        rng = random.Random(filter.seed)
        order = list(range(len(matched)))
        rng.shuffle(order)
        keep = sorted(order[: filter.sample_size])
        result.skipped_filtered += len(matched) - len(keep)
        matched = [matched[i] for i in keep]

    result.reviews = matched
    for review in matched:
        if review.store_id not in result.stores:
            b = businesses[review.store_id]
            result.stores[review.store_id] = Store(
                store_id=review.store_id,
                name=b.get("name", ""),
                state=b.get("state", ""),
                latitude=b.get("latitude"),
                longitude=b.get("longitude"),
            )
    return result
