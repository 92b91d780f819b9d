"""Build the dashboard test fixture snapshot.

The corpus is constructed so the fitted feature model has a neutral
coefficient of exactly .19 (group means 3.19 vs 3.00), which makes the
all-negative store's simulated uplift .19 and its revenue range
[.95%, 1.71%]. Run from the repository root:

    python3 frontend/scripts/make_fixture_snapshot.py
"""

from __future__ import annotations

import datetime as dt
import os
import sys
from pathlib import Path

from reviewlens.corpus.models import Review, Store
from reviewlens.extraction import AttributeExtraction, FeatureExtraction, ReviewExtraction
from reviewlens.interface.snapshot import build_snapshot, save_snapshot
from reviewlens.taxonomy import load_default_taxonomy

FEATURE = "Service Efficiency & Speed/Wait Time"
CS = "Customer Service"
AMBIANCE = "Store Ambiance & Atmosphere"
COFFEE = "Coffee & Beverage"

OUT = Path(__file__).resolve().parent.parent / "test" / "fixtures" / "snapshot.json"


def extraction(review_id: str, feature_score: int | None, extra: dict[str, int]) -> ReviewExtraction:
    attrs = []
    if feature_score is not None:
        attrs.append(
            AttributeExtraction(
                name=CS,
                sentiment=feature_score,
                sentence_indices=(0,),
                features=(
                    FeatureExtraction(
                        name=FEATURE, sentiment=feature_score, sentence_indices=(0,)
                    ),
                ),
            )
        )
    for name, score in extra.items():
        attrs.append(
            AttributeExtraction(name=name, sentiment=score, sentence_indices=(0,))
        )
    return ReviewExtraction(
        review_id=review_id,
        overall=feature_score or 3,
        attributes=tuple(attrs),
        other_attribute_sentences=() if attrs else (0,),
        n_sentences=1,
    )


def main() -> None:
    taxonomy = load_default_taxonomy()
    stores = {
        "neg-store": Store("neg-store", "Roast House Downtown", "PA", 39.95, -75.16),
        "mid-store": Store("mid-store", "Roast House Uptown", "PA", 40.05, -75.10),
        "pos-store": Store("pos-store", "Roast House Riverside", "NJ", 40.72, -74.04),
        "silent-store": Store("silent-store", "Roast House Depot", "NJ", None, None),
    }

    extractions: list[ReviewExtraction] = []
    reviews: dict[str, Review] = {}
    counter = 0

    def add(store_id: str, stars: int, feature_score: int | None, extra: dict[str, int], year: int):
        nonlocal counter
        rid = f"fx-{counter:04d}"
        counter += 1
        extractions.append(extraction(rid, feature_score, extra))
        reviews[rid] = Review(
            review_id=rid,
            store_id=store_id,
            reviewer_id=f"u{counter % 9}",
            date=dt.date(year, 1 + counter % 12, 1 + counter % 28),
            stars=stars,
            text=f"Fixture review {rid} about the wait and the room.",
            state=stores[store_id].state,
            reviewer_join_year=2010,
            reviewer_elite_years=counter % 3,
        )

    def side_mentions(i: int, base: dict[str, int]) -> dict[str, int]:
        extra = {}
        if i % 4 != 0:
            extra[AMBIANCE] = base[AMBIANCE]
        if i % 5 != 0:
            extra[COFFEE] = base[COFFEE]
        return extra

    # negative group: 100 reviews, mean stars 3.00 -> reference level
    for i in range(100):
        add("neg-store", 3, 1,
            side_mentions(i, {AMBIANCE: 4 if i % 2 else 2, COFFEE: 2 if i % 3 else 3}),
            2016 + i % 6)
    # neutral group: 81x3 + 19x4 -> mean 3.19 -> neutral coefficient .19
    for i in range(100):
        add("mid-store", 4 if i < 19 else 3, 3,
            side_mentions(i, {AMBIANCE: 3 if i % 2 else 5, COFFEE: 4 if i % 3 else 3}),
            2012 + i % 10)
    # positive group: 43x3 + 57x4 -> mean 3.57 -> positive coefficient .57
    for i in range(100):
        add("pos-store", 4 if i < 57 else 3, 5,
            side_mentions(i, {AMBIANCE: 5 if i % 2 else 1, COFFEE: 5 if i % 2 else 4}),
            2012 + i % 4)
    # silent group: never mentions the feature, mean stars 3.00
    for i in range(10):
        add("silent-store", 3, None,
            side_mentions(i, {AMBIANCE: 4 if i % 2 else 2, COFFEE: 3 if i % 2 else 1}),
            2013 + i % 3)

    os.environ.setdefault("SOURCE_DATE_EPOCH", "1700000000")
    snapshot = build_snapshot(
        taxonomy, extractions, reviews, stores, controls=False, min_trend_support=1
    )
    feature_model = snapshot.model("feature")
    neutral = feature_model.item_coef(FEATURE, "neutral")
    positive = feature_model.item_coef(FEATURE, "positive")
    assert abs(neutral - 0.19) < 1e-9, neutral
    assert abs(positive - 0.57) < 1e-9, positive
    save_snapshot(snapshot, OUT)
    print(f"wrote {OUT} (hash {snapshot.hash[:12]}, neutral={neutral}, positive={positive})")


if __name__ == "__main__":
    sys.exit(main())
