"""Feature-uplift simulation and the revenue-range proxy.

A one-level sentiment improvement moves a negative mention to neutral and a
neutral mention to positive; positive mentions and reviews that never
mention the feature are left untouched. Because the sentiment dummies enter
the rating model linearly, the predicted rating delta per review is just a
coefficient difference (no refit): negative -> neutral adds the neutral
coefficient, neutral -> positive adds positive minus neutral. Per-store
effects average the per-review deltas over all of the store's reviews
(non-mentioning reviews count as zero terms; a switch restricts the
denominator to mentioning reviews).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .analytics.regression import FittedModel
from .corpus.models import Review
from .extraction import ReviewExtraction, Sentiment3, to_3pt


class WhatIfError(Exception):
    pass


class UnknownFeatureError(WhatIfError):
    pass


REVENUE_LOW_RATE = 0.05
REVENUE_HIGH_RATE = 0.09


def revenue_proxy(
    delta_rating: float,
    low: float = REVENUE_LOW_RATE,
    high: float = REVENUE_HIGH_RATE,
) -> tuple[float, float]:
    """Rating delta -> revenue-change range in percent, from the published
    5-9% revenue lift per rating star."""
    if delta_rating < 0:
        raise WhatIfError(f"rating delta must be non-negative, got {delta_rating}")
    # round past float noise so .19 maps to exactly (.95, 1.71)
    return (round(delta_rating * low * 100, 12), round(delta_rating * high * 100, 12))


@dataclass(frozen=True)
class StoreImpact:
    store_id: str
    delta: float
    n_reviews: int
    n_mentions: int
    revenue_low_pct: float
    revenue_high_pct: float


@dataclass
class ImpactReport:
    feature: str
    stores: list[StoreImpact]
    mean: float
    sd: float
    min: float
    max: float
    histogram_bin_width: float
    histogram: list[int] = field(default_factory=list)

    def to_payload(self) -> dict:
        return {
            "feature": self.feature,
            "stores": [
                {
                    "store_id": s.store_id,
                    "delta": s.delta,
                    "n_reviews": s.n_reviews,
                    "n_mentions": s.n_mentions,
                    "revenue_low_pct": s.revenue_low_pct,
                    "revenue_high_pct": s.revenue_high_pct,
                }
                for s in self.stores
            ],
            "mean": self.mean,
            "sd": self.sd,
            "min": self.min,
            "max": self.max,
            "histogram_bin_width": self.histogram_bin_width,
            "histogram": self.histogram,
        }


def review_delta(extraction: ReviewExtraction, model: FittedModel, feature: str) -> float:
    """Predicted rating change for one review under a one-level improvement."""
    score = extraction.feature_sentiment(feature)
    if score is None:
        return 0.0
    cls = to_3pt(score)
    neutral = model.item_coef(feature, "neutral") or 0.0
    positive = model.item_coef(feature, "positive") or 0.0
    if cls is Sentiment3.NEGATIVE:
        return neutral  # negative is the zero reference
    if cls is Sentiment3.NEUTRAL:
        return positive - neutral
    return 0.0  # already positive: left unchanged


def simulate_uplift(
    extractions: list[ReviewExtraction],
    model: FittedModel,
    feature: str,
    reviews: dict[str, Review],
    store_scope: set[str] | None = None,
    include_non_mentioning: bool = True,
    histogram_bin_width: float = 0.05,
) -> ImpactReport:
    """Distribution of per-store mean rating deltas for one feature."""
    if not model.has_item(feature):
        raise UnknownFeatureError(f"feature {feature!r} is not in the fitted model")

    per_store: dict[str, list[tuple[float, bool]]] = {}
    for ex in extractions:
        review = reviews.get(ex.review_id)
        if review is None:
            raise WhatIfError(f"extraction {ex.review_id!r} has no matching review")
        if store_scope is not None and review.store_id not in store_scope:
            continue
        mentioned = ex.feature_sentiment(feature) is not None
        per_store.setdefault(review.store_id, []).append(
            (review_delta(ex, model, feature), mentioned)
        )
    if not per_store:
        raise WhatIfError("no reviews in scope")

    stores: list[StoreImpact] = []
    for store_id in sorted(per_store):
        entries = per_store[store_id]
        pool = entries if include_non_mentioning else [e for e in entries if e[1]]
        delta = sum(d for d, _ in pool) / len(pool) if pool else 0.0
        low, high = revenue_proxy(max(delta, 0.0))
        stores.append(
            StoreImpact(
                store_id=store_id,
                delta=delta,
                n_reviews=len(entries),
                n_mentions=sum(1 for _, m in entries if m),
                revenue_low_pct=low,
                revenue_high_pct=high,
            )
        )

    deltas = [s.delta for s in stores]
    mean = sum(deltas) / len(deltas)
    sd = (sum((d - mean) ** 2 for d in deltas) / len(deltas)) ** 0.5
    lo, hi = min(deltas), max(deltas)
    n_bins = max(1, int((hi - lo) / histogram_bin_width) + 1) if hi > lo else 1
    histogram = [0] * n_bins
    for d in deltas:
        idx = min(int((d - lo) / histogram_bin_width), n_bins - 1) if hi > lo else 0
        histogram[idx] += 1

    return ImpactReport(
        feature=feature,
        stores=stores,
        mean=mean,
        sd=sd,
        min=lo,
        max=hi,
        histogram_bin_width=histogram_bin_width,
        histogram=histogram,
    )
