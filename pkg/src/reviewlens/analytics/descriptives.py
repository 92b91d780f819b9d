"""Mention/sentiment tables, NPS-style shares, and yearly trend series."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..corpus.models import Review
from ..extraction import ReviewExtraction, Sentiment3, to_3pt


class AnalyticsError(Exception):
    pass


DEFAULT_FEATURE_REPORT_FLOOR = 0.03


@dataclass(frozen=True)
class ItemStats:
    name: str
    attribute: str | None  # owning attribute for feature rows
    mention: float  # fraction of reviews mentioning the item
    positive: float  # fraction of all reviews, 3-point collapse
    negative: float
    n_mentions: int


@dataclass
class MentionStats:
    level: str
    total_reviews: int
    rows: list[ItemStats]  # every item, mention-descending
    report_floor: float
    suppressed: list[str] = field(default_factory=list)

    @property
    def reported(self) -> list[ItemStats]:
        return [r for r in self.rows if r.mention >= self.report_floor]

    def to_payload(self) -> dict:
        return {
            "level": self.level,
            "total_reviews": self.total_reviews,
            "report_floor": self.report_floor,
            "suppressed": self.suppressed,
            "rows": [
                {
                    "name": r.name,
                    "attribute": r.attribute,
                    "mention": r.mention,
                    "positive": r.positive,
                    "negative": r.negative,
                    "n_mentions": r.n_mentions,
                }
                for r in self.rows
            ],
        }


def _iter_items(ex: ReviewExtraction, level: str):
    """Yield (item name, owning attribute, sentiment score) per mention."""
    if level == "attribute":
        for a in ex.attributes:
            yield a.name, None, a.sentiment
    elif level == "feature":
        for a in ex.attributes:
            for f in a.features:
                yield f.name, a.name, f.sentiment
    else:
        raise AnalyticsError(f"level must be 'attribute' or 'feature', got {level!r}")


def mention_stats(
    extractions: list[ReviewExtraction],
    level: str = "attribute",
    report_floor: float | None = None,
) -> MentionStats:
    """Per-item mention fraction plus positive/negative fractions of all
    reviews. Items below the report floor stay in ``rows`` but are omitted
    from ``reported``."""
    extractions = list(extractions)
    if not extractions:
        raise AnalyticsError("no extractions to summarize")
    if report_floor is None:
        report_floor = DEFAULT_FEATURE_REPORT_FLOOR if level == "feature" else 0.0

    total = len(extractions)
    counts: dict[str, dict] = {}
    for ex in extractions:
        seen: set[str] = set()
        for name, attribute, score in _iter_items(ex, level):
            entry = counts.setdefault(
                name, {"attribute": attribute, "mention": 0, "pos": 0, "neg": 0}
            )
            if name in seen:
                continue
            seen.add(name)
            entry["mention"] += 1
            cls = to_3pt(score)
            if cls is Sentiment3.POSITIVE:
                entry["pos"] += 1
            elif cls is Sentiment3.NEGATIVE:
                entry["neg"] += 1

    rows = [
        ItemStats(
            name=name,
            attribute=e["attribute"],
            mention=e["mention"] / total,
            positive=e["pos"] / total,
            negative=e["neg"] / total,
            n_mentions=e["mention"],
        )
        for name, e in counts.items()
    ]
    rows.sort(key=lambda r: (-r.mention, r.name))
    stats = MentionStats(level=level, total_reviews=total, rows=rows, report_floor=report_floor)
    stats.suppressed = [r.name for r in rows if r.mention < report_floor]
    return stats


# ---------------------------------------------------------------------------
# shares among non-neutral mentions


@dataclass(frozen=True)
class ShareRow:
    group: str | int | None  # store id, calendar year, or None
    item: str
    share_pos: float | None
    share_neg: float | None
    n_pos: int
    n_neg: int
    n_neutral: int

    @property
    def defined(self) -> bool:
        return self.share_pos is not None


def sentiment_shares(
    extractions: list[ReviewExtraction],
    level: str = "attribute",
    group_by: str = "none",
    reviews: dict[str, Review] | None = None,
) -> list[ShareRow]:
    """Positive/negative shares among non-neutral mentions, the NPS-like
    balance measure. A group with only neutral mentions is flagged
    undefined, never reported as zero."""
    if group_by not in ("none", "store", "period"):
        raise AnalyticsError(f"group_by must be none|store|period, got {group_by!r}")
    if group_by != "none" and reviews is None:
        raise AnalyticsError("grouping by store or period requires the review map")

    tallies: dict[tuple, dict] = {}
    for ex in extractions:
        if group_by == "none":
            group = None
        else:
            review = reviews.get(ex.review_id)
            if review is None:
                raise AnalyticsError(f"extraction {ex.review_id!r} has no matching review")
            group = review.store_id if group_by == "store" else review.date.year
        for name, _attr, score in _iter_items(ex, level):
            t = tallies.setdefault((group, name), {"pos": 0, "neg": 0, "neu": 0})
            cls = to_3pt(score)
            if cls is Sentiment3.POSITIVE:
                t["pos"] += 1
            elif cls is Sentiment3.NEGATIVE:
                t["neg"] += 1
            else:
                t["neu"] += 1

    rows = []
    for (group, name), t in sorted(tallies.items(), key=lambda kv: (str(kv[0][0]), kv[0][1])):
        non_neutral = t["pos"] + t["neg"]
        share_pos = t["pos"] / non_neutral if non_neutral else None
        share_neg = t["neg"] / non_neutral if non_neutral else None
        rows.append(
            ShareRow(
                group=group,
                item=name,
                share_pos=share_pos,
                share_neg=share_neg,
                n_pos=t["pos"],
                n_neg=t["neg"],
                n_neutral=t["neu"],
            )
        )
    return rows


# ---------------------------------------------------------------------------
# yearly trend series


@dataclass(frozen=True)
class TrendPoint:
    period: int
    item: str
    mention: float
    share_pos: float | None
    share_neg: float | None
    n_reviews: int
    low_support: bool


@dataclass
class TrendSeries:
    points: list[TrendPoint]
    crossings: list[tuple[str, int]]  # (item, period where negative overtakes)

    def for_item(self, item: str) -> list[TrendPoint]:
        return [p for p in self.points if p.item == item]

    def to_payload(self) -> dict:
        return {
            "points": [
                {
                    "period": p.period,
                    "item": p.item,
                    "mention": p.mention,
                    "share_pos": p.share_pos,
                    "share_neg": p.share_neg,
                    "n_reviews": p.n_reviews,
                    "low_support": p.low_support,
                }
                for p in self.points
            ],
            "crossings": [{"item": i, "period": y} for i, y in self.crossings],
        }


def trend_series(
    extractions: list[ReviewExtraction],
    reviews: dict[str, Review],
    level: str = "attribute",
    min_support: int = 30,
) -> TrendSeries:
    """One point per calendar year per item; years with no reviews are
    omitted, years under ``min_support`` reviews are flagged."""
    by_year: dict[int, list[ReviewExtraction]] = {}
    for ex in extractions:
        review = reviews.get(ex.review_id)
        if review is None:
            raise AnalyticsError(f"extraction {ex.review_id!r} has no matching review")
        by_year.setdefault(review.date.year, []).append(ex)

    points: list[TrendPoint] = []
    for year in sorted(by_year):
        subset = by_year[year]
        stats = mention_stats(subset, level=level, report_floor=0.0)
        shares = {row.item: row for row in sentiment_shares(subset, level=level)}
        for row in stats.rows:
            share = shares.get(row.name)
            points.append(
                TrendPoint(
                    period=year,
                    item=row.name,
                    mention=row.mention,
                    share_pos=share.share_pos if share else None,
                    share_neg=share.share_neg if share else None,
                    n_reviews=len(subset),
                    low_support=len(subset) < min_support,
                )
            )

    crossings: list[tuple[str, int]] = []
    items = sorted({p.item for p in points})
    for item in items:
        series = sorted(
            (p for p in points if p.item == item and p.share_pos is not None),
            key=lambda p: p.period,
        )
        for prev, cur in zip(series, series[1:]):
            if prev.share_pos >= prev.share_neg and cur.share_neg > cur.share_pos:
                crossings.append((item, cur.period))
    return TrendSeries(points=points, crossings=crossings)
