"""Immutable analytics snapshot served to the dashboard.

A snapshot bundles everything the read-only service needs — taxonomy,
extraction records, review/store metadata, fitted models, and precomputed
stats/trends/map/importance — built in one pass from one extraction set so
the members are mutually consistent. The content hash covers every member
(not the build timestamp) and is verified on load.
"""

from __future__ import annotations

import datetime as dt
import os
from dataclasses import dataclass

from ..analytics import (
    AnalyticsError,
    FittedModel,
    RankDeficiencyError,
    build_design,
    fit_ols,
    importance,
    mention_stats,
    perceptual_map,
    store_attribute_means,
    trend_series,
)
from ..corpus.models import Review, Store
from ..corpus.store import content_hash, read_document, write_document
from ..extraction import ReviewExtraction
from ..taxonomy import Taxonomy


class SnapshotIntegrityError(Exception):
    pass


@dataclass
class Snapshot:
    payload: dict

    @property
    def hash(self) -> str:
        return self.payload["content_hash"]

    @property
    def taxonomy(self) -> Taxonomy:
        return Taxonomy.from_payload(self.payload["taxonomy"])

    @property
    def extractions(self) -> list[ReviewExtraction]:
        return [ReviewExtraction.from_record(r) for r in self.payload["extractions"]]

    @property
    def reviews(self) -> dict[str, Review]:
        return {r["review_id"]: Review.from_record(r) for r in self.payload["reviews"]}

    @property
    def stores(self) -> dict[str, Store]:
        return {s["store_id"]: Store.from_record(s) for s in self.payload["stores"]}

    def model(self, level: str) -> FittedModel | None:
        raw = self.payload["models"].get(level)
        return FittedModel.from_payload(raw) if raw else None


def _content_payload(payload: dict) -> dict:
    return {k: v for k, v in payload.items() if k not in ("content_hash", "built_at")}


def _build_timestamp() -> str:
    """Wall clock, unless SOURCE_DATE_EPOCH pins it for reproducible builds."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch:
        return dt.datetime.fromtimestamp(int(epoch), dt.timezone.utc).isoformat()
    return dt.datetime.now(dt.timezone.utc).isoformat()


def build_snapshot(
    taxonomy: Taxonomy,
    extractions: list[ReviewExtraction],
    reviews: dict[str, Review],
    stores: dict[str, Store],
    controls: bool = False,
    min_trend_support: int = 30,
) -> Snapshot:
    payload: dict = {
        "taxonomy": taxonomy.to_payload(),
        "extractions": [ex.to_record() for ex in extractions],
        "reviews": [reviews[k].to_record() for k in sorted(reviews)],
        "stores": [stores[k].to_record() for k in sorted(stores)],
        "models": {},
        "stats": {},
        "notes": [],
    }

    for level in ("attribute", "feature"):
        payload["models"][level] = None
        excluded: set[str] = set()
        # degenerate indicator columns get their whole item excluded, like an
        # analyst dropping collinear regressors; every exclusion is noted
        for _ in range(12):
            try:
                design = build_design(
                    extractions,
                    reviews,
                    level=level,
                    controls=controls,
                    exclude_items=tuple(sorted(excluded)),
                )
                model = fit_ols(design, level=level)
                payload["models"][level] = model.to_payload()
                if excluded:
                    payload["notes"].append(
                        f"{level} model: excluded collinear items {sorted(excluded)}"
                    )
                break
            except RankDeficiencyError as exc:
                offending_items = {
                    col.split("::")[0]
                    for col in exc.columns
                    if "::" in col
                    and not col.startswith(("store::", "year::", "join_year::"))
                }
                if not offending_items or offending_items <= excluded:
                    payload["notes"].append(f"{level} model unavailable: {exc}")
                    break
                excluded |= offending_items
            except AnalyticsError as exc:
                payload["notes"].append(f"{level} model unavailable: {exc}")
                break

    payload["stats"]["attribute"] = mention_stats(extractions, level="attribute").to_payload()
    payload["stats"]["feature"] = mention_stats(extractions, level="feature").to_payload()
    payload["trends"] = trend_series(
        extractions, reviews, level="attribute", min_support=min_trend_support
    ).to_payload()

    attr_model_raw = payload["models"]["attribute"]
    if attr_model_raw:
        model = FittedModel.from_payload(attr_model_raw)
        try:
            payload["importance"] = importance(model)
        except AnalyticsError as exc:
            payload["importance"] = None
            payload["notes"].append(f"importance unavailable: {exc}")
    else:
        payload["importance"] = None

    try:
        matrix, store_ids, names = store_attribute_means(
            extractions, reviews, taxonomy.attribute_names()
        )
        payload["map"] = perceptual_map(matrix, store_ids, names).to_payload()
    except AnalyticsError as exc:
        payload["map"] = None
        payload["notes"].append(f"perceptual map unavailable: {exc}")

    payload["content_hash"] = content_hash(_content_payload(payload))
    payload["built_at"] = _build_timestamp()
    return Snapshot(payload=payload)


def save_snapshot(snapshot: Snapshot, path) -> None:
    write_document(path, "snapshot", snapshot.payload)


def load_snapshot(path) -> Snapshot:
    payload = read_document(path, "snapshot")
    expected = payload.get("content_hash")
    actual = content_hash(_content_payload(payload))
    if expected != actual:
        raise SnapshotIntegrityError(
            f"snapshot hash mismatch: stored {expected!r}, recomputed {actual!r}"
        )
    return Snapshot(payload=payload)
