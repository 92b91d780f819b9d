"""Read-only HTTP service over an immutable snapshot.

Every response is a pure function of (snapshot hash, request): the service
never mutates state and never calls the model backend. Payloads carry an
explicit schema version so clients can pin compatibility.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..analytics.regression import FittedModel
from ..extraction import Sentiment3, to_3pt
from ..whatif import UnknownFeatureError, WhatIfError, simulate_uplift
from .snapshot import Snapshot

API_SCHEMA_VERSION = 1


def _versioned(payload: dict) -> dict:
    return {"schema_version": API_SCHEMA_VERSION, **payload}


def _store_item_stats(snapshot: Snapshot, store_id: str, level: str) -> list[dict]:
    reviews = snapshot.reviews
    rows: dict[str, dict] = {}
    store_reviews = 0
    for ex in snapshot.extractions:
        review = reviews.get(ex.review_id)
        if review is None or review.store_id != store_id:
            continue
        store_reviews += 1
        if level == "attribute":
            found = [(a.name, a.sentiment) for a in ex.attributes]
        else:
            found = [(f.name, f.sentiment) for a in ex.attributes for f in a.features]
        seen = set()
        for name, score in found:
            row = rows.setdefault(name, {"name": name, "n_mentions": 0, "pos": 0, "neg": 0})
            if name in seen:
                continue
            seen.add(name)
            row["n_mentions"] += 1
            cls = to_3pt(score)
            if cls is Sentiment3.POSITIVE:
                row["pos"] += 1
            elif cls is Sentiment3.NEGATIVE:
                row["neg"] += 1
    out = []
    for row in sorted(rows.values(), key=lambda r: (-r["n_mentions"], r["name"])):
        non_neutral = row["pos"] + row["neg"]
        out.append(
            {
                "name": row["name"],
                "mention": row["n_mentions"] / store_reviews if store_reviews else 0.0,
                "n_mentions": row["n_mentions"],
                "share_pos": row["pos"] / non_neutral if non_neutral else None,
                "share_neg": row["neg"] / non_neutral if non_neutral else None,
            }
        )
    return out


def create_app(snapshot: Snapshot, static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="reviewlens analytics", docs_url=None, redoc_url=None)
    reviews = snapshot.reviews
    stores = snapshot.stores

    @app.get("/api/v1/meta")
    def meta():
        return _versioned(
            {
                "snapshot_hash": snapshot.hash,
                "built_at": snapshot.payload.get("built_at"),
                "counts": {
                    "reviews": len(snapshot.payload["reviews"]),
                    "extractions": len(snapshot.payload["extractions"]),
                    "stores": len(snapshot.payload["stores"]),
                },
                "notes": snapshot.payload.get("notes", []),
            }
        )

    @app.get("/api/v1/taxonomy")
    def taxonomy():
        return _versioned({"taxonomy": snapshot.payload["taxonomy"]})

    @app.get("/api/v1/stores")
    def store_list():
        per_store: dict[str, list[int]] = {}
        for review in reviews.values():
            per_store.setdefault(review.store_id, []).append(review.stars)
        out = []
        for store_id in sorted(stores):
            s = stores[store_id]
            ratings = per_store.get(store_id, [])
            out.append(
                {
                    "store_id": store_id,
                    "name": s.name,
                    "state": s.state,
                    "latitude": s.latitude,
                    "longitude": s.longitude,
                    "n_reviews": len(ratings),
                    "avg_stars": sum(ratings) / len(ratings) if ratings else None,
                }
            )
        return _versioned({"stores": out})

    @app.get("/api/v1/stores/{store_id}")
    def store_detail(store_id: str):
        if store_id not in stores:
            raise HTTPException(status_code=404, detail=f"unknown store {store_id!r}")
        snippets = [
            r.text[:240]
            for r in sorted(reviews.values(), key=lambda r: r.review_id)
            if r.store_id == store_id
        ][:3]
        return _versioned(
            {
                "store_id": store_id,
                "attributes": _store_item_stats(snapshot, store_id, "attribute"),
                "features": _store_item_stats(snapshot, store_id, "feature"),
                "snippets": snippets,
            }
        )

    @app.get("/api/v1/trends")
    def trends(attribute: str):
        known = {a["name"] for a in snapshot.payload["taxonomy"]["attributes"]}
        if attribute not in known:
            raise HTTPException(status_code=404, detail=f"unknown attribute {attribute!r}")
        all_points = snapshot.payload["trends"]["points"]
        crossings = snapshot.payload["trends"]["crossings"]
        return _versioned(
            {
                "attribute": attribute,
                "points": [p for p in all_points if p["item"] == attribute],
                "crossings": [c["period"] for c in crossings if c["item"] == attribute],
            }
        )

    @app.get("/api/v1/stats")
    def stats(level: str = "attribute"):
        if level not in ("attribute", "feature"):
            raise HTTPException(status_code=400, detail="level must be attribute|feature")
        return _versioned({"stats": snapshot.payload["stats"][level]})

    @app.get("/api/v1/importance")
    def importance_endpoint():
        return _versioned({"importance": snapshot.payload.get("importance")})

    @app.get("/api/v1/map")
    def perceptual_map_endpoint():
        return _versioned({"map": snapshot.payload.get("map")})

    @app.get("/api/v1/model")
    def model(level: str = "feature"):
        raw = snapshot.payload["models"].get(level)
        if raw is None:
            raise HTTPException(status_code=404, detail=f"no fitted {level} model in snapshot")
        fitted = FittedModel.from_payload(raw)
        items = [
            {
                "name": item,
                "neutral": fitted.item_coef(item, "neutral"),
                "positive": fitted.item_coef(item, "positive"),
            }
            for item in fitted.items
        ]
        return _versioned(
            {
                "level": level,
                "items": items,
                "r_squared": fitted.r_squared,
                "adj_r_squared": fitted.adj_r_squared,
                "n_obs": fitted.n_obs,
            }
        )

    @app.post("/api/v1/simulate")
    def simulate(body: dict):
        errors = {}
        feature = body.get("feature")
        if not isinstance(feature, str) or not feature:
            errors["feature"] = "required string"
        scope = body.get("stores")
        if scope is not None and (
            not isinstance(scope, list) or not all(isinstance(s, str) for s in scope)
        ):
            errors["stores"] = "must be a list of store ids"
        if errors:
            return JSONResponse(status_code=400, content={"field_errors": errors})

        raw = snapshot.payload["models"].get("feature")
        if raw is None:
            raise HTTPException(status_code=400, detail="snapshot has no fitted feature model")
        fitted = FittedModel.from_payload(raw)
        try:
            report = simulate_uplift(
                snapshot.extractions,
                fitted,
                feature,
                reviews,
                store_scope=set(scope) if scope else None,
            )
        except UnknownFeatureError as exc:
            return JSONResponse(
                status_code=400, content={"field_errors": {"feature": str(exc)}}
            )
        except WhatIfError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return _versioned(report.to_payload())

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="dashboard")

    return app
