"""Command-line driver for every pipeline stage.

Commands: ingest, discover, consolidate, extract, validate, analyze,
simulate, serve. Each command reads/writes the versioned artifact files and
appends a manifest entry (command, seed, counts, content hashes) next to
its outputs. Exit status 0 only on full success; pipeline failures exit 1
naming the failing step; usage errors exit 2.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import sys
from pathlib import Path

from .. import agreement
from ..analytics import build_design, fit_ols
from ..corpus import (
    IngestFilter,
    Review,
    Store,
    append_manifest,
    content_hash,
    ingest_reviews,
    read_document,
    read_records,
    write_document,
    write_records,
)
from ..extraction import ReviewExtraction, extract_corpus
from ..llm.client import (
    HttpBackend,
    LlmClient,
    ProceduralBackend,
    ReplayBackend,
    ResponseCache,
)
from ..taxonomy import (
    MergeMap,
    Taxonomy,
    consolidate,
    discover_candidates,
    load_default_taxonomy,
    sample_batches,
)
from ..whatif import simulate_uplift
from .snapshot import build_snapshot, load_snapshot, save_snapshot


class PipelineFailure(Exception):
    def __init__(self, step: str, message: str):
        self.step = step
        super().__init__(message)


def _load_reviews(path: str) -> list[Review]:
    return [Review.from_record(r) for r in read_records(path, "review")]


def _load_stores(path: str) -> dict[str, Store]:
    return {
        s["store_id"]: Store.from_record(s) for s in read_records(path, "store")
    }


def _load_extractions(path: str) -> list[ReviewExtraction]:
    return [ReviewExtraction.from_record(r) for r in read_records(path, "review_extraction")]


def _load_taxonomy(path: str | None) -> Taxonomy:
    if path is None:
        return load_default_taxonomy()
    return Taxonomy.from_payload(read_document(path, "taxonomy"))


def _make_client(args, taxonomy: Taxonomy | None) -> LlmClient:
    cache = ResponseCache(args.cache) if args.cache else ResponseCache()
    if args.backend == "http":
        if not args.endpoint:
            raise PipelineFailure("configure-backend", "--endpoint is required for the http backend")
        backend = HttpBackend(args.endpoint, credential_env=args.credential_env)
    elif args.backend == "replay":
        backend = ReplayBackend()
    else:
        backend = ProceduralBackend(taxonomy)
    return LlmClient(backend, model=args.model, cache=cache)


def _add_backend_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--backend", choices=("http", "replay", "procedural"), default="replay")
    parser.add_argument("--cache", help="response cache file (NDJSON)")
    parser.add_argument("--model", default="gpt-4.1-mini")
    parser.add_argument("--endpoint", help="chat-completions URL for the http backend")
    parser.add_argument("--credential-env", default="REVIEWLENS_API_KEY")


def _manifest(out_dir: Path, command: str, entry: dict) -> None:
    append_manifest(out_dir / "runs.ndjson", {"command": command, **entry})


# ---------------------------------------------------------------------------
# commands


def cmd_ingest(args) -> int:
    out_dir = Path(args.out_dir)
    date_from = dt.date.fromisoformat(args.date_from) if args.date_from else None
    date_to = dt.date.fromisoformat(args.date_to) if args.date_to else None
    flt = IngestFilter(
        category_contains=args.category,
        name_contains=args.name_contains,
        sample_size=args.sample_size,
        seed=args.seed,
        date_from=date_from,
        date_to=date_to,
    )
    result = ingest_reviews(args.reviews, args.businesses, flt, user_path=args.users)
    reviews_path = out_dir / "reviews.ndjson"
    stores_path = out_dir / "stores.ndjson"
    write_records(reviews_path, "review", (r.to_record() for r in result.reviews))
    write_records(
        stores_path, "store", (result.stores[k].to_record() for k in sorted(result.stores))
    )
    _manifest(
        out_dir,
        "ingest",
        {
            "filter": flt.to_record(),
            "n_reviews": len(result.reviews),
            "n_stores": len(result.stores),
            "skipped_malformed": result.skipped_malformed,
            "skipped_unjoinable": result.skipped_unjoinable,
            "hash_reviews": content_hash([r.to_record() for r in result.reviews]),
        },
    )
    print(
        f"ingested {len(result.reviews)} reviews across {len(result.stores)} stores "
        f"(malformed {result.skipped_malformed}, unjoinable {result.skipped_unjoinable})"
    )
    return 0


def cmd_discover(args) -> int:
    reviews = _load_reviews(args.reviews)
    client = _make_client(args, load_default_taxonomy() if args.backend == "procedural" else None)
    batches = sample_batches(reviews, args.batches, args.batch_size, args.seed)
    attributes: list[str] = []
    features: list[str] = []
    batch_errors = 0
    for i, batch in enumerate(batches):
        for kind, sink in (("attribute", attributes), ("feature", features)):
            try:
                sink.extend(discover_candidates(batch, kind, client))
            except Exception as exc:
                batch_errors += 1
                print(f"warning: batch {i} {kind} discovery failed: {exc}", file=sys.stderr)
    out = Path(args.out)
    write_document(
        out,
        "candidates",
        {"attributes": attributes, "features": features, "batch_errors": batch_errors},
    )
    _manifest(
        out.parent,
        "discover",
        {
            "seed": args.seed,
            "batches": args.batches,
            "batch_size": args.batch_size,
            "n_attribute_candidates": len(attributes),
            "n_feature_candidates": len(features),
            "batch_errors": batch_errors,
        },
    )
    print(f"discovered {len(attributes)} attribute and {len(features)} feature candidates")
    return 0


def cmd_consolidate(args) -> int:
    payload = read_document(args.candidates, "candidates")
    merge_map = None
    if args.merge_map:
        merge_map = MergeMap.from_payload(read_document(args.merge_map, "merge_map"))
    result = consolidate(payload["attributes"], payload["features"], merge_map)
    out = Path(args.out)
    if result.taxonomy is None:
        worksheet_path = out.with_name("merge_worksheet.json")
        write_document(worksheet_path, "merge_map", result.worksheet)
        print(f"no merge map given: worksheet written to {worksheet_path}")
        return 0
    write_document(out, "taxonomy", result.taxonomy.to_payload())
    _manifest(
        out.parent,
        "consolidate",
        {
            "n_attributes": len(result.taxonomy.attributes),
            "unmapped": result.unmapped,
            "hash_taxonomy": content_hash(result.taxonomy.to_payload()),
        },
    )
    if result.unmapped:
        print(f"warning: {len(result.unmapped)} candidates not covered by the merge map")
    print(f"taxonomy written with {len(result.taxonomy.attributes)} attributes")
    return 0


def cmd_extract(args) -> int:
    reviews = _load_reviews(args.reviews)
    taxonomy = _load_taxonomy(args.taxonomy)
    client = _make_client(args, taxonomy)
    run = extract_corpus(
        reviews, taxonomy, client, seed=args.seed, max_in_flight=args.max_in_flight
    )
    out = Path(args.out)
    write_records(out, "review_extraction", (ex.to_record() for ex in run.extractions))
    if run.failures:
        write_records(
            out.with_name(out.stem + ".failures.ndjson"),
            "extraction_failure",
            (f.to_record() for f in run.failures),
        )
    _manifest(
        out.parent,
        "extract",
        {
            "seed": args.seed,
            "n_reviews": len(reviews),
            "n_extracted": len(run.extractions),
            "n_failed": run.failure_count,
            "llm_usage": client.usage(),
            "hash_extractions": content_hash([ex.to_record() for ex in run.extractions]),
        },
    )
    print(f"extracted {len(run.extractions)} reviews ({run.failure_count} failures)")
    if run.failure_count and args.strict:
        raise PipelineFailure("extract", f"{run.failure_count} reviews failed extraction")
    return 0


def cmd_validate(args) -> int:
    gold = _load_extractions(args.gold)
    runs = {Path(p).stem: _load_extractions(p) for p in args.run}
    reports = agreement.compare_variants(
        runs,
        gold,
        level=args.level,
        sentiment_scale=args.scale,
        n_bootstrap=args.bootstrap,
        seed=args.seed,
    )
    out = Path(args.out)
    write_document(out, "agreement_report", {"reports": [r.to_record() for r in reports]})
    for r in reports:
        senti = f", sentiment raw={r.sentiment_raw.value:.3f}" if r.sentiment_raw else ""
        print(
            f"{r.variant}: mention raw={r.mention_raw.value:.3f} "
            f"alpha={r.mention_alpha.value:.3f}{senti} (units={r.n_units})"
        )
    _manifest(out.parent, "validate", {"level": args.level, "scale": args.scale, "seed": args.seed})
    return 0


def cmd_analyze(args) -> int:
    reviews = {r.review_id: r for r in _load_reviews(args.reviews)}
    stores = _load_stores(args.stores) if args.stores else {}
    if not stores:
        stores = {
            r.store_id: Store(store_id=r.store_id, state=r.state) for r in reviews.values()
        }
    extractions = _load_extractions(args.extractions)
    taxonomy = _load_taxonomy(args.taxonomy)
    snapshot = build_snapshot(
        taxonomy,
        extractions,
        reviews,
        stores,
        controls=args.controls,
        min_trend_support=args.min_trend_support,
    )
    out_dir = Path(args.out_dir)
    save_snapshot(snapshot, out_dir / "snapshot.json")
    for level in ("attribute", "feature"):
        raw = snapshot.payload["models"].get(level)
        if raw:
            write_document(out_dir / f"model_{level}.json", "fitted_model", raw)
        write_document(
            out_dir / f"stats_{level}.json", "mention_stats", snapshot.payload["stats"][level]
        )
    write_document(out_dir / "trends.json", "trend_series", snapshot.payload["trends"])
    with (out_dir / "trends.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["period", "attribute", "mention", "share_pos", "share_neg"])
        for p in snapshot.payload["trends"]["points"]:
            writer.writerow(
                [p["period"], p["item"], p["mention"], p["share_pos"], p["share_neg"]]
            )
    _manifest(
        out_dir,
        "analyze",
        {
            "controls": args.controls,
            "n_extractions": len(extractions),
            "snapshot_hash": snapshot.hash,
        },
    )
    print(f"snapshot {snapshot.hash[:12]} written to {out_dir / 'snapshot.json'}")
    for note in snapshot.payload["notes"]:
        print(f"note: {note}")
    return 0


def cmd_simulate(args) -> int:
    snapshot = load_snapshot(args.snapshot)
    raw = snapshot.payload["models"].get("feature")
    if raw is None:
        raise PipelineFailure("simulate", "snapshot has no fitted feature model")
    from ..analytics.regression import FittedModel

    model = FittedModel.from_payload(raw)
    report = simulate_uplift(
        snapshot.extractions,
        model,
        args.feature,
        snapshot.reviews,
        store_scope=set(args.stores) if args.stores else None,
    )
    out = Path(args.out)
    write_document(out, "impact_report", report.to_payload())
    _manifest(out.parent, "simulate", {"feature": args.feature, "mean_delta": report.mean})
    print(
        f"{args.feature}: mean store delta {report.mean:.3f} "
        f"(sd {report.sd:.3f}, range {report.min:.3f}..{report.max:.3f})"
    )
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    snapshot = load_snapshot(args.snapshot)
    app = create_app(snapshot, static_dir=args.static_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reviewlens", description="Review-mining pipeline and analytics service"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load, join, filter and sample the raw corpus")
    p.add_argument("--reviews", required=True, help="line-delimited review source file")
    p.add_argument("--businesses", required=True, help="line-delimited business source file")
    p.add_argument("--users", help="line-delimited user source file")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--category", help="business category substring filter")
    p.add_argument("--name-contains", help="business name substring filter")
    p.add_argument("--sample-size", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--date-from")
    p.add_argument("--date-to")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("discover", help="generate candidate attributes/features over batches")
    p.add_argument("--reviews", required=True)
    p.add_argument("--batches", type=int, default=20)
    p.add_argument("--batch-size", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    _add_backend_flags(p)
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("consolidate", help="apply a merge map (or emit the worksheet)")
    p.add_argument("--candidates", required=True)
    p.add_argument("--merge-map")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_consolidate)

    p = sub.add_parser("extract", help="run the per-review extraction pipeline")
    p.add_argument("--reviews", required=True)
    p.add_argument("--taxonomy", help="taxonomy artifact (defaults to the shipped catalog)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-in-flight", type=int, default=1)
    p.add_argument("--strict", action="store_true", help="fail the run on any review failure")
    p.add_argument("--out", required=True)
    _add_backend_flags(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("validate", help="compare extraction runs against gold annotations")
    p.add_argument("--gold", required=True)
    p.add_argument("--run", nargs="+", required=True)
    p.add_argument("--level", choices=("attribute", "feature"), default="attribute")
    p.add_argument("--scale", type=int, choices=(3, 5), default=3)
    p.add_argument("--bootstrap", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("analyze", help="build stats, models, trends, map, and the snapshot")
    p.add_argument("--reviews", required=True)
    p.add_argument("--stores")
    p.add_argument("--extractions", required=True)
    p.add_argument("--taxonomy")
    p.add_argument("--controls", action="store_true", help="add fixed-effect control blocks")
    p.add_argument("--min-trend-support", type=int, default=30)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="what-if feature uplift from a snapshot")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--feature", required=True)
    p.add_argument("--stores", nargs="*")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("serve", help="serve the read-only analytics API")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--static-dir", help="directory of built dashboard assets to serve at /")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PipelineFailure as exc:
        print(f"pipeline failed at step {exc.step}: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # surface the failing command as the step name
        print(f"pipeline failed at step {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
