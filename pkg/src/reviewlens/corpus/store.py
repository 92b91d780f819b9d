"""Versioned persistence for pipeline artifacts.

Record streams are line-delimited JSON with a header line naming the record
kind and schema version; single artifacts (taxonomy, fitted models,
snapshots) are one JSON document with embedded kind/version. Serialization
is canonical (sorted keys, fixed separators) so identical inputs always
produce identical bytes, and loading is the exact inverse of persisting.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
from pathlib import Path
from typing import Iterable, Iterator

from .models import CorpusError

SCHEMA_VERSION = 1


class SchemaVersionError(CorpusError):
    """Artifact kind/version on disk does not match what the reader expects."""


def canonical_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def content_hash(payload) -> str:
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()


def _check_header(header: dict, kind: str, path: Path) -> None:
    if header.get("kind") != kind or header.get("version") != SCHEMA_VERSION:
        raise SchemaVersionError(
            f"{path}: expected kind={kind!r} version={SCHEMA_VERSION}, "
            f"found kind={header.get('kind')!r} version={header.get('version')!r}"
        )


def write_records(path: str | Path, kind: str, records: Iterable[dict]) -> int:
    """Write a record stream; returns the number of records written."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", encoding="utf-8") as fh:
        fh.write(canonical_json({"kind": kind, "version": SCHEMA_VERSION}) + "\n")
        for rec in records:
            fh.write(canonical_json(rec) + "\n")
            count += 1
    return count


def read_records(path: str | Path, kind: str) -> Iterator[dict]:
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        try:
            header = json.loads(fh.readline())
        except json.JSONDecodeError as exc:
            raise SchemaVersionError(f"{path}: missing artifact header") from exc
        _check_header(header, kind, path)
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)


def write_document(path: str | Path, kind: str, payload: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {"kind": kind, "version": SCHEMA_VERSION, "payload": payload}
    path.write_text(canonical_json(doc) + "\n", encoding="utf-8")


def read_document(path: str | Path, kind: str) -> dict:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaVersionError(f"{path}: not a JSON artifact") from exc
    _check_header(doc, kind, path)
    return doc["payload"]


def append_manifest(path: str | Path, entry: dict) -> None:
    """Append one run entry (command, seed, counts, hashes) to the manifest."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    stamped = dict(entry)
    stamped.setdefault("at", dt.datetime.now(dt.timezone.utc).isoformat())
    with path.open("a", encoding="utf-8") as fh:
        fh.write(canonical_json(stamped) + "\n")
