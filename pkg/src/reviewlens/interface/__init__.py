"""CLI driver and read-only HTTP analytics service."""

from .snapshot import (
    Snapshot,
    SnapshotIntegrityError,
    build_snapshot,
    load_snapshot,
    save_snapshot,
)

__all__ = [
    "Snapshot",
    "SnapshotIntegrityError",
    "build_snapshot",
    "load_snapshot",
    "save_snapshot",
]
