"""Catalog discovery and consolidation (the exploratory phase).

Candidate attribute and feature names are generated per review batch by the
model, then consolidated under a human-authored merge map into the final
catalog. Consolidation is deliberately human-in-the-loop: without a merge
map the operation emits a similarity-grouped worksheet and stops, so the
manual merge step is auditable and replayable. A prevalence filter drops
attributes mentioned in less than a configurable fraction of a probe
extraction sample (default 1%, strictly below).
"""

from __future__ import annotations

import difflib
import json
import random
import re
from dataclasses import dataclass, field
from importlib import resources

from .corpus.models import Review
from .llm.client import LlmClient
from .llm.parsing import ParseError, parse_structured
from .llm.templates import render

OTHER_ATTRIBUTES = "Other Attributes"
OTHER_FEATURES = "Other Features"
RESERVED_SINKS = (OTHER_ATTRIBUTES, OTHER_FEATURES)


class TaxonomyError(Exception):
    pass


class BatchSizingError(TaxonomyError):
    pass


class PartitionError(TaxonomyError):
    pass


class InsufficientEvidenceError(TaxonomyError):
    pass


@dataclass(frozen=True)
class Attribute:
    name: str
    features: tuple[str, ...]


@dataclass(frozen=True)
class Taxonomy:
    """Ordered attribute -> features catalog, sinks excluded by construction."""

    attributes: tuple[Attribute, ...]

    def __post_init__(self) -> None:
        seen = set()
        for attr in self.attributes:
            low = attr.name.lower()
            if low in seen:
                raise TaxonomyError(f"duplicate attribute name {attr.name!r}")
            seen.add(low)
            if attr.name in RESERVED_SINKS:
                raise TaxonomyError(f"reserved sink {attr.name!r} used as attribute")
            if not attr.features:
                raise TaxonomyError(f"attribute {attr.name!r} has no features")
            feats = set()
            for feat in attr.features:
                if feat in RESERVED_SINKS:
                    raise TaxonomyError(f"reserved sink {feat!r} used as feature")
                if feat.lower() in feats:
                    raise TaxonomyError(
                        f"duplicate feature {feat!r} under {attr.name!r}"
                    )
                feats.add(feat.lower())

    def attribute_names(self) -> list[str]:
        return [a.name for a in self.attributes]

    def features_of(self, attribute: str) -> list[str]:
        for a in self.attributes:
            if a.name == attribute:
                return list(a.features)
        raise TaxonomyError(f"attribute {attribute!r} not in taxonomy")

    def has_attribute(self, name: str) -> bool:
        return any(a.name == name for a in self.attributes)

    def to_payload(self) -> dict:
        return {
            "attributes": [
                {"name": a.name, "features": list(a.features)} for a in self.attributes
            ]
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "Taxonomy":
        return cls(
            attributes=tuple(
                Attribute(name=a["name"], features=tuple(a["features"]))
                for a in payload["attributes"]
            )
        )


def load_default_taxonomy() -> Taxonomy:
    """The consolidated coffee-shop catalog shipped with the package."""
    doc = json.loads(
        resources.files("reviewlens.data").joinpath("coffee_shop_taxonomy.json").read_text("utf-8")
    )
    return Taxonomy.from_payload(doc["payload"])


# ---------------------------------------------------------------------------
# batch sampling and candidate discovery


def sample_batches(
    reviews: list[Review], n_batches: int, batch_size: int, seed: int
) -> list[list[Review]]:
    """Disjoint seeded batches for discovery runs."""
    needed = n_batches * batch_size
    if needed > len(reviews):
        raise BatchSizingError(
            f"{n_batches} batches x {batch_size} = {needed} exceeds corpus size {len(reviews)}"
        )
    rng = random.Random(seed)
    order = list(range(len(reviews)))
    rng.shuffle(order)
    return [
        [reviews[i] for i in order[b * batch_size : (b + 1) * batch_size]]
        for b in range(n_batches)
    ]


def _dedupe_case_insensitive(names: list[str]) -> list[str]:
    seen = set()
    out = []
    for name in names:
        if not isinstance(name, str):
            continue
        cleaned = name.strip()
        if not cleaned or cleaned.lower() in seen:
            continue
        seen.add(cleaned.lower())
        out.append(cleaned)
    return out


def discover_candidates(batch: list[Review], kind: str, client: LlmClient) -> list[str]:
    """One discovery call over a batch; returns sorted candidate names.

    ``kind`` selects the feature- or attribute-discovery template; the two
    runs are independent calls so neither biases the other.
    """
    if not batch:
        raise TaxonomyError("discovery batch is empty")
    if kind not in ("attribute", "feature"):
        raise TaxonomyError(f"kind must be 'attribute' or 'feature', got {kind!r}")
    reviews_text = "\n\n".join(
        f"Review {i + 1}: {r.text}" for i, r in enumerate(batch)
    )
    template = "attribute_discovery" if kind == "attribute" else "feature_discovery"
    list_field = "attributes" if kind == "attribute" else "features"
    prompt = render(template, fill_reviews_here=reviews_text)
    response = client.complete(prompt)
    try:
        parsed = parse_structured(response.text, {list_field: "list"})
    except ParseError:
        retry = client.complete(prompt + "\n\nReturn only the JSON.")
        parsed = parse_structured(retry.text, {list_field: "list"})
    return sorted(_dedupe_case_insensitive(parsed[list_field]), key=str.lower)


# ---------------------------------------------------------------------------
# consolidation


@dataclass(frozen=True)
class MergeGroup:
    """One consolidation decision: raw strings -> canonical name (or discard)."""

    raw: tuple[str, ...]
    canonical: str | None  # None means discarded
    kind: str = "feature"  # "attribute" | "feature"
    attach_to: str | None = None  # attribute a feature group belongs to
    note: str = ""

    @property
    def discarded(self) -> bool:
        return self.canonical is None


@dataclass(frozen=True)
class MergeMap:
    groups: tuple[MergeGroup, ...]

    def __post_init__(self) -> None:
        owner: dict[str, str] = {}
        collisions = []
        for g in self.groups:
            label = g.canonical or "<discarded>"
            for raw in g.raw:
                key = raw.strip().lower()
                if key in owner and owner[key] != label:
                    collisions.append(f"{raw!r} -> {owner[key]!r} and {label!r}")
                owner[key] = label
        if collisions:
            raise PartitionError("merge map is not a partition: " + "; ".join(collisions))

    def to_payload(self) -> dict:
        return {
            "groups": [
                {
                    "raw": list(g.raw),
                    "canonical": g.canonical,
                    "kind": g.kind,
                    "attach_to": g.attach_to,
                    "note": g.note,
                }
                for g in self.groups
            ]
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "MergeMap":
        return cls(
            groups=tuple(
                MergeGroup(
                    raw=tuple(g["raw"]),
                    canonical=g.get("canonical"),
                    kind=g.get("kind", "feature"),
                    attach_to=g.get("attach_to"),
                    note=g.get("note", ""),
                )
                for g in payload["groups"]
            )
        )


@dataclass
class ConsolidationResult:
    taxonomy: Taxonomy | None
    worksheet: dict | None
    trace: dict[str, str] = field(default_factory=dict)  # raw -> canonical/<discarded>
    unmapped: list[str] = field(default_factory=list)


_NORM_RE = re.compile(r"[^a-z0-9]+")


def _normalize(name: str) -> str:
    return _NORM_RE.sub(" ", name.lower()).strip()


def _similarity_groups(names: list[str], threshold: float = 0.82) -> list[list[str]]:
    """Greedy grouping by normalized-string similarity for the worksheet."""
    groups: list[list[str]] = []
    for name in sorted(names, key=str.lower):
        norm = _normalize(name)
        for group in groups:
            ref = _normalize(group[0])
            if norm == ref or difflib.SequenceMatcher(None, norm, ref).ratio() >= threshold:
                group.append(name)
                break
        else:
            groups.append([name])
    return groups


def _dedupe_exact(names: list[str]) -> list[str]:
    # keep case variants: the human merge pass should see them grouped
    seen = set()
    out = []
    for name in names:
        if isinstance(name, str) and name.strip() and name not in seen:
            seen.add(name)
            out.append(name.strip())
    return out


def make_worksheet(attribute_candidates: list[str], feature_candidates: list[str]) -> dict:
    """Candidate worksheet for the manual merge pass."""
    return {
        "instructions": (
            "Fill 'canonical' for each group (or leave null to discard); "
            "for feature groups set 'attach_to' to the owning attribute."
        ),
        "groups": [
            {"raw": group, "canonical": None, "kind": "attribute", "attach_to": None, "note": ""}
            for group in _similarity_groups(_dedupe_exact(attribute_candidates))
        ]
        + [
            {"raw": group, "canonical": None, "kind": "feature", "attach_to": None, "note": ""}
            for group in _similarity_groups(_dedupe_exact(feature_candidates))
        ],
    }


def consolidate(
    attribute_candidates: list[str],
    feature_candidates: list[str],
    merge_map: MergeMap | None = None,
) -> ConsolidationResult:
    """Apply the merge map; emit the worksheet instead when it is absent.

    Every raw candidate is traceable to a canonical name or an explicit
    discard; candidates the map does not cover are reported, never silently
    dropped. Canonical names are implicit members of their own group, which
    makes consolidation idempotent.
    """
    if merge_map is None or not merge_map.groups:
        return ConsolidationResult(
            taxonomy=None,
            worksheet=make_worksheet(attribute_candidates, feature_candidates),
        )

    lookup: dict[str, MergeGroup] = {}
    for g in merge_map.groups:
        for raw in g.raw:
            lookup[raw.strip().lower()] = g
        if g.canonical is not None:
            lookup.setdefault(g.canonical.strip().lower(), g)

    trace: dict[str, str] = {}
    unmapped: list[str] = []
    for raw in _dedupe_case_insensitive(list(attribute_candidates) + list(feature_candidates)):
        group = lookup.get(raw.strip().lower())
        if group is None:
            unmapped.append(raw)
        else:
            trace[raw] = group.canonical if group.canonical else "<discarded>"

    attr_order = [g.canonical for g in merge_map.groups if g.kind == "attribute" and g.canonical]
    features_by_attr: dict[str, list[str]] = {name: [] for name in attr_order}
    for g in merge_map.groups:
        if g.kind == "feature" and g.canonical:
            if g.attach_to not in features_by_attr:
                raise PartitionError(
                    f"feature group {g.canonical!r} attaches to unknown attribute {g.attach_to!r}"
                )
            if g.canonical not in features_by_attr[g.attach_to]:
                features_by_attr[g.attach_to].append(g.canonical)

    taxonomy = Taxonomy(
        attributes=tuple(
            Attribute(name=name, features=tuple(features_by_attr[name]))
            for name in attr_order
        )
    )
    return ConsolidationResult(taxonomy=taxonomy, worksheet=None, trace=trace, unmapped=unmapped)


# ---------------------------------------------------------------------------
# prevalence filter


def prevalence_filter(taxonomy: Taxonomy, extractions, threshold: float = 0.01):
    """Drop attributes mentioned in strictly less than ``threshold`` of reviews.

    ``extractions`` is a probe sample of ReviewExtraction records produced
    against ``taxonomy``. Returns (filtered taxonomy, removal report).
    """
    extractions = list(extractions)
    if not extractions:
        raise InsufficientEvidenceError("prevalence filter needs a non-empty probe sample")
    total = len(extractions)
    counts = {a.name: 0 for a in taxonomy.attributes}
    for ex in extractions:
        for mention in ex.attributes:
            if mention.name in counts:
                counts[mention.name] += 1
    removed = {
        name: counts[name] / total
        for name in counts
        if counts[name] / total < threshold
    }
    kept = tuple(a for a in taxonomy.attributes if a.name not in removed)
    return Taxonomy(attributes=kept), removed
