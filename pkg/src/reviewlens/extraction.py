"""Per-review extraction pipeline (the confirmatory phase).

Each review runs through five strictly ordered steps: overall sentiment on
the full text, per-sentence attribute assignment (with surrounding
sentences as context), attribute sentiment over the assigned sub-review,
per-sentence feature assignment constrained to the attribute's feature
list, and feature sentiment. Catalog items are presented in a seeded random
permutation to avoid order bias, and sentences matching nothing fall into
the reserved sinks. A step that still fails after its single retry fails
the whole review: the run records an explicit failure instead of a partial
extraction.
"""

from __future__ import annotations

import hashlib
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

from .corpus.models import Review, Sentence
from .corpus.sentences import split_sentences
from .llm.client import LlmClient, LlmError
from .llm.parsing import ParseError, first_json_object, score_from_label
from .llm.templates import render
from .taxonomy import OTHER_ATTRIBUTES, OTHER_FEATURES, Taxonomy

SENTIMENT5_LABELS = {
    1: "Strongly Negative",
    2: "Negative",
    3: "Neutral",
    4: "Positive",
    5: "Strongly Positive",
}


class Sentiment3(str, Enum):
    NEGATIVE = "negative"
    NEUTRAL = "neutral"
    POSITIVE = "positive"


def to_3pt(score: int) -> Sentiment3:
    """Collapse the 5-point scale symmetrically: only the midpoint is neutral."""
    if score in (1, 2):
        return Sentiment3.NEGATIVE
    if score == 3:
        return Sentiment3.NEUTRAL
    if score in (4, 5):
        return Sentiment3.POSITIVE
    raise ValueError(f"sentiment score must be 1..5, got {score!r}")


class ExtractionError(Exception):
    pass


@dataclass(frozen=True)
class FeatureExtraction:
    name: str
    sentiment: int
    sentence_indices: tuple[int, ...]


@dataclass(frozen=True)
class AttributeExtraction:
    name: str
    sentiment: int
    sentence_indices: tuple[int, ...]
    features: tuple[FeatureExtraction, ...] = ()
    other_feature_sentences: tuple[int, ...] = ()


@dataclass(frozen=True)
class ReviewExtraction:
    review_id: str
    overall: int
    attributes: tuple[AttributeExtraction, ...]
    other_attribute_sentences: tuple[int, ...]
    n_sentences: int
    reasoning: dict = field(default_factory=dict, hash=False, compare=True)

    def attribute(self, name: str) -> AttributeExtraction | None:
        for a in self.attributes:
            if a.name == name:
                return a
        return None

    def mentions(self, name: str, level: str = "attribute") -> bool:
        if level == "attribute":
            return self.attribute(name) is not None
        return any(f.name == name for a in self.attributes for f in a.features)

    def feature_sentiment(self, name: str) -> int | None:
        for a in self.attributes:
            for f in a.features:
                if f.name == name:
                    return f.sentiment
        return None

    def to_record(self) -> dict:
        return {
            "review_id": self.review_id,
            "overall": self.overall,
            "attributes": [
                {
                    "name": a.name,
                    "sentiment": a.sentiment,
                    "sentence_indices": list(a.sentence_indices),
                    "features": [
                        {
                            "name": f.name,
                            "sentiment": f.sentiment,
                            "sentence_indices": list(f.sentence_indices),
                        }
                        for f in a.features
                    ],
                    "other_feature_sentences": list(a.other_feature_sentences),
                }
                for a in self.attributes
            ],
            "other_attribute_sentences": list(self.other_attribute_sentences),
            "n_sentences": self.n_sentences,
            "reasoning": self.reasoning,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "ReviewExtraction":
        return cls(
            review_id=rec["review_id"],
            overall=int(rec["overall"]),
            attributes=tuple(
                AttributeExtraction(
                    name=a["name"],
                    sentiment=int(a["sentiment"]),
                    sentence_indices=tuple(a["sentence_indices"]),
                    features=tuple(
                        FeatureExtraction(
                            name=f["name"],
                            sentiment=int(f["sentiment"]),
                            sentence_indices=tuple(f["sentence_indices"]),
                        )
                        for f in a["features"]
                    ),
                    other_feature_sentences=tuple(a.get("other_feature_sentences", ())),
                )
                for a in rec["attributes"]
            ),
            other_attribute_sentences=tuple(rec["other_attribute_sentences"]),
            n_sentences=int(rec["n_sentences"]),
            reasoning=rec.get("reasoning", {}),
        )


@dataclass(frozen=True)
class ExtractionFailure:
    review_id: str
    step: str
    error: str

    def to_record(self) -> dict:
        return {"review_id": self.review_id, "step": self.step, "error": self.error}


def validate_extraction(ex: ReviewExtraction, taxonomy: Taxonomy) -> None:
    """Enforce coverage, containment, and catalog-membership invariants."""
    covered = set(ex.other_attribute_sentences)
    for a in ex.attributes:
        if not taxonomy.has_attribute(a.name):
            raise ExtractionError(f"attribute {a.name!r} not in taxonomy")
        covered.update(a.sentence_indices)
        allowed = set(taxonomy.features_of(a.name))
        parent = set(a.sentence_indices)
        for f in a.features:
            if f.name not in allowed:
                raise ExtractionError(
                    f"feature {f.name!r} not under attribute {a.name!r}"
                )
            if not set(f.sentence_indices) <= parent:
                raise ExtractionError(
                    f"feature {f.name!r} cites sentences outside its attribute sub-review"
                )
        if not set(a.other_feature_sentences) <= parent:
            raise ExtractionError(
                f"attribute {a.name!r}: sink sentences outside sub-review"
            )
    if covered != set(range(ex.n_sentences)):
        raise ExtractionError(
            f"review {ex.review_id!r}: sentences {sorted(set(range(ex.n_sentences)) - covered)} unassigned"
        )


# ---------------------------------------------------------------------------
# pipeline


def _stable_rng(seed: int, *parts) -> random.Random:
    digest = hashlib.sha256(
        ":".join([str(seed), *map(str, parts)]).encode("utf-8")
    ).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _roster_block(items: list[str], sink: str, rng: random.Random) -> str:
    shuffled = list(items)
    rng.shuffle(shuffled)
    lines = "\n".join(f"* {item}" for item in [*shuffled, sink])
    return f"Choose from:\n{lines}"


def _sentence_context_block(sentences: list[Sentence], index: int, roster: str) -> str:
    target = next(s for s in sentences if s.index == index)
    parts = [f"Sentence {target.index}: {target.text}"]
    neighbors = [
        f"Sentence {s.index}: {s.text}"
        for s in sentences
        if abs(s.index - target.index) == 1
    ]
    if neighbors:
        parts.append("\nSurrounding sentences (context only):")
        parts.extend(neighbors)
    parts.append("\nPre-defined options:")
    parts.append(roster)
    return "\n".join(parts)


def _numbered(sentences: list[Sentence]) -> str:
    return "\n".join(f"Sentence {s.index}: {s.text}" for s in sentences)


class ExtractionPipeline:
    """Runs the extraction steps for one review at a time."""

    def __init__(self, client: LlmClient, taxonomy: Taxonomy, seed: int = 0):
        self.client = client
        self.taxonomy = taxonomy
        self.seed = seed

    # -- step helpers ------------------------------------------------------

    def _complete_with_retry(self, prompt: str, parse):
        """One parse retry with the 'Return only the JSON.' reminder."""
        try:
            return parse(self.client.complete(prompt).text)
        except ParseError:
            retry = self.client.complete(prompt + "\n\nReturn only the JSON.")
            return parse(retry.text)

    def score_overall(self, review: Review) -> tuple[int, str]:
        if not review.text.strip():
            raise ExtractionError("review text is empty")
        prompt = render("review_sentiment", fill_review_here=review.text)

        def parse(text: str):
            obj = first_json_object(text)
            if "sentiment" not in obj:
                raise ParseError("response lacks a 'sentiment' field")
            return score_from_label(obj["sentiment"]), str(obj.get("reasoning", ""))

        return self._complete_with_retry(prompt, parse)

    def _parse_assignment(self, text: str, index: int, key: str, allowed: set[str]) -> tuple[list[str], str]:
        obj = first_json_object(text)
        entry = obj.get(f"Sentence {index}")
        if entry is None and len(obj) == 1:
            entry = next(iter(obj.values()))
        if not isinstance(entry, dict) or key not in entry:
            raise ParseError(f"response lacks a 'Sentence {index}' object with {key!r}")
        labels = entry[key]
        if not isinstance(labels, list) or not labels:
            raise ParseError(f"{key} must be a non-empty list")
        cleaned = []
        for label in labels:
            if not isinstance(label, str) or label not in allowed:
                raise ParseError(f"label {label!r} outside the allowed list")
            if label not in cleaned:
                cleaned.append(label)
        return cleaned, str(entry.get("reasoning", ""))

    def assign_attributes(
        self, review: Review, sentences: list[Sentence]
    ) -> tuple[dict[int, list[str]], dict[int, str]]:
        """Per-sentence attribute sets; every sentence gets at least one label."""
        allowed = set(self.taxonomy.attribute_names()) | {OTHER_ATTRIBUTES}
        assignments: dict[int, list[str]] = {}
        reasons: dict[int, str] = {}
        for sentence in sentences:
            rng = _stable_rng(self.seed, review.review_id, "attr-assign", sentence.index)
            roster = _roster_block(self.taxonomy.attribute_names(), OTHER_ATTRIBUTES, rng)
            prompt = render(
                "sentence_attribute_assignment",
                fill_sentence_block_here=_sentence_context_block(sentences, sentence.index, roster),
                fill_sentence_index_here=str(sentence.index),
                fill_review_sentence_here=sentence.text,
            )
            labels, why = self._complete_with_retry(
                prompt,
                lambda text: self._parse_assignment(text, sentence.index, "attributes", allowed),
            )
            assignments[sentence.index] = labels
            reasons[sentence.index] = why
        return assignments, reasons

    def score_attribute(self, attribute: str, sub_review: list[Sentence]) -> tuple[int, str]:
        if not sub_review:
            raise ExtractionError(f"attribute {attribute!r} has no assigned sentences")
        prompt = render(
            "attribute_sentiment",
            fill_attribute_here=attribute,
            fill_sentences_here=_numbered(sub_review),
        )
        return self._complete_with_retry(prompt, lambda t: self._parse_item_sentiment(t, attribute))

    @staticmethod
    def _parse_item_sentiment(text: str, item: str) -> tuple[int, str]:
        obj = first_json_object(text)
        entry = obj.get(item, obj)
        if not isinstance(entry, dict) or "sentiment" not in entry:
            raise ParseError("response lacks a 'sentiment' field")
        reasoning = entry.get("reasoning_sentiment", entry.get("reasoning", ""))
        return score_from_label(entry["sentiment"]), str(reasoning)

    def assign_features(
        self, review: Review, attribute: str, sub_review: list[Sentence]
    ) -> tuple[dict[int, list[str]], dict[int, str]]:
        features = self.taxonomy.features_of(attribute)
        allowed = set(features) | {OTHER_FEATURES}
        assignments: dict[int, list[str]] = {}
        reasons: dict[int, str] = {}
        for sentence in sub_review:
            rng = _stable_rng(self.seed, review.review_id, "feat-assign", attribute, sentence.index)
            roster = _roster_block(features, OTHER_FEATURES, rng)
            prompt = render(
                "sentence_feature_assignment",
                fill_review_here=review.text,
                fill_sentence_block_here=_sentence_context_block(sub_review, sentence.index, roster),
                fill_attribute_here=attribute,
                fill_all_attribute_features_here="\n" + roster,
                fill_sentence_index_here=str(sentence.index),
                fill_review_sentence_here=sentence.text,
            )
            labels, why = self._complete_with_retry(
                prompt,
                lambda text: self._parse_assignment(text, sentence.index, "features", allowed),
            )
            assignments[sentence.index] = labels
            reasons[sentence.index] = why
        return assignments, reasons

    def score_feature(self, feature: str, sentences: list[Sentence]) -> tuple[int, str]:
        if not sentences:
            raise ExtractionError(f"feature {feature!r} has no assigned sentences")
        prompt = render(
            "feature_sentiment",
            fill_feature_here=feature,
            fill_sentences_here=_numbered(sentences),
        )
        return self._complete_with_retry(prompt, lambda t: self._parse_item_sentiment(t, feature))

    # -- orchestration -----------------------------------------------------

    def extract_review(self, review: Review) -> ReviewExtraction:
        by_index: dict[int, Sentence] = {}
        step = "split"
        try:
            sentences = split_sentences(review.text)
            by_index = {s.index: s for s in sentences}

            step = "overall_sentiment"
            overall, overall_why = self.score_overall(review)
            reasoning: dict = {"overall": overall_why}

            step = "attribute_assignment"
            assignments, assign_why = self.assign_attributes(review, sentences)
            reasoning["attribute_assignment"] = {str(i): assign_why[i] for i in sorted(assign_why)}

            sub_reviews: dict[str, list[int]] = {}
            other_sentences: list[int] = []
            for index in sorted(assignments):
                for label in assignments[index]:
                    if label == OTHER_ATTRIBUTES:
                        if index not in other_sentences:
                            other_sentences.append(index)
                    else:
                        sub_reviews.setdefault(label, [])
                        if index not in sub_reviews[label]:
                            sub_reviews[label].append(index)

            ordered_attrs = [n for n in self.taxonomy.attribute_names() if n in sub_reviews]
            extracted_attrs: list[AttributeExtraction] = []
            for name in ordered_attrs:
                indices = sorted(sub_reviews[name])
                sub_sentences = [by_index[i] for i in indices]

                step = f"attribute_sentiment:{name}"
                a_score, a_why = self.score_attribute(name, sub_sentences)
                reasoning[f"attribute:{name}"] = a_why

                step = f"feature_assignment:{name}"
                feat_assign, feat_why = self.assign_features(review, name, sub_sentences)
                reasoning[f"feature_assignment:{name}"] = {
                    str(i): feat_why[i] for i in sorted(feat_why)
                }

                feature_indices: dict[str, list[int]] = {}
                other_feature: list[int] = []
                for index in sorted(feat_assign):
                    for label in feat_assign[index]:
                        if label == OTHER_FEATURES:
                            if index not in other_feature:
                                other_feature.append(index)
                        else:
                            feature_indices.setdefault(label, [])
                            if index not in feature_indices[label]:
                                feature_indices[label].append(index)

                features: list[FeatureExtraction] = []
                for feat in self.taxonomy.features_of(name):
                    if feat not in feature_indices:
                        continue
                    f_indices = sorted(feature_indices[feat])
                    step = f"feature_sentiment:{feat}"
                    f_score, f_why = self.score_feature(feat, [by_index[i] for i in f_indices])
                    reasoning[f"feature:{name}:{feat}"] = f_why
                    features.append(
                        FeatureExtraction(
                            name=feat, sentiment=f_score, sentence_indices=tuple(f_indices)
                        )
                    )

                extracted_attrs.append(
                    AttributeExtraction(
                        name=name,
                        sentiment=a_score,
                        sentence_indices=tuple(indices),
                        features=tuple(features),
                        other_feature_sentences=tuple(sorted(other_feature)),
                    )
                )

            extraction = ReviewExtraction(
                review_id=review.review_id,
                overall=overall,
                attributes=tuple(extracted_attrs),
                other_attribute_sentences=tuple(sorted(other_sentences)),
                n_sentences=len(sentences),
                reasoning=reasoning,
            )
            validate_extraction(extraction, self.taxonomy)
            return extraction
        except (ParseError, LlmError, ExtractionError) as exc:
            raise StepFailure(review.review_id, step, str(exc)) from exc


class StepFailure(ExtractionError):
    def __init__(self, review_id: str, step: str, message: str):
        self.review_id = review_id
        self.step = step
        super().__init__(f"review {review_id!r} failed at {step}: {message}")

    def record(self) -> ExtractionFailure:
        return ExtractionFailure(self.review_id, self.step, str(self))


@dataclass
class ExtractionRun:
    extractions: list[ReviewExtraction]
    failures: list[ExtractionFailure]

    @property
    def failure_count(self) -> int:
        return len(self.failures)


def extract_corpus(
    reviews: list[Review],
    taxonomy: Taxonomy,
    client: LlmClient,
    seed: int = 0,
    max_in_flight: int = 1,
) -> ExtractionRun:
    """Extract every review; reviews are independent so they may run
    concurrently, but outputs always come back in input order."""
    pipeline = ExtractionPipeline(client, taxonomy, seed=seed)

    def one(review: Review):
        try:
            return pipeline.extract_review(review)
        except StepFailure as failure:
            return failure.record()

    if max_in_flight > 1:
        with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
            results = list(pool.map(one, reviews))
    else:
        results = [one(r) for r in reviews]

    run = ExtractionRun(extractions=[], failures=[])
    for item in results:
        if isinstance(item, ExtractionFailure):
            run.failures.append(item)
        else:
            run.extractions.append(item)
    return run
