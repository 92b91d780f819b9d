"""Structured-output parsing for model responses.

Responses are expected to contain a JSON object; models wrap it in prose or
code fences often enough that we extract the first balanced object instead
of json.loads-ing the whole text. Sentiment labels are validated against
the closed five-label scale and mapped to ordinal scores 1..5.
"""

from __future__ import annotations

import json
from typing import Any

SENTIMENT_LABELS = (
    "Strongly Negative",
    "Negative",
    "Neutral",
    "Positive",
    "Strongly Positive",
)
LABEL_TO_SCORE = {label.lower(): i + 1 for i, label in enumerate(SENTIMENT_LABELS)}
SCORE_TO_LABEL = {i + 1: label for i, label in enumerate(SENTIMENT_LABELS)}


class ParseError(Exception):
    """No parseable JSON object in the response text."""


class SchemaFieldError(ParseError):
    """Parsed object is missing an expected field."""

    def __init__(self, field: str):
        self.field = field
        super().__init__(f"missing expected field {field!r}")


class LabelError(ParseError):
    """Sentiment label outside the closed five-point scale."""

    def __init__(self, label: Any):
        self.label = label
        super().__init__(
            f"sentiment label {label!r} not in {list(SENTIMENT_LABELS)}"
        )


def first_json_object(text: str) -> dict:
    """Extract the first balanced top-level JSON object from text.

    Tolerates code fences and leading/trailing prose. Raises ParseError when
    no well-formed object exists.
    """
    depth = 0
    start = None
    in_string = False
    escaped = False
    for i, ch in enumerate(text):
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"' and depth > 0:
            in_string = True
        elif ch == "{":
            if depth == 0:
                start = i
            depth += 1
        elif ch == "}" and depth > 0:
            depth -= 1
            if depth == 0:
                candidate = text[start : i + 1]
                try:
                    obj = json.loads(candidate)
                except json.JSONDecodeError:
                    # keep scanning: maybe a later object is well-formed
                    start = None
                    continue
                if isinstance(obj, dict):
                    return obj
                start = None
    raise ParseError("no well-formed JSON object found in response")


def score_from_label(label: Any) -> int:
    if not isinstance(label, str) or label.strip().lower() not in LABEL_TO_SCORE:
        raise LabelError(label)
    return LABEL_TO_SCORE[label.strip().lower()]


def parse_structured(text: str, expected_fields: dict[str, str]) -> dict:
    """Parse and validate a structured response.

    ``expected_fields`` maps field name -> kind, where kind is one of
    "text", "list", or "sentiment". Sentiment fields are converted to their
    1..5 score; other fields are passed through after a type check.
    """
    obj = first_json_object(text)
    out: dict[str, Any] = {}
    for name, kind in expected_fields.items():
        if name not in obj:
            raise SchemaFieldError(name)
        value = obj[name]
        if kind == "sentiment":
            out[name] = score_from_label(value)
        elif kind == "list":
            if not isinstance(value, list):
                raise ParseError(f"field {name!r}: expected a list, got {type(value).__name__}")
            out[name] = value
        else:
            out[name] = value
    return out
