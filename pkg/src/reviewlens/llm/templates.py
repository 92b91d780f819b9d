"""Prompt templates with named placeholders.

Template bodies live as data files and are treated as frozen text: rendering
substitutes ``{fill-...-here}`` tokens verbatim and performs no other
mutation, so a rendered prompt differs from its template only at the
placeholder sites. Literal braces (the JSON output skeletons inside the
prompts) pass through untouched.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

PLACEHOLDER_RE = re.compile(r"\{(fill-[a-z0-9]+(?:-[a-z0-9]+)*-here)\}")

TEMPLATE_NAMES = (
    "feature_discovery",
    "attribute_discovery",
    "review_sentiment",
    "sentence_attribute_assignment",
    "attribute_sentiment",
    "sentence_feature_assignment",
    "feature_sentiment",
)


class RenderError(Exception):
    pass


@dataclass(frozen=True)
class PromptTemplate:
    name: str
    body: str
    required_placeholders: frozenset[str] = field(default_factory=frozenset)

    @classmethod
    def from_body(cls, name: str, body: str) -> "PromptTemplate":
        found = frozenset(PLACEHOLDER_RE.findall(body))
        return cls(name=name, body=body, required_placeholders=found)

    def render(self, bindings: dict[str, str]) -> str:
        provided = set(bindings)
        missing = self.required_placeholders - provided
        if missing:
            raise RenderError(
                f"template {self.name!r}: missing placeholder(s) {sorted(missing)}"
            )
        unknown = provided - self.required_placeholders
        if unknown:
            raise RenderError(
                f"template {self.name!r}: unknown placeholder(s) {sorted(unknown)}"
            )

        def substitute(match: re.Match) -> str:
            return bindings[match.group(1)]

        return PLACEHOLDER_RE.sub(substitute, self.body)

    def literal_segments(self) -> list[str]:
        """Body split at placeholder sites; used by snapshot tests."""
        return PLACEHOLDER_RE.split(self.body)[::2]


@lru_cache(maxsize=None)
def load_template(name: str) -> PromptTemplate:
    if name not in TEMPLATE_NAMES:
        raise RenderError(f"unknown template {name!r}")
    body = resources.files("reviewlens.llm").joinpath(f"prompts/{name}.txt").read_text("utf-8")
    return PromptTemplate.from_body(name, body)


def render(name: str, **bindings: str) -> str:
    """Render a named template; binding keys use underscores for dashes."""
    normalized = {k.replace("_", "-"): v for k, v in bindings.items()}
    return load_template(name).render(normalized)
