"""Relative item importance from fitted dummy coefficients.

As in conjoint part-worth analysis, an item's importance is the range its
valence coefficients span (neutral and positive levels against the implicit
zero of the negative reference), normalized across items. Not-mentioned
coefficients are excluded: they encode selection into reviewing, not
valence.
"""

from __future__ import annotations

from .descriptives import AnalyticsError
from .regression import FittedModel


class UndefinedImportanceError(AnalyticsError):
    pass


def coefficient_range(model: FittedModel, item: str) -> float:
    values = [0.0]
    for level in ("neutral", "positive"):
        coef = model.item_coef(item, level)
        if coef is not None:
            values.append(coef)
    return max(values) - min(values)


def importance(model: FittedModel, items: list[str] | None = None) -> dict[str, float]:
    """Normalized non-negative weights over items; invariant to rescaling
    all coefficients by a positive constant."""
    items = list(items) if items is not None else list(model.items)
    if not items:
        raise UndefinedImportanceError("no items to weigh")
    for item in items:
        if not model.has_item(item):
            raise AnalyticsError(f"model has no coefficients for item {item!r}")
    ranges = {item: coefficient_range(model, item) for item in items}
    total = sum(ranges.values())
    if total == 0:
        raise UndefinedImportanceError("all coefficient ranges are zero")
    return {item: r / total for item, r in ranges.items()}
