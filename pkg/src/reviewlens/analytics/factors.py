"""Two-factor perceptual map of store-level attribute sentiment.

Factors are extracted from the correlation matrix of per-store mean
sentiment columns (principal-component extraction: eigendecomposition with
unit diagonal), keeping the two largest components. Store scores use the
regression method, and each store lands in a quadrant class from the signs
of its two scores.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .descriptives import AnalyticsError


class DegenerateFactorsError(AnalyticsError):
    pass


QUADRANT_CLASSES = ("green", "red", "yellow", "blue")


@dataclass
class PerceptualMap:
    attributes: list[str]
    loadings: np.ndarray  # len(attributes) x 2
    variance_shares: tuple[float, float]
    store_ids: list[str]
    scores: np.ndarray  # len(store_ids) x 2
    quadrants: list[str]
    dropped_columns: list[str] = field(default_factory=list)

    def to_payload(self) -> dict:
        return {
            "attributes": self.attributes,
            "loadings": self.loadings.tolist(),
            "variance_shares": list(self.variance_shares),
            "store_ids": self.store_ids,
            "scores": self.scores.tolist(),
            "quadrants": self.quadrants,
            "dropped_columns": self.dropped_columns,
        }


def _quadrant(f1: float, f2: float, threshold: float) -> str:
    if f1 >= threshold and f2 >= threshold:
        return "green"
    if f1 < threshold and f2 < threshold:
        return "red"
    if f1 >= threshold:
        return "yellow"
    return "blue"


def perceptual_map(
    matrix: np.ndarray,
    store_ids: list[str],
    attribute_names: list[str],
    quadrant_threshold: float = 0.0,
) -> PerceptualMap:
    """Build the map from a stores x attributes mean-sentiment matrix.

    Constant columns are dropped with a note; fewer than two positive
    eigenvalues is a degeneracy error. Sign convention: the
    largest-magnitude loading of each factor is positive.
    """
    data = np.asarray(matrix, dtype=float)
    if data.ndim != 2:
        raise AnalyticsError("expected a 2-d stores x attributes matrix")
    n_stores, n_attrs = data.shape
    if n_stores < 3 or n_attrs < 3:
        raise AnalyticsError("need at least 3 stores and 3 attributes")
    if len(store_ids) != n_stores or len(attribute_names) != n_attrs:
        raise AnalyticsError("store/attribute labels do not match the matrix shape")

    stds = data.std(axis=0, ddof=1)
    keep = stds > 0
    dropped = [name for name, k in zip(attribute_names, keep) if not k]
    data = data[:, keep]
    names = [name for name, k in zip(attribute_names, keep) if k]
    if data.shape[1] < 2:
        raise DegenerateFactorsError("fewer than 2 attributes with variance")

    z = (data - data.mean(axis=0)) / data.std(axis=0, ddof=1)
    corr = (z.T @ z) / (n_stores - 1)
    eigvals, eigvecs = np.linalg.eigh(corr)
    order = np.argsort(eigvals)[::-1]
    eigvals, eigvecs = eigvals[order], eigvecs[:, order]
    if np.sum(eigvals > 1e-12) < 2:
        raise DegenerateFactorsError("fewer than 2 positive eigenvalues")

    loadings = eigvecs[:, :2] * np.sqrt(eigvals[:2])
    for j in range(2):
        anchor = int(np.argmax(np.abs(loadings[:, j])))
        if loadings[anchor, j] < 0:
            loadings[:, j] = -loadings[:, j]

    shares = (float(eigvals[0] / len(names)), float(eigvals[1] / len(names)))
    # regression-method scores; pinv handles exactly collinear columns
    scores = z @ (np.linalg.pinv(corr) @ loadings)
    quadrants = [_quadrant(s[0], s[1], quadrant_threshold) for s in scores]

    return PerceptualMap(
        attributes=names,
        loadings=loadings,
        variance_shares=shares,
        store_ids=list(store_ids),
        scores=scores,
        quadrants=quadrants,
        dropped_columns=dropped,
    )


def store_attribute_means(extractions, reviews, attribute_names) -> tuple[np.ndarray, list[str], list[str]]:
    """Per-store mean attribute sentiment, for feeding the map.

    Stores with no mention of an attribute get that attribute's grand mean
    (neutral imputation keeps the correlation structure usable); attributes
    never mentioned anywhere are excluded.
    """
    by_store: dict[str, list] = {}
    for ex in extractions:
        review = reviews.get(ex.review_id)
        if review is None:
            raise AnalyticsError(f"extraction {ex.review_id!r} has no matching review")
        by_store.setdefault(review.store_id, []).append(ex)

    store_ids = sorted(by_store)
    columns: list[str] = []
    data: list[list[float]] = []
    for name in attribute_names:
        cells: list[float | None] = []
        for sid in store_ids:
            scores = [
                a.sentiment
                for ex in by_store[sid]
                for a in ex.attributes
                if a.name == name
            ]
            cells.append(sum(scores) / len(scores) if scores else None)
        observed = [c for c in cells if c is not None]
        if not observed:
            continue
        grand = sum(observed) / len(observed)
        data.append([grand if c is None else c for c in cells])
        columns.append(name)
    if not columns:
        raise AnalyticsError("no attribute has any mention")
    return np.asarray(data, dtype=float).T, store_ids, columns
