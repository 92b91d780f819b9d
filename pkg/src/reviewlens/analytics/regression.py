"""Dummy-coded rating regressions with cluster-robust standard errors.

Each catalog item enters through three indicators (neutral, positive,
not-mentioned) with negative sentiment as the reference level, so a
coefficient reads as the rating lift relative to a negative mention.
Optional control blocks add store, review-year, and reviewer-join-year
fixed effects (first level dropped per block) plus the reviewer's
elite-year count. Standard errors can be clustered one-way on stores via
the sandwich estimator with the G/(G-1) * (n-1)/(n-k) small-sample
correction, which reduces exactly to HC1 when every cluster is a
singleton.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..corpus.models import Review
from ..extraction import ReviewExtraction, Sentiment3, to_3pt
from .descriptives import AnalyticsError, mention_stats

LEVELS = ("neutral", "positive", "not_mentioned")

DEFAULT_ATTRIBUTE_FLOOR = 0.01
DEFAULT_FEATURE_FLOOR = 0.03


class RankDeficiencyError(AnalyticsError):
    def __init__(self, columns: list[str]):
        self.columns = columns
        super().__init__(f"design matrix is rank deficient; offending columns: {columns}")


def column_name(item: str, level: str) -> str:
    return f"{item}::{level}"


@dataclass
class DesignMatrix:
    X: np.ndarray
    y: np.ndarray
    columns: list[str]
    clusters: list[str]
    items: list[str]
    dropped: list[tuple[str, str]] = field(default_factory=list)  # (column, reason)


def _offending_columns(X: np.ndarray, columns: list[str]) -> list[str]:
    """Greedy scan: columns that fail to increase rank when appended."""
    offenders = []
    kept = np.empty((X.shape[0], 0))
    rank = 0
    for j, name in enumerate(columns):
        candidate = np.column_stack([kept, X[:, j]])
        new_rank = np.linalg.matrix_rank(candidate)
        if new_rank > rank:
            kept, rank = candidate, new_rank
        else:
            offenders.append(name)
    return offenders


def build_design(
    extractions: list[ReviewExtraction],
    reviews: dict[str, Review],
    level: str = "attribute",
    controls: bool = False,
    mention_floor: float | None = None,
    exclude_items: tuple[str, ...] = (),
) -> DesignMatrix:
    """Assemble the item-sentiment design matrix and star-rating response.

    Items mentioned in less than ``mention_floor`` of reviews are excluded
    (default 1% at attribute level, 3% at feature level, mirroring the
    prevalence rules used for reporting). Indicator columns that never fire
    are dropped with a note rather than carried as zero columns.
    """
    extractions = list(extractions)
    if not extractions:
        raise AnalyticsError("no extractions to model")
    missing = [ex.review_id for ex in extractions if ex.review_id not in reviews]
    if missing:
        raise AnalyticsError(f"extractions without a matching review: {missing[:5]}")
    if mention_floor is None:
        mention_floor = DEFAULT_ATTRIBUTE_FLOOR if level == "attribute" else DEFAULT_FEATURE_FLOOR

    stats = mention_stats(extractions, level=level, report_floor=0.0)
    items = [
        r.name
        for r in stats.rows
        if r.mention >= mention_floor and r.name not in exclude_items
    ]
    if not items:
        raise AnalyticsError("no items above the mention floor")

    n = len(extractions)
    columns = ["intercept"]
    blocks: list[np.ndarray] = [np.ones((n, 1))]

    item_block = np.zeros((n, len(items) * 3))
    for row, ex in enumerate(extractions):
        sentiments: dict[str, int] = {}
        for a in ex.attributes:
            if level == "attribute":
                sentiments[a.name] = a.sentiment
            else:
                for f in a.features:
                    sentiments[f.name] = f.sentiment
        for j, item in enumerate(items):
            if item not in sentiments:
                item_block[row, j * 3 + 2] = 1.0
            else:
                cls = to_3pt(sentiments[item])
                if cls is Sentiment3.NEUTRAL:
                    item_block[row, j * 3 + 0] = 1.0
                elif cls is Sentiment3.POSITIVE:
                    item_block[row, j * 3 + 1] = 1.0
                # negative is the reference level: no indicator
    for item in items:
        columns.extend(column_name(item, lv) for lv in LEVELS)
    blocks.append(item_block)

    review_rows = [reviews[ex.review_id] for ex in extractions]
    if controls:
        def fe_block(values: list, prefix: str) -> tuple[np.ndarray, list[str]]:
            levels = sorted({v for v in values if v is not None}, key=str)
            keep = levels[1:]  # first level is the reference
            block = np.zeros((n, len(keep)))
            for row, v in enumerate(values):
                if v in keep:
                    block[row, keep.index(v)] = 1.0
            return block, [f"{prefix}::{v}" for v in keep]

        store_block, store_cols = fe_block([r.store_id for r in review_rows], "store")
        year_block, year_cols = fe_block([r.date.year for r in review_rows], "year")
        join_block, join_cols = fe_block(
            [r.reviewer_join_year for r in review_rows], "join_year"
        )
        elite = np.array([[r.reviewer_elite_years] for r in review_rows], dtype=float)
        blocks.extend([store_block, year_block, join_block, elite])
        columns.extend(store_cols + year_cols + join_cols + ["elite_years"])

    X = np.hstack(blocks)
    y = np.array([r.stars for r in review_rows], dtype=float)
    clusters = [r.store_id for r in review_rows]

    dropped: list[tuple[str, str]] = []
    keep_idx = []
    for j, name in enumerate(columns):
        col = X[:, j]
        if name != "intercept" and np.all(col == col[0]):
            reason = "never observed" if col[0] == 0.0 else "constant column"
            dropped.append((name, reason))
        else:
            keep_idx.append(j)
    X = X[:, keep_idx]
    columns = [columns[j] for j in keep_idx]

    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise RankDeficiencyError(_offending_columns(X, columns))

    return DesignMatrix(X=X, y=y, columns=columns, clusters=clusters, items=items, dropped=dropped)


# ---------------------------------------------------------------------------
# estimation


@dataclass
class FittedModel:
    level: str
    columns: list[str]
    coefficients: np.ndarray
    se_plain: np.ndarray
    se_clustered: np.ndarray | None
    p_values: np.ndarray
    r_squared: float
    adj_r_squared: float
    n_obs: int
    n_clusters: int
    clustered_available: bool
    items: list[str] = field(default_factory=list)
    dropped: list[tuple[str, str]] = field(default_factory=list)

    def coef(self, name: str) -> float:
        return float(self.coefficients[self.columns.index(name)])

    def item_coef(self, item: str, level: str) -> float | None:
        """Coefficient for an item x level dummy; None when the column was
        dropped (that level never observed)."""
        name = column_name(item, level)
        if name in self.columns:
            return self.coef(name)
        if (name, "never observed") in self.dropped or any(
            d[0] == name for d in self.dropped
        ):
            return None
        raise AnalyticsError(f"model has no coefficient {name!r}")

    def has_item(self, item: str) -> bool:
        name_prefix = f"{item}::"
        return any(c.startswith(name_prefix) for c in self.columns) or any(
            d[0].startswith(name_prefix) for d in self.dropped
        )

    def to_payload(self) -> dict:
        return {
            "level": self.level,
            "columns": self.columns,
            "coefficients": self.coefficients.tolist(),
            "se_plain": self.se_plain.tolist(),
            "se_clustered": None if self.se_clustered is None else self.se_clustered.tolist(),
            "p_values": self.p_values.tolist(),
            "r_squared": self.r_squared,
            "adj_r_squared": self.adj_r_squared,
            "n_obs": self.n_obs,
            "n_clusters": self.n_clusters,
            "clustered_available": self.clustered_available,
            "items": self.items,
            "dropped": [list(d) for d in self.dropped],
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "FittedModel":
        return cls(
            level=payload["level"],
            columns=list(payload["columns"]),
            coefficients=np.asarray(payload["coefficients"], dtype=float),
            se_plain=np.asarray(payload["se_plain"], dtype=float),
            se_clustered=(
                None
                if payload["se_clustered"] is None
                else np.asarray(payload["se_clustered"], dtype=float)
            ),
            p_values=np.asarray(payload["p_values"], dtype=float),
            r_squared=payload["r_squared"],
            adj_r_squared=payload["adj_r_squared"],
            n_obs=payload["n_obs"],
            n_clusters=payload["n_clusters"],
            clustered_available=payload["clustered_available"],
            items=list(payload.get("items", [])),
            dropped=[tuple(d) for d in payload.get("dropped", [])],
        )


def _normal_sf(z: np.ndarray) -> np.ndarray:
    return 0.5 * np.array([math.erfc(v / math.sqrt(2.0)) for v in np.abs(z)])


def fit_ols(
    design: DesignMatrix,
    level: str = "attribute",
) -> FittedModel:
    """Least squares with plain and one-way cluster-robust (sandwich) SEs."""
    X, y = design.X, design.y
    n, k = X.shape
    if n <= k:
        raise AnalyticsError(f"need more observations ({n}) than columns ({k})")
    if np.linalg.matrix_rank(X) < k:
        raise RankDeficiencyError(_offending_columns(X, design.columns))

    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    residuals = y - X @ beta
    xtx_inv = np.linalg.inv(X.T @ X)

    sigma2 = float(residuals @ residuals) / (n - k)
    cov_plain = sigma2 * xtx_inv
    se_plain = np.sqrt(np.diag(cov_plain))

    groups: dict[str, list[int]] = {}
    for i, g in enumerate(design.clusters):
        groups.setdefault(g, []).append(i)
    n_clusters = len(groups)
    se_clustered = None
    clustered_available = n_clusters >= 2
    if clustered_available:
        meat = np.zeros((k, k))
        for idx in groups.values():
            xg = X[idx, :]
            eg = residuals[idx]
            score = xg.T @ eg
            meat += np.outer(score, score)
        correction = (n_clusters / (n_clusters - 1)) * ((n - 1) / (n - k))
        cov_cl = correction * xtx_inv @ meat @ xtx_inv
        se_clustered = np.sqrt(np.maximum(np.diag(cov_cl), 0.0))

    se_for_p = se_clustered if se_clustered is not None else se_plain
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se_for_p > 0, beta / se_for_p, np.inf)
    p_values = 2.0 * _normal_sf(z)

    sst = float(np.sum((y - y.mean()) ** 2))
    ssr = float(residuals @ residuals)
    r2 = 1.0 - ssr / sst if sst > 0 else 1.0
    adj_r2 = 1.0 - (1.0 - r2) * (n - 1) / (n - k)

    return FittedModel(
        level=level,
        columns=list(design.columns),
        coefficients=beta,
        se_plain=se_plain,
        se_clustered=se_clustered,
        p_values=p_values,
        r_squared=r2,
        adj_r_squared=adj_r2,
        n_obs=n,
        n_clusters=n_clusters,
        clustered_available=clustered_available,
        items=list(design.items),
        dropped=list(design.dropped),
    )
