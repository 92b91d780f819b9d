"""Reliability statistics for comparing two annotation sources.

Raw agreement and Krippendorff's alpha (nominal, coincidence-matrix
formulation with missing-data handling) quantify label consistency;
two-sample Kolmogorov-Smirnov and Pearson/Spearman correlations compare
distributions and sentiment scores. Confidence intervals everywhere come
from a seeded nonparametric bootstrap over units, so reports are
reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import kolmogorov

from .extraction import ReviewExtraction, to_3pt

DEFAULT_BOOTSTRAP = 2000

MISSING = None


class AgreementError(Exception):
    pass


class ShapeError(AgreementError):
    pass


@dataclass(frozen=True)
class ReliabilityData:
    """Units x coders nominal labels; None marks a missing cell."""

    units: tuple[str, ...]
    coders: tuple[str, ...]
    labels: tuple[tuple[object, ...], ...]  # row per unit, column per coder

    def __post_init__(self) -> None:
        if len(self.coders) < 2:
            raise ShapeError("reliability data needs at least 2 coders")
        if len(self.labels) != len(self.units):
            raise ShapeError("one label row per unit required")
        if any(len(row) != len(self.coders) for row in self.labels):
            raise ShapeError("each row must have one label per coder")
        if not any(sum(v is not MISSING for v in row) >= 2 for row in self.labels):
            raise ShapeError("need at least one unit with two or more labels")

    @classmethod
    def from_columns(cls, a, b, units=None) -> "ReliabilityData":
        if len(a) != len(b):
            raise ShapeError(f"label vectors differ in length: {len(a)} vs {len(b)}")
        units = tuple(units) if units is not None else tuple(f"u{i}" for i in range(len(a)))
        return cls(units=units, coders=("a", "b"), labels=tuple(zip(a, b)))


@dataclass(frozen=True)
class EstimateWithCI:
    value: float
    ci_low: float
    ci_high: float
    n_units: int
    degenerate: bool = False


def _bootstrap_ci(values: list[float], level: float = 0.95) -> tuple[float, float]:
    arr = np.sort(np.asarray(values, dtype=float))
    lo = (1.0 - level) / 2.0
    low = float(np.quantile(arr, lo))
    high = float(np.quantile(arr, 1.0 - lo))
    return low, high


def raw_agreement(
    a,
    b,
    n_bootstrap: int = DEFAULT_BOOTSTRAP,
    seed: int = 0,
    ci_level: float = 0.95,
) -> EstimateWithCI:
    """Fraction of positions where the two label vectors agree, with a
    bootstrap CI over units."""
    if len(a) != len(b):
        raise ShapeError(f"label vectors differ in length: {len(a)} vs {len(b)}")
    if len(a) == 0:
        raise ShapeError("label vectors are empty")
    matches = np.asarray([x == y for x, y in zip(a, b)], dtype=float)
    point = float(matches.mean())
    rng = np.random.default_rng(seed)
    n = len(matches)
    draws = [float(matches[rng.integers(0, n, n)].mean()) for _ in range(n_bootstrap)]
    low, high = _bootstrap_ci(draws, ci_level)
    return EstimateWithCI(point, min(low, point), max(high, point), n_units=n)


# ---------------------------------------------------------------------------
# Krippendorff's alpha


def _alpha_point(rows: list[list[object]]) -> tuple[float, bool, int]:
    """Nominal alpha over label rows (units) via the coincidence matrix.

    Units with fewer than two non-missing labels are excluded. Returns
    (alpha, degenerate, n_comparable_units).
    """
    usable = []
    for row in rows:
        values = [v for v in row if v is not MISSING]
        if len(values) >= 2:
            usable.append(values)
    if not usable:
        raise ShapeError("no unit has two or more labels")

    categories = sorted({v for row in usable for v in row}, key=repr)
    index = {c: i for i, c in enumerate(categories)}
    k = len(categories)
    coincidence = np.zeros((k, k), dtype=float)
    for values in usable:
        m = len(values)
        weight = 1.0 / (m - 1)
        for i, vi in enumerate(values):
            for j, vj in enumerate(values):
                if i != j:
                    coincidence[index[vi], index[vj]] += weight

    n_total = coincidence.sum()
    margins = coincidence.sum(axis=1)
    observed = (n_total - np.trace(coincidence)) / n_total
    expected_num = n_total * n_total - np.sum(margins**2)
    if expected_num <= 0 or n_total <= 1:
        # every pairable value identical: no disagreement is even possible
        return 1.0, True, len(usable)
    expected = expected_num / (n_total * (n_total - 1))
    return 1.0 - observed / expected, False, len(usable)


def krippendorff_alpha(
    data: ReliabilityData,
    n_bootstrap: int = DEFAULT_BOOTSTRAP,
    seed: int = 0,
    ci_level: float = 0.95,
) -> EstimateWithCI:
    """Nominal-metric alpha with a unit-resampling bootstrap CI."""
    rows = [list(row) for row in data.labels]
    point, degenerate, n_comparable = _alpha_point(rows)
    if degenerate or n_bootstrap <= 0:
        return EstimateWithCI(point, point, point, n_comparable, degenerate=degenerate)

    rng = np.random.default_rng(seed)
    n = len(rows)
    draws = []
    for _ in range(n_bootstrap):
        resample = [rows[i] for i in rng.integers(0, n, n)]
        try:
            value, _, _ = _alpha_point(resample)
        except ShapeError:
            continue
        draws.append(value)
    if not draws:
        return EstimateWithCI(point, point, point, n_comparable, degenerate=degenerate)
    low, high = _bootstrap_ci(draws, ci_level)
    return EstimateWithCI(point, min(low, point), max(high, point), n_comparable)


# ---------------------------------------------------------------------------
# Kolmogorov-Smirnov


def ks_test(sample_a, sample_b) -> tuple[float, float]:
    """Two-sample KS: D = sup |ECDF_A - ECDF_B|, asymptotic p-value using
    the effective sample size n*m/(n+m)."""
    a = np.sort(np.asarray(sample_a, dtype=float))
    b = np.sort(np.asarray(sample_b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ShapeError("both samples must be non-empty")
    support = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, support, side="right") / a.size
    cdf_b = np.searchsorted(b, support, side="right") / b.size
    d = float(np.max(np.abs(cdf_a - cdf_b)))
    en = a.size * b.size / (a.size + b.size)
    p = float(kolmogorov(math.sqrt(en) * d))
    return d, min(max(p, 0.0), 1.0)


# ---------------------------------------------------------------------------
# correlations


class UndefinedCorrelationError(AgreementError):
    pass


def _rank_average_ties(x: np.ndarray) -> np.ndarray:
    order = np.argsort(x, kind="mergesort")
    ranks = np.empty(len(x), dtype=float)
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and x[order[j + 1]] == x[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def correlations(x, y) -> tuple[float, float]:
    """(Pearson r, Spearman rho with average-rank ties)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size:
        raise ShapeError("vectors differ in length")
    if x.size < 3:
        raise ShapeError("need at least 3 observations")
    if np.std(x) == 0 or np.std(y) == 0:
        raise UndefinedCorrelationError("zero variance input")
    pearson = float(np.corrcoef(x, y)[0, 1])
    rx, ry = _rank_average_ties(x), _rank_average_ties(y)
    if np.std(rx) == 0 or np.std(ry) == 0:
        raise UndefinedCorrelationError("zero variance in ranks")
    spearman = float(np.corrcoef(rx, ry)[0, 1])
    return pearson, spearman


# ---------------------------------------------------------------------------
# variant comparison


class CoverageError(AgreementError):
    pass


@dataclass
class AgreementReport:
    variant: str
    mention_raw: EstimateWithCI
    mention_alpha: EstimateWithCI
    sentiment_raw: EstimateWithCI | None
    sentiment_alpha: EstimateWithCI | None
    n_units: int
    n_comparable: int

    def to_record(self) -> dict:
        def enc(e: EstimateWithCI | None):
            if e is None:
                return None
            return {
                "value": e.value,
                "ci_low": e.ci_low,
                "ci_high": e.ci_high,
                "n_units": e.n_units,
                "degenerate": e.degenerate,
            }

        return {
            "variant": self.variant,
            "mention_raw": enc(self.mention_raw),
            "mention_alpha": enc(self.mention_alpha),
            "sentiment_raw": enc(self.sentiment_raw),
            "sentiment_alpha": enc(self.sentiment_alpha),
            "n_units": self.n_units,
            "n_comparable": self.n_comparable,
        }


def _item_names(extractions: list[ReviewExtraction], level: str) -> list[str]:
    names: list[str] = []
    for ex in extractions:
        if level == "attribute":
            found = [a.name for a in ex.attributes]
        else:
            found = [f.name for a in ex.attributes for f in a.features]
        for name in found:
            if name not in names:
                names.append(name)
    return sorted(names)


def _sentiment_of(ex: ReviewExtraction, item: str, level: str, scale: int):
    if level == "attribute":
        a = ex.attribute(item)
        score = a.sentiment if a else None
    else:
        score = ex.feature_sentiment(item)
    if score is None:
        return None
    return score if scale == 5 else to_3pt(score).value


def compare_variants(
    runs: dict[str, list[ReviewExtraction]],
    gold: list[ReviewExtraction],
    level: str = "attribute",
    sentiment_scale: int = 3,
    n_bootstrap: int = DEFAULT_BOOTSTRAP,
    seed: int = 0,
) -> list[AgreementReport]:
    """Score each variant against the gold annotations.

    Mention agreement uses binary labels over review x item cells; sentiment
    agreement conditions on cells where both sources mark a mention.
    """
    gold_ids = [ex.review_id for ex in gold]
    gold_by_id = {ex.review_id: ex for ex in gold}
    reports = []
    for variant in sorted(runs):
        run = runs[variant]
        run_by_id = {ex.review_id: ex for ex in run}
        missing = [rid for rid in gold_ids if rid not in run_by_id]
        extra = [rid for rid in run_by_id if rid not in gold_by_id]
        if missing or extra:
            raise CoverageError(
                f"variant {variant!r} review ids do not match gold "
                f"(missing {missing[:5]}, extra {extra[:5]})"
            )
        items = _item_names(gold + run, level)
        mention_units, mention_a, mention_b = [], [], []
        senti_units, senti_a, senti_b = [], [], []
        for rid in gold_ids:
            g, r = gold_by_id[rid], run_by_id[rid]
            for item in items:
                unit = f"{rid}::{item}"
                gm, rm = g.mentions(item, level), r.mentions(item, level)
                mention_units.append(unit)
                mention_a.append(int(gm))
                mention_b.append(int(rm))
                if gm and rm:
                    senti_units.append(unit)
                    senti_a.append(_sentiment_of(g, item, level, sentiment_scale))
                    senti_b.append(_sentiment_of(r, item, level, sentiment_scale))

        m_raw = raw_agreement(mention_a, mention_b, n_bootstrap=n_bootstrap, seed=seed)
        m_alpha = krippendorff_alpha(
            ReliabilityData.from_columns(mention_a, mention_b, mention_units),
            n_bootstrap=n_bootstrap,
            seed=seed,
        )
        s_raw = s_alpha = None
        if senti_units:
            s_raw = raw_agreement(senti_a, senti_b, n_bootstrap=n_bootstrap, seed=seed)
            try:
                s_alpha = krippendorff_alpha(
                    ReliabilityData.from_columns(senti_a, senti_b, senti_units),
                    n_bootstrap=n_bootstrap,
                    seed=seed,
                )
            except ShapeError:
                s_alpha = None
        reports.append(
            AgreementReport(
                variant=variant,
                mention_raw=m_raw,
                mention_alpha=m_alpha,
                sentiment_raw=s_raw,
                sentiment_alpha=s_alpha,
                n_units=len(mention_units),
                n_comparable=len(senti_units),
            )
        )
    return reports
