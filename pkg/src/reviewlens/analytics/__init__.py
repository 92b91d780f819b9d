"""Descriptive tables, trend series, rating regressions, importance, map."""

from .descriptives import (
    AnalyticsError,
    ItemStats,
    MentionStats,
    ShareRow,
    TrendPoint,
    TrendSeries,
    mention_stats,
    sentiment_shares,
    trend_series,
)
from .factors import (
    DegenerateFactorsError,
    PerceptualMap,
    perceptual_map,
    store_attribute_means,
)
from .importance import UndefinedImportanceError, coefficient_range, importance
from .regression import (
    DesignMatrix,
    FittedModel,
    RankDeficiencyError,
    build_design,
    column_name,
    fit_ols,
)

__all__ = [
    "AnalyticsError",
    "DegenerateFactorsError",
    "DesignMatrix",
    "FittedModel",
    "ItemStats",
    "MentionStats",
    "PerceptualMap",
    "RankDeficiencyError",
    "ShareRow",
    "TrendPoint",
    "TrendSeries",
    "UndefinedImportanceError",
    "build_design",
    "coefficient_range",
    "column_name",
    "fit_ols",
    "importance",
    "mention_stats",
    "perceptual_map",
    "sentiment_shares",
    "store_attribute_means",
    "trend_series",
]
