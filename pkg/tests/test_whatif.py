import json

import numpy as np
import pytest

from conftest import make_review
from reviewlens.analytics import FittedModel
from reviewlens.extraction import AttributeExtraction, FeatureExtraction, ReviewExtraction
from reviewlens.whatif import (
    ImpactReport,
    UnknownFeatureError,
    WhatIfError,
    revenue_proxy,
    review_delta,
    simulate_uplift,
)

FEATURE = "Service Efficiency & Speed/Wait Time"


def model_with(feature_coefs: dict) -> FittedModel:
    columns, values = ["intercept"], [0.0]
    for item, levels in feature_coefs.items():
        for level, value in levels.items():
            columns.append(f"{item}::{level}")
            values.append(value)
    arr = np.asarray(values)
    zeros = np.zeros_like(arr)
    return FittedModel(
        level="feature",
        columns=columns,
        coefficients=arr,
        se_plain=zeros,
        se_clustered=None,
        p_values=zeros,
        r_squared=0.0,
        adj_r_squared=0.0,
        n_obs=0,
        n_clusters=0,
        clustered_available=False,
        items=list(feature_coefs),
    )


def ex_with_feature(review_id: str, score: int | None) -> ReviewExtraction:
    if score is None:
        return ReviewExtraction(
            review_id=review_id,
            overall=3,
            attributes=(),
            other_attribute_sentences=(0,),
            n_sentences=1,
        )
    return ReviewExtraction(
        review_id=review_id,
        overall=score,
        attributes=(
            AttributeExtraction(
                name="Customer Service",
                sentiment=score,
                sentence_indices=(0,),
                features=(
                    FeatureExtraction(name=FEATURE, sentiment=score, sentence_indices=(0,)),
                ),
            ),
        ),
        other_attribute_sentences=(),
        n_sentences=1,
    )


REFERENCE_MODEL = model_with({FEATURE: {"neutral": 0.63, "positive": 0.79}})


# ---------------------------------------------------------------------------
# per-review deltas


def test_negative_mention_gains_neutral_coefficient():
    ex = ex_with_feature("r", 1)
    assert review_delta(ex, REFERENCE_MODEL, FEATURE) == pytest.approx(0.63)


def test_neutral_mention_gains_coefficient_difference():
    ex = ex_with_feature("r", 3)
    assert review_delta(ex, REFERENCE_MODEL, FEATURE) == pytest.approx(0.79 - 0.63)


def test_positive_mention_left_unchanged():
    assert review_delta(ex_with_feature("r", 5), REFERENCE_MODEL, FEATURE) == 0.0
    assert review_delta(ex_with_feature("r", 4), REFERENCE_MODEL, FEATURE) == 0.0


def test_not_mentioned_is_untouched():
    assert review_delta(ex_with_feature("r", None), REFERENCE_MODEL, FEATURE) == 0.0


# ---------------------------------------------------------------------------
# revenue proxy


def test_revenue_proxy_published_values():
    assert revenue_proxy(0.19) == (0.95, 1.71)
    assert revenue_proxy(0.16) == (0.80, 1.44)


def test_revenue_proxy_zero():
    assert revenue_proxy(0.0) == (0.0, 0.0)


def test_revenue_proxy_rejects_negative():
    with pytest.raises(WhatIfError):
        revenue_proxy(-0.1)


# ---------------------------------------------------------------------------
# store-level simulation


def three_store_fixture():
    """Hand-computed: store A has one negative and one positive mention
    (delta (.63 + 0)/2 = .315), store B is all positive (0), store C never
    mentions the feature (0)."""
    exs = [
        ex_with_feature("a1", 1),
        ex_with_feature("a2", 5),
        ex_with_feature("b1", 4),
        ex_with_feature("b2", 5),
        ex_with_feature("c1", None),
        ex_with_feature("c2", None),
    ]
    reviews = {
        "a1": make_review(review_id="a1", store_id="A"),
        "a2": make_review(review_id="a2", store_id="A"),
        "b1": make_review(review_id="b1", store_id="B"),
        "b2": make_review(review_id="b2", store_id="B"),
        "c1": make_review(review_id="c1", store_id="C"),
        "c2": make_review(review_id="c2", store_id="C"),
    }
    return exs, reviews


def test_three_store_fixture_matches_hand_computation():
    exs, reviews = three_store_fixture()
    report = simulate_uplift(exs, REFERENCE_MODEL, FEATURE, reviews)
    by_store = {s.store_id: s for s in report.stores}
    assert by_store["A"].delta == pytest.approx(0.315, abs=1e-12)
    assert by_store["B"].delta == 0.0  # all-positive store
    assert by_store["C"].delta == 0.0  # no-mention store
    assert report.mean == pytest.approx(0.315 / 3, abs=1e-12)
    assert report.min == 0.0 and report.max == pytest.approx(0.315)


def test_store_scope_restricts_output():
    exs, reviews = three_store_fixture()
    report = simulate_uplift(exs, REFERENCE_MODEL, FEATURE, reviews, store_scope={"A"})
    assert [s.store_id for s in report.stores] == ["A"]


def test_mentioning_only_denominator_switch():
    exs, reviews = three_store_fixture()
    report = simulate_uplift(
        exs, REFERENCE_MODEL, FEATURE, reviews, include_non_mentioning=False
    )
    by_store = {s.store_id: s for s in report.stores}
    assert by_store["A"].delta == pytest.approx(0.63 / 2)  # 2 mentions in the denominator
    assert by_store["C"].delta == 0.0


def test_unknown_feature_errors():
    exs, reviews = three_store_fixture()
    with pytest.raises(UnknownFeatureError, match="Mystery"):
        simulate_uplift(exs, REFERENCE_MODEL, "Mystery Feature", reviews)


def test_monotone_adding_negative_mention():
    exs, reviews = three_store_fixture()
    before = {
        s.store_id: s.delta
        for s in simulate_uplift(exs, REFERENCE_MODEL, FEATURE, reviews).stores
    }
    exs2 = exs + [ex_with_feature("a3", 2)]
    reviews2 = dict(reviews, a3=make_review(review_id="a3", store_id="A"))
    after = {
        s.store_id: s.delta
        for s in simulate_uplift(exs2, REFERENCE_MODEL, FEATURE, reviews2).stores
    }
    assert after["A"] >= before["A"] or after["A"] == pytest.approx(
        (0.63 + 0 + 0.63) / 3
    )
    assert after["B"] == before["B"] and after["C"] == before["C"]


def test_linearity_in_coefficients():
    exs, reviews = three_store_fixture()
    doubled = model_with({FEATURE: {"neutral": 1.26, "positive": 1.58}})
    base = simulate_uplift(exs, REFERENCE_MODEL, FEATURE, reviews)
    double = simulate_uplift(exs, doubled, FEATURE, reviews)
    for s_base, s_double in zip(base.stores, double.stores):
        assert s_double.delta == pytest.approx(2 * s_base.delta, abs=1e-12)


def test_revenue_range_attached_per_store():
    exs = [ex_with_feature(f"r{i}", 1) for i in range(5)]
    reviews = {f"r{i}": make_review(review_id=f"r{i}", store_id="S") for i in range(5)}
    model = model_with({FEATURE: {"neutral": 0.19, "positive": 0.19}})
    report = simulate_uplift(exs, model, FEATURE, reviews)
    store = report.stores[0]
    assert store.delta == pytest.approx(0.19)
    assert (store.revenue_low_pct, store.revenue_high_pct) == (0.95, 1.71)


def test_histogram_counts_every_store():
    exs, reviews = three_store_fixture()
    report = simulate_uplift(exs, REFERENCE_MODEL, FEATURE, reviews)
    assert sum(report.histogram) == len(report.stores) == 3


def test_report_payload_round_trip_shape():
    exs, reviews = three_store_fixture()
    payload = simulate_uplift(exs, REFERENCE_MODEL, FEATURE, reviews).to_payload()
    encoded = json.dumps(payload)
    decoded = json.loads(encoded)
    assert decoded["feature"] == FEATURE
    assert len(decoded["stores"]) == 3
