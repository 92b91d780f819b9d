import datetime as dt
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reviewlens.corpus import (
    EmptyTextError,
    IngestError,
    IngestFilter,
    InvalidReviewError,
    Review,
    SchemaVersionError,
    ingest_reviews,
    normalize_whitespace,
    read_records,
    reconstructs,
    split_sentences,
    write_records,
)
from reviewlens.corpus.store import read_document, write_document


# ---------------------------------------------------------------------------
# review validation


def test_review_rejects_bad_stars(review_factory):
    with pytest.raises(InvalidReviewError):
        review_factory(stars=0)
    with pytest.raises(InvalidReviewError):
        review_factory(stars=6)


def test_review_rejects_blank_text(review_factory):
    with pytest.raises(InvalidReviewError):
        review_factory(text="   \n ")


# ---------------------------------------------------------------------------
# sentence splitting


def test_paper_example_two_sentences():
    got = split_sentences("The coffee is great but expensive. What can a girl do.")
    assert [s.text for s in got] == [
        "The coffee is great but expensive.",
        "What can a girl do.",
    ]


def test_no_terminator_is_one_sentence():
    got = split_sentences("Great coffee")
    assert len(got) == 1 and got[0].text == "Great coffee"


def test_whitespace_only_raises():
    with pytest.raises(EmptyTextError):
        split_sentences("  \t\n ")


def test_abbreviations_do_not_split():
    got = split_sentences("Dr. Smith loved it. Mr. Jones did not.")
    assert [s.text for s in got] == ["Dr. Smith loved it.", "Mr. Jones did not."]


def test_decimals_do_not_split():
    got = split_sentences("It cost 4.50 total. Still worth it.")
    assert len(got) == 2


def test_terminator_runs_stay_left():
    got = split_sentences("Wait what?! They were closed... Next time then.")
    assert [s.text for s in got] == [
        "Wait what?!",
        "They were closed...",
        "Next time then.",
    ]


def test_symbol_only_sentence_is_kept():
    got = split_sentences("...")
    assert [s.text for s in got] == ["..."]


def test_lowercase_continuation_does_not_split():
    got = split_sentences("loved it. really.")
    assert len(got) == 1


def test_indices_are_sequential():
    got = split_sentences("One. Two. Three.")
    assert [s.index for s in got] == [0, 1, 2]


def test_splitter_against_labeled_oracle(fixtures_dir):
    """Composition-labeled corpus: the splitter must agree on >= 95% of it."""
    rows = json.loads((fixtures_dir / "sentence_oracle.json").read_text())
    assert len(rows) == 200
    hits = sum(
        1 for row in rows if len(split_sentences(row["text"])) == row["n_sentences"]
    )
    assert hits / len(rows) >= 0.95


@settings(max_examples=200, deadline=None)
@given(
    st.text(
        alphabet=st.characters(blacklist_categories=("Cs",), blacklist_characters="\x00"),
        min_size=1,
        max_size=300,
    ).filter(lambda t: t.strip())
)
def test_split_conservation_property(text):
    sentences = split_sentences(text)
    assert sentences, "non-blank text must yield at least one sentence"
    assert all(s.text for s in sentences)
    assert reconstructs(text, sentences)


def test_normalize_whitespace_collapses_runs():
    assert normalize_whitespace("a \t b\n\nc ") == "a b c"


# ---------------------------------------------------------------------------
# ingestion


def test_ingest_filters_and_joins(fixtures_dir):
    result = ingest_reviews(
        fixtures_dir / "yelp/review.ndjson",
        fixtures_dir / "yelp/business.ndjson",
        IngestFilter(category_contains="Coffee", name_contains="Starbucks"),
        user_path=fixtures_dir / "yelp/user.ndjson",
    )
    assert [r.review_id for r in result.reviews] == ["r1", "r2", "r4"]
    assert result.skipped_unjoinable == 1  # r5 has no business row
    assert result.skipped_malformed == 0
    r1 = result.reviews[0]
    assert r1.state == "PA"
    assert r1.reviewer_join_year == 2011
    assert r1.reviewer_elite_years == 2  # 2012, 2013 before 2016; 2019 is after
    assert set(result.stores) == {"b-star-01", "b-star-02"}
    assert result.stores["b-star-01"].latitude == pytest.approx(39.95)


def test_ingest_counts_malformed_lines(fixtures_dir):
    result = ingest_reviews(
        fixtures_dir / "yelp/review_malformed.ndjson",
        fixtures_dir / "yelp/business.ndjson",
        IngestFilter(category_contains="Coffee", name_contains="Starbucks"),
    )
    assert len(result.reviews) == 3
    assert result.skipped_malformed == 1


def test_ingest_missing_file_is_fatal(fixtures_dir, tmp_path):
    with pytest.raises(IngestError):
        ingest_reviews(
            tmp_path / "nope.ndjson",
            fixtures_dir / "yelp/business.ndjson",
            IngestFilter(),
        )


def test_ingest_sampling_is_deterministic(fixtures_dir):
    flt = IngestFilter(category_contains="Coffee", sample_size=2, seed=42)
    first = ingest_reviews(
        fixtures_dir / "yelp/review.ndjson", fixtures_dir / "yelp/business.ndjson", flt
    )
    second = ingest_reviews(
        fixtures_dir / "yelp/review.ndjson", fixtures_dir / "yelp/business.ndjson", flt
    )
    assert [r.to_record() for r in first.reviews] == [r.to_record() for r in second.reviews]
    assert len(first.reviews) == 2


def test_ingest_date_window(fixtures_dir):
    flt = IngestFilter(
        category_contains="Coffee",
        name_contains="Starbucks",
        date_from=dt.date(2017, 1, 1),
        date_to=dt.date(2019, 1, 1),
    )
    result = ingest_reviews(
        fixtures_dir / "yelp/review.ndjson", fixtures_dir / "yelp/business.ndjson", flt
    )
    assert [r.review_id for r in result.reviews] == ["r2"]


# ---------------------------------------------------------------------------
# persistence


def test_record_stream_round_trip(tmp_path, review_factory):
    reviews = [review_factory(review_id=f"r{i}", stars=1 + i % 5) for i in range(10)]
    path = tmp_path / "reviews.ndjson"
    write_records(path, "review", (r.to_record() for r in reviews))
    loaded = [Review.from_record(rec) for rec in read_records(path, "review")]
    assert loaded == reviews


def test_empty_stream_has_header_only(tmp_path):
    path = tmp_path / "empty.ndjson"
    write_records(path, "review", [])
    assert len(path.read_text().strip().splitlines()) == 1
    assert list(read_records(path, "review")) == []


def test_version_mismatch_raises(tmp_path):
    path = tmp_path / "artifact.ndjson"
    path.write_text('{"kind":"review","version":99}\n')
    with pytest.raises(SchemaVersionError):
        list(read_records(path, "review"))
    with pytest.raises(SchemaVersionError):
        list(read_records(path, "other_kind"))


def test_document_round_trip_preserves_order(tmp_path, taxonomy):
    path = tmp_path / "taxonomy.json"
    write_document(path, "taxonomy", taxonomy.to_payload())
    payload = read_document(path, "taxonomy")
    assert [a["name"] for a in payload["attributes"]] == taxonomy.attribute_names()


def test_persist_is_byte_stable(tmp_path, review_factory):
    reviews = [review_factory(review_id=f"r{i}") for i in range(5)]
    p1, p2 = tmp_path / "a.ndjson", tmp_path / "b.ndjson"
    write_records(p1, "review", (r.to_record() for r in reviews))
    write_records(p2, "review", (r.to_record() for r in reviews))
    assert p1.read_bytes() == p2.read_bytes()


@settings(max_examples=50, deadline=None)
@given(
    st.lists(
        st.fixed_dictionaries(
            {
                "name": st.text(min_size=1, max_size=20),
                "count": st.integers(min_value=0, max_value=10_000),
                "weight": st.floats(allow_nan=False, allow_infinity=False),
            }
        ),
        max_size=30,
    )
)
def test_round_trip_identity_property(tmp_path_factory, records):
    path = tmp_path_factory.mktemp("store") / "records.ndjson"
    write_records(path, "generic", records)
    assert list(read_records(path, "generic")) == records
