import datetime as dt
import sys
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"
sys.path.insert(0, str(FIXTURES))

from reviewlens.corpus.models import Review
from reviewlens.taxonomy import load_default_taxonomy


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(name): named acceptance criterion, summarized at the end"
    )


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            marker = getattr(report, "acceptance_name", None)
            if marker:
                lines.append((marker, outcome == "passed"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, ok in sorted(lines):
            terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call":
        marker = item.get_closest_marker("acceptance")
        if marker:
            report.acceptance_name = marker.kwargs.get("name", item.name)


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def taxonomy():
    return load_default_taxonomy()


def make_review(
    review_id: str = "r1",
    store_id: str = "s1",
    text: str = "Great coffee.",
    stars: int = 4,
    date: dt.date = dt.date(2018, 6, 1),
    reviewer_id: str = "u1",
    **kwargs,
) -> Review:
    return Review(
        review_id=review_id,
        store_id=store_id,
        reviewer_id=reviewer_id,
        date=date,
        stars=stars,
        text=text,
        **kwargs,
    )


@pytest.fixture
def review_factory():
    return make_review
