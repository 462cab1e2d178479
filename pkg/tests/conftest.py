import os

import pytest
from hypothesis import settings, strategies as st

from qhodge.cache import GBCache, set_default_cache
from qhodge.polyring import MPoly, parse_poly

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

CUSP = "x^2+y^3"
CORPUS = ["x", "x^2", "x*y", "x^2+y^2", "x^2+y^3", "x^3+y^3"]


@pytest.fixture(autouse=True, scope="session")
def _memory_cache():
    # keep test runs off any user cache directory
    os.environ.pop("QHODGE_CACHE_DIR", None)
    set_default_cache(GBCache(None))
    yield


def poly(text: str, n: int | None = None) -> MPoly:
    if n is None:
        n = 2 if "y" in text else 1
        if "z" in text:
            n = 3
    return parse_poly(text, n)


small_rats = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@st.composite
def mpolys(draw, n: int = 2, max_terms: int = 4, max_exp: int = 3) -> MPoly:
    terms = draw(
        st.dictionaries(
            st.tuples(*[st.integers(0, max_exp)] * n),
            small_rats.filter(lambda c: c != 0),
            max_size=max_terms,
        )
    )
    return MPoly(n, terms)


# -- acceptance reporting: one line per criterion in the terminal summary ----

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _CRITERIA[number] = (title, "PASS" if report.outcome == "passed" else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, status = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number}: {status} - {title}")
