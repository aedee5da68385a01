import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

import oracles
from medalg.algebra import from_points, make_starlet, median_graph_from_edges

settings.register_profile(
    "repo", derandomize=True, deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))

ACCEPTANCE_KEY = pytest.StashKey[dict]()


@st.composite
def coord_algebras(draw, max_factors: int = 3, max_len: int = 3, max_seeds: int = 4):
    """Median closure of a few points in a small product of chains."""
    factors = draw(st.lists(st.integers(2, max_len), min_size=1, max_size=max_factors))
    point = st.tuples(*(st.integers(0, f - 1) for f in factors))
    seeds = draw(st.lists(point, min_size=1, max_size=max_seeds, unique=True))
    pts = oracles.closure(seeds, oracles.coord_median)
    return from_points(factors, sorted(pts), "coords")


@st.composite
def tree_algebras(draw, max_n: int = 9):
    n = draw(st.integers(1, max_n))
    parents = [draw(st.integers(0, i - 1)) for i in range(1, n)]
    return median_graph_from_edges(n, [(p, i + 1) for i, p in enumerate(parents)])


def algebras(**kw):
    return st.one_of(coord_algebras(**kw), tree_algebras(),
                     st.integers(1, 5).map(make_starlet))


@pytest.fixture
def acceptance(request):
    """Record one verdict line per acceptance criterion for the terminal summary."""
    log = request.config.stash.setdefault(ACCEPTANCE_KEY, {})

    def record(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
        log[number] = line
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(ACCEPTANCE_KEY, None)
    if log:
        terminalreporter.write_sep("=", "acceptance criteria")
        for number in sorted(log):
            terminalreporter.write_line(log[number])


@pytest.fixture
def rng():
    return np.random.default_rng(0)
