from __future__ import annotations

import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from transit_clusters.dag import Dag  # noqa: E402
from transit_clusters.random_graphs import random_causal_diagram, random_dag  # noqa: E402

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def dags(draw, min_n: int = 2, max_n: int = 8, connected: bool = True) -> Dag:
    n = draw(st.integers(min_n, max_n))
    density = draw(st.sampled_from([0.2, 0.4, 0.6]))
    return random_dag(n, density, draw(st.randoms(use_true_random=False)), connected=connected)


@st.composite
def dags_with_subset(draw, min_n: int = 2, max_n: int = 8):
    g = draw(dags(min_n, max_n))
    bits = draw(st.lists(st.booleans(), min_size=g.n, max_size=g.n))
    return g, sum(1 << v for v, keep in enumerate(bits) if keep)


@st.composite
def causal_diagrams(draw, max_observed: int = 7, max_latent: int = 4) -> Dag:
    n_obs = draw(st.integers(2, max_observed))
    n_lat = draw(st.integers(0, max_latent))
    density = draw(st.sampled_from([0.2, 0.4, 0.6]))
    return random_causal_diagram(n_obs, n_lat, density, draw(st.randoms(use_true_random=False)))


@pytest.fixture
def fixtures_dir() -> Path:
    from transit_clusters.fixtures import fixture_path

    return Path(str(fixture_path("fig3a"))).parent


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is not None and module.RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(module.RESULTS):
            terminalreporter.write_line(module.RESULTS[k])
