import numpy as np
import pytest

from conftest import RAND_OFFSPRING, RAND_USERS, make_params
from treestars import graph as G
from treestars.distributions import Pmf
from treestars.graph import TreeStarsGraph
from treestars.model import ScenarioWeights
from treestars.montecarlo import RunConfig, estimate_scenario
from treestars.percolation import Subset
from treestars.scenarios import (
    aggregate_loss,
    draw_scenario,
    origin_and_subset,
    origin_set,
    single_contagion,
)


@pytest.fixture
def binary():
    return G.deterministic(2, 4, 2)


def test_origin_sets(binary):
    assert origin_set(binary, 1) == [G.ROOT]
    root_users = origin_set(binary, 2)
    assert len(root_users) == 4 and all(v.contract == 0 and v.slot is not None for v in root_users)
    assert [v.contract for v in origin_set(binary, 3)] == [1, 2, 3, 4, 5, 6]
    outside = origin_set(binary, 4)
    assert len(outside) == 24 and all(v.contract != 0 and v.slot is not None for v in outside)
    with pytest.raises(ValueError):
        origin_set(binary, 5)


def test_subsets_by_scenario(binary, rng):
    expected = {1: Subset.ALL, 2: Subset.ALL_EXCEPT_ORIGIN, 3: Subset.ROOT_STAR, 4: Subset.ROOT_STAR}
    for s, subset in expected.items():
        origin, got = origin_and_subset(binary, s, rng)
        assert got is subset and origin in origin_set(binary, s)


def test_single_root_has_no_external_origin(rng):
    lone = TreeStarsGraph([-1], [0], [3])
    assert origin_and_subset(lone, 3, rng) == (None, Subset.ROOT_STAR)
    assert origin_and_subset(lone, 4, rng) == (None, Subset.ROOT_STAR)
    assert origin_and_subset(TreeStarsGraph([-1], [0], [0]), 2, rng)[0] is None


def test_external_origin_distance_histogram(binary, rng):
    n = 1_000_000
    draws = np.array([v.contract for v in origin_set(binary, 3)])[rng.integers(6, size=n)]
    at_distance_one = np.mean(binary.depth[draws] == 1)
    assert abs(at_distance_one - 1 / 3) < 4 * np.sqrt(2 / 9 / n)


def test_root_user_origin_is_never_the_root(rng):
    g = G.generate(RAND_OFFSPRING, RAND_USERS, 2, rng)
    for _ in range(200):
        origin, _ = origin_and_subset(g, 2, rng)
        assert origin.contract == 0 and origin.slot is not None


def test_everything_open_loses_the_whole_graph(rng):
    params = make_params(p=1.0, q=1.0)
    for _ in range(20):
        assert single_contagion(params, 1, rng).loss == 98000
        assert single_contagion(params, 2, rng).loss == 97000
        assert single_contagion(params, 3, rng).loss == 14000
        assert single_contagion(params, 4, rng).loss == 14000


def test_everything_closed(rng):
    params = make_params(p=0.0, q=0.0)
    for _ in range(20):
        assert single_contagion(params, 1, rng).loss == 10000
        assert single_contagion(params, 2, rng).loss == 0
        assert single_contagion(params, 3, rng).loss == 0
        assert single_contagion(params, 4, rng).loss == 0


def test_root_user_origin_excluded_from_loss(rng):
    # only user edges open: origin user reaches the root star but its own cost is not counted
    params = make_params(p=0.0, q=1.0)
    for _ in range(20):
        assert single_contagion(params, 2, rng).loss == 13000


def test_empty_origin_is_flagged_degenerate(rng):
    params = make_params(offspring=Pmf([1]), users=Pmf.point(2))
    out = single_contagion(params, 3, rng)
    assert out.degenerate and out.loss == 0
    assert not single_contagion(params, 1, rng).degenerate


def test_draw_scenario_frequencies(rng):
    weights = ScenarioWeights([0.1, 0.2, 0.3, 0.4])
    n = 40_000
    counts = np.bincount([draw_scenario(weights, rng) for _ in range(n)], minlength=5)[1:]
    se = np.sqrt(np.array(weights.q) * (1 - np.array(weights.q)) / n)
    assert np.all(np.abs(counts / n - weights.q) < 4 * se)


def test_aggregate_loss_with_no_events(rng):
    assert aggregate_loss(make_params(lam=0.0), rng) == 0.0


@pytest.mark.parametrize("scenario", [1, 2, 3, 4])
def test_reference_pipeline_agrees_with_compiled_engine(scenario):
    params = make_params(RAND_OFFSPRING, RAND_USERS, p=0.6, q=0.7, topology="II")
    rng = np.random.default_rng(1000 + scenario)
    n = 4000
    ref = np.array([single_contagion(params, scenario, rng).loss for _ in range(n)])
    fast = estimate_scenario(params, scenario, RunConfig(200_000, seed=scenario))
    se = np.hypot(ref.std(ddof=1) / np.sqrt(n), fast.se_mean)
    assert abs(ref.mean() - fast.mean) < 4 * se
