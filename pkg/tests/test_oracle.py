import itertools

import numpy as np
import pytest

from conftest import TOPOLOGY
from treestars import graph as G
from treestars.analytic import scenario2_variance_as_printed, scenario_moments
from treestars.distributions import CostSpec, Pmf
from treestars.graph import TreeStarsGraph
from treestars.model import ModelParams
from treestars.oracle import MAX_EDGES, edge_count, exact_moments

GRID = [
    (d_plus, d_minus, R, p, q)
    for d_plus, d_minus, R in itertools.product((1, 2), (0, 1, 2), (1, 2))
    if edge_count(G.deterministic(d_plus, d_minus, R)) <= 12
    for p, q in itertools.product((0.3, 0.7), repeat=2)
]


def params_for(d_plus, d_minus, R, p, q, topology="I"):
    cc, cu = TOPOLOGY[topology]
    return ModelParams(Pmf.point(d_plus), Pmf.point(d_minus), R, p, q, cc, cu)


def scenarios_for(d_minus):
    return (1, 2, 3, 4) if d_minus > 0 else (1, 3)


@pytest.mark.parametrize("d_plus, d_minus, R, p, q", GRID)
@pytest.mark.parametrize("topology", ["I", "II", "III"])
def test_enumeration_matches_closed_forms(d_plus, d_minus, R, p, q, topology):
    g = G.deterministic(d_plus, d_minus, R)
    params = params_for(d_plus, d_minus, R, p, q, topology)
    for s in scenarios_for(d_minus):
        exact = exact_moments(g, p, q, s, params.cost_contract, params.cost_user)
        formula = scenario_moments(params, s)
        assert formula.mean == pytest.approx(exact.mean, rel=1e-10)
        assert formula.variance == pytest.approx(exact.variance, rel=1e-10)


def test_grid_is_the_full_small_family():
    shapes = {row[:3] for row in GRID}
    assert len(shapes) == 10 and len(GRID) == 40
    assert (2, 2, 2) not in shapes and (2, 1, 2) not in shapes and (2, 2, 1) in shapes


def test_printed_scenario2_variance_disagrees_with_enumeration():
    g = G.deterministic(2, 1, 1)
    params = params_for(2, 1, 1, 0.5, 0.7)
    exact = exact_moments(g, 0.5, 0.7, 2, params.cost_contract, params.cost_user)
    gap = scenario2_variance_as_printed(params) - exact.variance
    assert gap == pytest.approx(0.7**2 * 0.3**2 * 1000**2, rel=1e-9)


def test_hand_computed_two_contract_chain():
    g = TreeStarsGraph([-1, 0], [0, 1], [0, 0])
    cost = CostSpec.point(1.0)
    m = exact_moments(g, 0.25, 0.5, 1, cost, cost)
    assert m == pytest.approx((1.25, 0.25 * 0.75))
    m = exact_moments(g, 0.25, 0.5, 3, cost, cost)
    assert m == pytest.approx((0.25, 0.25 * 0.75))


def test_irregular_graph_against_manual_sum():
    # root with one child that has a user; root has one user
    g = TreeStarsGraph([-1, 0], [0, 1], [1, 1])
    cc, cu = CostSpec.point(10.0), CostSpec.point(1.0)
    p, q = 0.6, 0.3
    # scenario 4: origin is the child's user; root star is {root, root's user}
    hit = q * p
    mean = hit * (10 + q * 1)
    second = hit * ((1 - q) * 100 + q * 121)
    m = exact_moments(g, p, q, 4, cc, cu)
    assert m.mean == pytest.approx(mean)
    assert m.variance == pytest.approx(second - mean**2)


def test_refuses_large_or_empty_cases():
    with pytest.raises(ValueError):
        exact_moments(G.deterministic(2, 2, 3), 0.5, 0.5, 1, CostSpec.point(1), CostSpec.point(1))
    assert edge_count(G.deterministic(2, 2, 3)) > MAX_EDGES
    with pytest.raises(ValueError):
        exact_moments(G.deterministic(1, 0, 1), 0.5, 0.5, 4, CostSpec.point(1), CostSpec.point(1))
