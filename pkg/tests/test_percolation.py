import itertools

import numpy as np
import pytest

from treestars import graph as G
from treestars.distributions import CostSpec, Pmf
from treestars.graph import TreeStarsGraph, Vertex
from treestars.oracle import compromised_by_paths, edge_count
from treestars.percolation import EdgeSample, Subset, cluster, restricted_loss, restricted_size, sample_edges


def all_edges(g, state):
    n = G.contract_count(g)
    contract = np.full(n, state)
    contract[0] = False
    return EdgeSample(contract, np.full(G.user_count(g), state))


def point_sampler(value):
    return lambda n: np.full(n, float(value))


@pytest.fixture
def binary():
    return G.deterministic(2, 4, 2)


def test_sample_edges_extremes(binary, rng):
    e = sample_edges(binary, 1, 1, rng)
    assert e.contract_edge_open[1:].all() and e.user_edge_open.all()
    e = sample_edges(binary, 0, 0, rng)
    assert not e.contract_edge_open.any() and not e.user_edge_open.any()
    assert len(e.user_edge_open) == 28 and len(e.contract_edge_open) == 7


def test_open_edge_count_is_binomial():
    g = G.deterministic(2, 0, 2)
    rng = np.random.default_rng(17)
    n = 200_000
    counts = np.array([sample_edges(g, 0.8, 0.5, rng).contract_edge_open.sum() for _ in range(n)])
    se = np.sqrt(6 * 0.8 * 0.2 / n)
    assert abs(counts.mean() - 4.8) < 4 * se


def test_cluster_all_open_and_all_closed(binary):
    c = cluster(binary, all_edges(binary, True), G.ROOT)
    assert c.size() == 35
    assert restricted_size(c, Subset.ALL) == 35
    c = cluster(binary, all_edges(binary, False), G.ROOT)
    assert c.size() == 1
    assert restricted_size(c, Subset.ROOT_STAR) == 1


def test_cluster_stops_at_closed_edge():
    g = TreeStarsGraph([-1, 0, 1], [0, 1, 2], [0, 0, 2])
    edges = EdgeSample(np.array([False, True, False]), np.array([True, False]))
    c = cluster(g, edges, Vertex(2))
    assert c.contracts.tolist() == [False, False, True]
    assert c.users.tolist() == [True, False]


def test_user_origin_behind_closed_edge(binary):
    origin = Vertex(3, 0)
    c = cluster(binary, all_edges(binary, False), origin)
    assert c.size() == 1 and c.is_compromised(origin)
    assert restricted_size(c, Subset.ROOT_STAR) == 0
    assert restricted_size(c, Subset.ALL_EXCEPT_ORIGIN) == 0
    assert restricted_loss(c, Subset.ALL_EXCEPT_ORIGIN, np.full(7, 1e4), point_sampler(1e3)) == 0


def test_invalid_origin(binary):
    with pytest.raises(ValueError):
        cluster(binary, all_edges(binary, True), Vertex(7))
    with pytest.raises(ValueError):
        cluster(binary, all_edges(binary, True), Vertex(0, 4))


def test_restricted_loss_point_costs(binary):
    costs = np.full(7, 10000.0)
    c = cluster(binary, all_edges(binary, True), G.ROOT)
    assert restricted_loss(c, Subset.ALL, costs, point_sampler(1000)) == 98000
    assert restricted_size(c, Subset.CONTRACTS_ONLY) == 7
    c = cluster(binary, all_edges(binary, False), G.ROOT)
    assert restricted_loss(c, Subset.ALL, costs, point_sampler(1000)) == 10000


def small_graphs():
    for d_plus, d_minus, R in itertools.product((1, 2), (0, 1, 2), (1, 2)):
        g = G.deterministic(d_plus, d_minus, R)
        if edge_count(g) <= 10:
            yield g
    yield TreeStarsGraph([-1, 0, 0, 1], [0, 1, 1, 2], [1, 0, 2, 1])


@pytest.mark.parametrize("g", list(small_graphs()), ids=lambda g: f"n{len(g.parent)}u{int(g.users.sum())}")
def test_traversal_matches_path_oracle_on_every_configuration(g):
    n = len(g.parent)
    origins = [Vertex(c) for c in range(n)] + [Vertex(c, s) for c in range(n) for s in range(int(g.users[c]))]
    for bits in itertools.product((False, True), repeat=edge_count(g)):
        edges = EdgeSample(np.array((False,) + bits[: n - 1]), np.array(bits[n - 1 :], dtype=bool))
        for origin in origins:
            c = cluster(g, edges, origin)
            contracts, users = compromised_by_paths(g, edges, origin)
            assert np.array_equal(c.contracts, contracts)
            assert np.array_equal(c.users, users)


def test_opening_an_edge_never_shrinks_the_cluster():
    rng = np.random.default_rng(23)
    for _ in range(300):
        g = G.generate(Pmf([0.3, 0.3, 0.4]), Pmf([0.5, 0.5]), 3, rng)
        e = sample_edges(g, 0.5, 0.5, rng)
        n_edges = edge_count(g)
        if n_edges == 0:
            continue
        k = rng.integers(n_edges)
        contract, user = e.contract_edge_open.copy(), e.user_edge_open.copy()
        if k < len(g.parent) - 1:
            contract[k + 1] = True
        else:
            user[k - len(g.parent) + 1] = True
        more = EdgeSample(contract, user)
        origin = Vertex(int(rng.integers(len(g.parent))))
        a, b = cluster(g, e, origin), cluster(g, more, origin)
        assert np.all(b.contracts >= a.contracts) and np.all(b.users >= a.users)


@pytest.mark.parametrize("r, p", [(1, 0.3), (2, 0.6), (3, 0.45)])
def test_root_reached_with_probability_p_to_the_distance(r, p):
    g = G.deterministic(1, 0, r)
    total = 0.0
    for bits in itertools.product((False, True), repeat=r):
        edges = EdgeSample(np.array((False,) + bits), np.zeros(0, dtype=bool))
        weight = np.prod([p if b else 1 - p for b in bits])
        total += weight * cluster(g, edges, Vertex(r)).contracts[0]
    assert total == pytest.approx(p**r, abs=1e-15)
