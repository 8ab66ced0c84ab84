"""The four contagion scenarios and the single-contagion loss pipeline.

This is the readable reference path; ``montecarlo`` runs a compiled
equivalent of :func:`single_contagion` for large replication counts.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import graph as G
from .distributions import cost_sample
from .graph import TreeStarsGraph, Vertex
from .model import SCENARIOS, ModelParams, ScenarioWeights
from .percolation import Subset, cluster, restricted_loss, sample_edges

SCENARIO_SUBSET = {
    1: Subset.ALL,
    2: Subset.ALL_EXCEPT_ORIGIN,
    3: Subset.ROOT_STAR,
    4: Subset.ROOT_STAR,
}


@dataclass(frozen=True)
class ContagionOutcome:
    loss: float
    scenario: int
    degenerate: bool = False


def origin_set(g: TreeStarsGraph, scenario: int) -> list[Vertex]:
    if scenario == 1:
        return [G.ROOT]
    if scenario == 2:
        return G.users_of_root(g)
    if scenario == 3:
        return G.contracts_excluding_root(g)
    if scenario == 4:
        return G.users_excluding_root_star(g)
    raise ValueError(f"scenario must be one of {SCENARIOS}, got {scenario!r}")


def origin_and_subset(g: TreeStarsGraph, scenario: int, rng: np.random.Generator) -> tuple[Vertex | None, Subset]:
    """Uniform origin from the scenario's origin set (``None`` if it is empty)."""
    candidates = origin_set(g, scenario)
    subset = SCENARIO_SUBSET[scenario]
    if not candidates:
        return None, subset
    return candidates[int(rng.integers(len(candidates)))], subset


def draw_scenario(weights: ScenarioWeights, rng: np.random.Generator) -> int:
    return int(rng.choice(SCENARIOS, p=weights.q))


def single_contagion(params: ModelParams, scenario: int, rng: np.random.Generator) -> ContagionOutcome:
    g = G.generate(params.offspring, params.users, params.radius, rng)
    contract_costs = cost_sample(params.cost_contract, rng, len(g.parent))
    edges = sample_edges(g, params.p, params.q, rng)
    origin, subset = origin_and_subset(g, scenario, rng)
    if origin is None:
        return ContagionOutcome(0.0, scenario, degenerate=True)
    c = cluster(g, edges, origin)
    loss = restricted_loss(c, subset, contract_costs, lambda n: cost_sample(params.cost_user, rng, n))
    return ContagionOutcome(loss, scenario)


def aggregate_loss(params: ModelParams, rng: np.random.Generator) -> float:
    """One draw of the aggregate loss: a Poisson number of independent contagions."""
    total = 0.0
    for _ in range(rng.poisson(params.expected_events)):
        total += single_contagion(params, draw_scenario(params.weights, rng), rng).loss
    return total
