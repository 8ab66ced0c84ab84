"""Exact loss moments on a fixed small graph by enumerating all edge configurations.

Independent of the traversal in ``percolation``: a vertex is compromised iff
every edge on its unique tree path to the origin is open, and that path is
the symmetric difference of the two root paths.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from .distributions import CostSpec
from .graph import TreeStarsGraph, Vertex
from .model import MomentPair
from .percolation import EdgeSample, Subset
from .scenarios import SCENARIO_SUBSET, origin_set

MAX_EDGES = 20


def edge_count(g: TreeStarsGraph) -> int:
    return len(g.parent) - 1 + int(g.users.sum())


def _root_path_masks(g: TreeStarsGraph) -> tuple[np.ndarray, np.ndarray]:
    """Edge-membership of each vertex's path to the root.

    Edge k < n-1 is the contract edge of contract k+1; edge n-1+u is user slot u.
    """
    n = len(g.parent)
    n_edges = edge_count(g)
    contract_paths = np.zeros((n, n_edges), dtype=bool)
    for c in range(1, n):
        contract_paths[c] = contract_paths[g.parent[c]]
        contract_paths[c, c - 1] = True
    owner = g.user_owner()
    user_paths = contract_paths[owner].copy()
    user_paths[np.arange(len(owner)), n - 1 + np.arange(len(owner))] = True
    return contract_paths, user_paths


def compromised_by_paths(g: TreeStarsGraph, edges: EdgeSample, origin: Vertex) -> tuple[np.ndarray, np.ndarray]:
    """Compromised (contracts, users) masks for one configuration."""
    bits = np.concatenate((edges.contract_edge_open[1:], edges.user_edge_open))
    cp, up = _root_path_masks(g)
    o = up[g.user_index(origin)] if origin.is_user else cp[origin.contract]
    contracts = np.array([bits[m ^ o].all() for m in cp])
    users = np.array([bits[m ^ o].all() for m in up], dtype=bool)
    return contracts, users


def _subset_masks(g: TreeStarsGraph, subset: Subset, origin: Vertex) -> tuple[np.ndarray, np.ndarray]:
    n, n_users = len(g.parent), int(g.users.sum())
    in_c = np.ones(n, dtype=bool)
    in_u = np.ones(n_users, dtype=bool)
    if subset is Subset.ALL_EXCEPT_ORIGIN:
        if origin.is_user:
            in_u[g.user_index(origin)] = False
        else:
            in_c[origin.contract] = False
    elif subset is Subset.ROOT_STAR:
        in_c[1:] = False
        in_u[int(g.users[0]):] = False
    elif subset is Subset.CONTRACTS_ONLY:
        in_u[:] = False
    return in_c, in_u


def exact_moments(
    g: TreeStarsGraph,
    p: float,
    q: float,
    scenario: int,
    cost_contract: CostSpec,
    cost_user: CostSpec,
) -> MomentPair:
    """Exact mean and variance of the scenario loss on the fixed graph ``g``.

    Sums over every origin in the scenario's origin set (uniform weight) and
    every one of the 2^|E| edge configurations; vertex costs enter through
    their first two moments.
    """
    n_edges = edge_count(g)
    if n_edges > MAX_EDGES:
        raise ValueError(f"{n_edges} edges is too many to enumerate (max {MAX_EDGES})")
    origins = origin_set(g, scenario)
    if not origins:
        raise ValueError(f"scenario {scenario} has no origin on this graph")
    n = len(g.parent)
    bits = np.array(list(itertools.product((False, True), repeat=n_edges)), dtype=bool).reshape(-1, n_edges)
    prob_open = np.array([p] * (n - 1) + [q] * (n_edges - n + 1))
    weights = np.prod(np.where(bits, prob_open, 1 - prob_open), axis=1)

    cp, up = _root_path_masks(g)
    m_c, v_c = cost_contract.mean, cost_contract.variance
    m_u, v_u = cost_user.mean, cost_user.variance
    first = []
    second = []
    for origin in origins:
        o = up[g.user_index(origin)] if origin.is_user else cp[origin.contract]
        in_c, in_u = _subset_masks(g, SCENARIO_SUBSET[scenario], origin)
        k_c = np.zeros(len(bits))
        k_u = np.zeros(len(bits))
        for c in np.flatnonzero(in_c):
            k_c += np.all(bits[:, cp[c] ^ o], axis=1)
        for u in np.flatnonzero(in_u):
            k_u += np.all(bits[:, up[u] ^ o], axis=1)
        cond_mean = k_c * m_c + k_u * m_u
        cond_var = k_c * v_c + k_u * v_u
        first.append(math.fsum(weights * cond_mean))
        second.append(math.fsum(weights * (cond_var + cond_mean**2)))
    mean = math.fsum(first) / len(origins)
    var = math.fsum(second) / len(origins) - mean * mean
    return MomentPair(mean, var)
