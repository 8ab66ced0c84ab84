"""Bond percolation on a tree-stars graph: edge states, open clusters, restricted sizes and losses."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .graph import TreeStarsGraph, Vertex


class Subset(enum.Enum):
    """Vertex subsets a loss can be restricted to."""

    ALL = "all"
    ALL_EXCEPT_ORIGIN = "all_except_origin"
    ROOT_STAR = "root_star"
    CONTRACTS_ONLY = "contracts_only"


@dataclass(frozen=True, eq=False)
class EdgeSample:
    """Open/closed state of every edge.

    ``contract_edge_open[i]`` is the edge from contract ``i`` to its parent
    (entry 0 is unused and always False); ``user_edge_open`` is indexed by
    flat user slot.
    """

    contract_edge_open: np.ndarray
    user_edge_open: np.ndarray


def sample_edges(g: TreeStarsGraph, p: float, q: float, rng: np.random.Generator) -> EdgeSample:
    n = len(g.parent)
    contract = np.zeros(n, dtype=bool)
    contract[1:] = rng.random(n - 1) < p
    user = rng.random(int(g.users.sum())) < q
    return EdgeSample(contract, user)


@dataclass(frozen=True, eq=False)
class Cluster:
    graph: TreeStarsGraph
    origin: Vertex
    contracts: np.ndarray  # bool per contract
    users: np.ndarray  # bool per flat user slot

    def size(self) -> int:
        return int(self.contracts.sum() + self.users.sum())

    def is_compromised(self, v: Vertex) -> bool:
        if v.is_user:
            return bool(self.users[self.graph.user_index(v)])
        return bool(self.contracts[v.contract])


def cluster(g: TreeStarsGraph, edges: EdgeSample, origin: Vertex) -> Cluster:
    """Open cluster of ``origin``, found by an explicit-stack traversal over open edges."""
    if not g.contains(origin):
        raise ValueError(f"origin {origin} is not a vertex of the graph")
    n = len(g.parent)
    offset = g.user_offset
    contracts = np.zeros(n, dtype=bool)
    users = np.zeros(int(offset[-1]), dtype=bool)

    stack: list[int] = []
    if origin.is_user:
        idx = int(offset[origin.contract]) + origin.slot
        users[idx] = True
        if edges.user_edge_open[idx]:
            stack.append(origin.contract)
    else:
        stack.append(origin.contract)

    children: list[list[int]] = [[] for _ in range(n)]
    for i in range(1, n):
        children[g.parent[i]].append(i)

    while stack:
        c = stack.pop()
        if contracts[c]:
            continue
        contracts[c] = True
        lo, hi = offset[c], offset[c + 1]
        users[lo:hi] |= edges.user_edge_open[lo:hi]
        if c > 0 and edges.contract_edge_open[c] and not contracts[g.parent[c]]:
            stack.append(int(g.parent[c]))
        for child in children[c]:
            if edges.contract_edge_open[child] and not contracts[child]:
                stack.append(child)
    return Cluster(g, origin, contracts, users)


def subset_masks(c: Cluster, subset: Subset) -> tuple[np.ndarray, np.ndarray]:
    """Boolean membership masks (contracts, users) of ``subset``."""
    g = c.graph
    n = len(g.parent)
    n_users = int(g.users.sum())
    contracts = np.ones(n, dtype=bool)
    users = np.ones(n_users, dtype=bool)
    if subset is Subset.ALL:
        pass
    elif subset is Subset.ALL_EXCEPT_ORIGIN:
        if c.origin.is_user:
            users[g.user_index(c.origin)] = False
        else:
            contracts[c.origin.contract] = False
    elif subset is Subset.ROOT_STAR:
        contracts[1:] = False
        users[int(g.users[0]):] = False
    elif subset is Subset.CONTRACTS_ONLY:
        users[:] = False
    else:
        raise ValueError(f"unknown subset {subset!r}")
    return contracts, users


def restricted_size(c: Cluster, subset: Subset) -> int:
    in_c, in_u = subset_masks(c, subset)
    return int((c.contracts & in_c).sum() + (c.users & in_u).sum())


def restricted_loss(
    c: Cluster,
    subset: Subset,
    contract_costs: np.ndarray,
    user_cost_sampler: Callable[[int], np.ndarray],
) -> float:
    """Sum of vertex costs over the compromised part of ``subset``.

    Contracts use their pre-sampled cost; each compromised user draws a fresh
    cost from ``user_cost_sampler(count)``.
    """
    in_c, in_u = subset_masks(c, subset)
    loss = float(np.sum(np.asarray(contract_costs)[c.contracts & in_c]))
    n_users = int((c.users & in_u).sum())
    if n_users:
        loss += float(np.sum(user_cost_sampler(n_users)))
    return loss

