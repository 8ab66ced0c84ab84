"""Random tree-stars graphs: a rooted contract tree with a user star on every contract.

Users are kept as per-contract counts. A user is addressed by
``Vertex(contract, slot)``; the contract itself is ``Vertex(contract)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .distributions import Pmf, pmf_sample


class Vertex(NamedTuple):
    contract: int
    slot: int | None = None

    @property
    def is_user(self) -> bool:
        return self.slot is not None


ROOT = Vertex(0)


@dataclass(frozen=True, eq=False)
class TreeStarsGraph:
    """One realization of the graph.

    ``parent[i]`` is -1 for the root. Contracts are stored in breadth-first
    order, so every parent index is smaller than its children's.
    """

    parent: np.ndarray
    depth: np.ndarray
    users: np.ndarray

    def __post_init__(self):
        for name in ("parent", "depth", "users"):
            arr = np.asarray(getattr(self, name), dtype=np.int64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n = len(self.parent)
        if n == 0 or self.parent[0] != -1:
            raise ValueError("contract 0 must be the root")
        if len(self.depth) != n or len(self.users) != n:
            raise ValueError("parent, depth and users must have equal length")
        if n > 1:
            par = self.parent[1:]
            if np.any(par < 0) or np.any(par >= np.arange(1, n)):
                raise ValueError("parents must precede children")
            if np.any(self.depth[1:] != self.depth[par] + 1):
                raise ValueError("depth must increase by one along each contract edge")
        if self.depth[0] != 0 or np.any(self.users < 0):
            raise ValueError("invalid depth or user counts")

    @property
    def user_offset(self) -> np.ndarray:
        """Flat index of each contract's first user slot (length n + 1)."""
        return np.concatenate(([0], np.cumsum(self.users)))

    @property
    def radius(self) -> int:
        return int(self.depth.max())

    def user_index(self, v: Vertex) -> int:
        return int(self.user_offset[v.contract]) + int(v.slot)

    def user_owner(self) -> np.ndarray:
        """Owning contract of every flat user slot."""
        return np.repeat(np.arange(len(self.users)), self.users)

    def contains(self, v: Vertex) -> bool:
        if not 0 <= v.contract < len(self.parent):
            return False
        return v.slot is None or 0 <= v.slot < self.users[v.contract]

    def path_to_root(self, contract: int) -> list[int]:
        """Contracts from ``contract`` up to and including the root."""
        path = [contract]
        while self.parent[path[-1]] >= 0:
            path.append(int(self.parent[path[-1]]))
        return path


def generate(offspring: Pmf, users: Pmf, radius: int, rng: np.random.Generator) -> TreeStarsGraph:
    """Breadth-first construction of one tree-stars graph.

    Contracts below depth ``radius`` draw their child counts left to right;
    then every contract draws its user count in index order.
    """
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    parent = [-1]
    depth = [0]
    i = 0
    while i < len(parent):
        if depth[i] < radius:
            for _ in range(pmf_sample(offspring, rng)):
                parent.append(i)
                depth.append(depth[i] + 1)
        i += 1
    counts = [pmf_sample(users, rng) for _ in parent]
    return TreeStarsGraph(np.array(parent), np.array(depth), np.array(counts))


def deterministic(d_plus: int, d_minus: int, radius: int) -> TreeStarsGraph:
    """The graph every draw produces when both pmfs are point masses."""
    return generate(Pmf.point(d_plus), Pmf.point(d_minus), radius, np.random.default_rng(0))


def max_contracts(offspring: Pmf, radius: int) -> int:
    """Upper bound on the number of contracts any draw can have."""
    k = offspring.max_value
    return sum(k**r for r in range(radius + 1))


def contract_count(g: TreeStarsGraph) -> int:
    return len(g.parent)


def user_count(g: TreeStarsGraph) -> int:
    return int(g.users.sum())


def users_of_root(g: TreeStarsGraph) -> list[Vertex]:
    return [Vertex(0, s) for s in range(int(g.users[0]))]


def contracts_excluding_root(g: TreeStarsGraph) -> list[Vertex]:
    return [Vertex(i) for i in range(1, len(g.parent))]


def users_excluding_root_star(g: TreeStarsGraph) -> list[Vertex]:
    return [Vertex(c, s) for c in range(1, len(g.parent)) for s in range(int(g.users[c]))]
