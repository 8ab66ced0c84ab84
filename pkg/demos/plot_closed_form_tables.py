"""
Closed-form loss moments on tree-stars graphs
=============================================

A root contract spawns child contracts for two generations, and every
contract carries a star of users. Contagion spreads over contract edges
with probability p and over user edges with probability q.
"""

import numpy as np

from treestars import CostSpec, ModelParams, Pmf, scenario_moments
from treestars.analytic import branching_moments, root_hit_probability

# expected size of the root's open contract cluster, binary tree, two generations
size = branching_moments(2, 0.0, 0.8, 2)
print("cluster size:", size.mean, "variance", size.variance)

# root-origin loss, 4 users per contract, point costs 10000 / 1000
params = ModelParams(
    offspring=Pmf([0, 0, 1]),
    users=Pmf.point(4),
    radius=2,
    p=0.8,
    q=0.8,
    cost_contract=CostSpec.point(10000),
    cost_user=CostSpec.point(1000),
)
for s in (1, 2, 3, 4):
    m = scenario_moments(params, s)
    print(f"scenario {s}: mean {m.mean:10.2f}  sd {m.sd:10.2f}")

# how likely is the root hit from a uniformly chosen outside contract?
for p in np.linspace(0.1, 0.9, 5):
    print(f"p={p:.1f}  P(root hit) = {root_hit_probability(2, 2, p, 0.8)[0]:.4f}")

# whole reference grid, analytic columns only
from treestars.experiment import reproduce_tables, write_csv

print(write_csv(reproduce_tables(3)))
