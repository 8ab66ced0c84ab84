"""
Exact moments by enumerating every edge configuration
=====================================================

On a small graph all 2^|E| open/closed patterns can be listed. Weighting
each by its probability gives exact loss moments to compare with the
closed forms. This is how the root-user scenario's variance was pinned down.
"""

from treestars import CostSpec, ModelParams, Pmf, scenario_moments
from treestars import graph as G
from treestars.analytic import scenario2_variance_as_printed
from treestars.oracle import edge_count, exact_moments

g = G.deterministic(2, 1, 1)  # root, two children, one user each
print("edges:", edge_count(g))

cc, cu = CostSpec.point(10000), CostSpec.point(1000)
params = ModelParams(Pmf.point(2), Pmf.point(1), 1, 0.3, 0.7, cc, cu)
for s in (1, 2, 3, 4):
    exact = exact_moments(g, 0.3, 0.7, s, cc, cu)
    formula = scenario_moments(params, s)
    print(f"scenario {s}: enumeration {exact.variance:.6f}  formula {formula.variance:.6f}")

# the other parenthesization of the root-user variance is off by q^2 (1-q)^2 E(C)^2
print("alternative form:", scenario2_variance_as_printed(params))
