"""
Aggregate loss and premiums
===========================

Contagions arrive as a Poisson process with rate lambda; each one picks a
scenario with weights Q. The aggregate loss over [0, t] is compound Poisson.
"""

from treestars import CostSpec, ModelParams, Pmf, RunConfig, ScenarioWeights, aggregate_from_params, premium
from treestars.montecarlo import estimate_aggregate

params = ModelParams(
    offspring=Pmf([0, 0, 1]),
    users=Pmf.point(4),
    radius=2,
    p=0.8,
    q=0.8,
    cost_contract=CostSpec.point(10000),
    cost_user=CostSpec.point(1000),
    weights=ScenarioWeights([0.25, 0.25, 0.25, 0.25]),
    lam=2.0,
    t=1.0,
    delta=0.1,
)

agg = aggregate_from_params(params)
print(f"E(L_t) = {agg.mean:.2f}, sd(L_t) = {agg.sd:.2f}")
print("expectation principle:", round(premium(agg, params.delta, "expectation"), 2))
print("std-dev principle:    ", round(premium(agg, params.delta, "std-dev"), 2))

# simulate the Poisson count directly
est = estimate_aggregate(params, RunConfig(500_000, seed=3, mode="aggregate-direct"))
print(f"direct simulation: {est.mean:.2f} +- {est.se_mean:.2f}, sd {est.sd:.2f}")
