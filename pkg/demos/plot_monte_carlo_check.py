"""
Monte Carlo against the closed forms
====================================

The compiled engine draws a fresh graph, fresh edges and fresh costs for
every replication. Its estimates should sit within a few standard errors
of the formulas.
"""

from treestars import CostSpec, ModelParams, Pmf, RunConfig, estimate_scenario, scenario_moments

params = ModelParams(
    offspring=Pmf([0, 0.4, 0.6]),
    users=Pmf([0, 0.1, 0.2, 0.3, 0.4]),
    radius=2,
    p=0.8,
    q=0.8,
    cost_contract=CostSpec.lognormal(10000, 5000),
    cost_user=CostSpec.lognormal(1000, 500),
)

run = RunConfig(replications=1_000_000, seed=2024)
for s in (1, 2):
    est = estimate_scenario(params, s, run)
    exact = scenario_moments(params, s)
    z = (est.mean - exact.mean) / est.se_mean
    print(f"scenario {s}: sim {est.mean:9.2f} +- {est.se_mean:5.2f}  formula {exact.mean:9.2f}  ({z:+.2f} SE)")
    print(f"            sd  {est.sd:9.2f}            formula {exact.sd:9.2f}")

# same seed, more threads: identical numbers
a = estimate_scenario(params, 1, RunConfig(100_000, seed=7, workers=1)).mean
b = estimate_scenario(params, 1, RunConfig(100_000, seed=7, workers=4)).mean
print("bit-identical across workers:", a == b)
