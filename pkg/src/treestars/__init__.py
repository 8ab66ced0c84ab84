"""Aggregate loss of bond-percolation contagion on random tree-stars graphs.

Closed-form moments for the four contagion scenarios, an exact enumeration
oracle for small graphs, and a seeded parallel Monte Carlo engine.
"""
from .analytic import (
    aggregate_from_params,
    aggregate_moments,
    branching_moments,
    branching_moments_recursive,
    premium,
    root_hit_probability,
    scenario1_moments,
    scenario2_moments,
    scenario34_moments,
    scenario_moments,
    star_cost_moments,
)
from .distributions import CostSpec, ParameterError, Pmf, lognormal_params, pmf_mean, pmf_variance
from .graph import TreeStarsGraph, Vertex, generate
from .model import ModelParams, MomentPair, ScenarioWeights
from .montecarlo import MomentAccumulator, RunConfig, estimate_aggregate, estimate_scenario

__version__ = "0.1.0"
