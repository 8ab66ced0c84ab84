"""Seeded, parallel Monte Carlo estimation of scenario and aggregate loss moments.

Replications are cut into fixed blocks of ``BLOCK`` consecutive indices.
Each block is accumulated sequentially, and the block accumulators are merged
in index order, so estimates are bit-identical for any worker count.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernel
from .analytic import aggregate_moments
from .distributions import CostSpec, ParameterError, lognormal_params
from .graph import max_contracts
from .model import SCENARIOS, ModelParams, MomentPair

BLOCK = 1 << 15
MAX_CAPACITY = 50_000_000
WORKERS_ENV = "TREESTARS_WORKERS"

MODES = ("per-scenario", "aggregate-direct")


@dataclass
class MomentAccumulator:
    """Streaming mean and sum of squared deviations (Welford, pairwise merge)."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0
    degenerate_count: int = 0

    def accumulate(self, value: float) -> "MomentAccumulator":
        self.count += 1
        delta = value - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (value - self.mean)
        return self

    def merge(self, other: "MomentAccumulator") -> "MomentAccumulator":
        n = self.count + other.count
        if other.count == 0:
            return MomentAccumulator(self.count, self.mean, self.m2, self.degenerate_count + other.degenerate_count)
        if self.count == 0:
            return MomentAccumulator(other.count, other.mean, other.m2, self.degenerate_count + other.degenerate_count)
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / n
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / n
        return MomentAccumulator(n, mean, m2, self.degenerate_count + other.degenerate_count)

    @property
    def variance(self) -> float:
        return self.m2 / (self.count - 1) if self.count > 1 else 0.0

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)

    @property
    def se_mean(self) -> float:
        return self.sd / math.sqrt(self.count) if self.count else float("nan")


@dataclass(frozen=True)
class RunConfig:
    replications: int
    seed: int = 0
    workers: int = 1
    mode: str = "per-scenario"

    def __post_init__(self):
        if self.replications < 1:
            raise ParameterError(f"replications must be >= 1, got {self.replications}")
        if self.workers < 1:
            raise ParameterError(f"workers must be >= 1, got {self.workers}")
        if not 0 <= self.seed < 2**64:
            raise ParameterError(f"seed must fit in 64 unsigned bits, got {self.seed}")
        if self.mode not in MODES:
            raise ParameterError(f"mode must be one of {MODES}, got {self.mode!r}")


def default_workers() -> int:
    value = os.environ.get(WORKERS_ENV)
    if not value:
        return 1
    try:
        return max(int(value), 1)
    except ValueError:
        raise ParameterError(f"{WORKERS_ENV} must be an integer, got {value!r}") from None


class Estimate(NamedTuple):
    mean: float
    sd: float
    se_mean: float
    degenerate_fraction: float
    replications: int


def _cost_args(spec: CostSpec) -> np.ndarray:
    if spec.is_degenerate:
        return np.array([_kernel.POINT, spec.mean, 0.0])
    mu, sigma = lognormal_params(spec.mean, spec.sd)
    return np.array([_kernel.LOGNORMAL, mu, sigma])


def _capacity(params: ModelParams) -> int:
    cap = max_contracts(params.offspring, params.radius)
    if cap > MAX_CAPACITY:
        raise ParameterError(f"trees may reach {cap} contracts; at most {MAX_CAPACITY} are supported")
    return cap


def derive_seed(seed: int, tag: int) -> int:
    """Distinct 64-bit seed for a sub-experiment; SplitMix64 rehashes it before use."""
    return (seed * 0x9E3779B97F4A7C15 + tag * 0xD1B54A32D192ED03 + 1) % 2**64


def _run(params: ModelParams, run: RunConfig, mode: int, scenario: int) -> tuple[MomentAccumulator, int]:
    scenario_cdf = np.cumsum(params.weights.q)
    scenario_cdf[-1] = 1.0
    args = (
        mode,
        scenario,
        scenario_cdf,
        float(params.expected_events),
        params.offspring.cdf,
        params.users.cdf,
        int(params.radius),
        float(params.p),
        float(params.q),
        _cost_args(params.cost_contract),
        _cost_args(params.cost_user),
        _capacity(params),
        np.uint64(run.seed),
    )
    starts = range(0, run.replications, BLOCK)

    def block(start: int):
        return _kernel.run_block(*args, start, min(BLOCK, run.replications - start))

    if run.workers == 1 or len(starts) == 1:
        results = [block(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=run.workers) as pool:
            results = list(pool.map(block, starts))

    total = MomentAccumulator()
    events = 0
    for count, mean, m2, degenerate, n_events in results:
        total = total.merge(MomentAccumulator(count, mean, m2, degenerate))
        events += n_events
    return total, events


def estimate_scenario(params: ModelParams, scenario: int, run: RunConfig) -> Estimate:
    """Monte Carlo mean, sd and standard error of one scenario's loss.

    Contagions with an empty origin set count as zero loss; their share is
    reported as ``degenerate_fraction``.
    """
    if scenario not in SCENARIOS:
        raise ValueError(f"scenario must be one of {SCENARIOS}, got {scenario!r}")
    acc, events = _run(params, run, _kernel.PER_SCENARIO, scenario)
    return Estimate(acc.mean, acc.sd, acc.se_mean, acc.degenerate_count / events, acc.count)


def estimate_aggregate(params: ModelParams, run: RunConfig) -> Estimate:
    """Moments of the aggregate loss up to time t.

    ``per-scenario`` mode simulates each active scenario separately and
    combines the moments with the compound-Poisson identities;
    ``aggregate-direct`` simulates the Poisson number of contagions itself.
    """
    rate = params.expected_events
    if rate == 0:
        return Estimate(0.0, 0.0, 0.0, 0.0, run.replications)
    if run.mode == "aggregate-direct":
        acc, events = _run(params, run, _kernel.AGGREGATE_DIRECT, 0)
        frac = acc.degenerate_count / events if events else 0.0
        return Estimate(acc.mean, acc.sd, acc.se_mean, frac, acc.count)

    estimates = {
        s: estimate_scenario(params, s, RunConfig(run.replications, derive_seed(run.seed, s), run.workers, run.mode))
        for s in params.weights.active()
    }
    return combine_estimates(params, estimates, run.replications)


def combine_estimates(params: ModelParams, estimates: dict[int, Estimate], replications: int) -> Estimate:
    """Aggregate-loss moments from independent per-scenario estimates."""
    rate = params.expected_events
    per: dict[int, MomentPair] = {}
    se2 = 0.0
    degenerate = 0.0
    for s in params.weights.active():
        est = estimates[s]
        per[s] = MomentPair(est.mean, est.sd**2)
        se2 += (rate * params.weights[s] * est.se_mean) ** 2
        degenerate += params.weights[s] * est.degenerate_fraction
    agg = aggregate_moments(params.lam, params.t, params.weights, per)
    return Estimate(agg.mean, agg.sd, math.sqrt(se2), degenerate, replications)
