"""Closed-form moments of single-contagion and aggregate losses.

Scenarios 1 and 2 hold for any offspring/user pmfs; scenarios 3 and 4 are
exact only when both pmfs are point masses.
"""
from __future__ import annotations

import math

from .distributions import CostSpec, pmf_mean, pmf_variance
from .model import SCENARIOS, ModelParams, MomentPair, ScenarioWeights

# the closed form cancels catastrophically as m -> 1; the recursion is exact there
CRITICAL_BAND = 1e-2


class UnsupportedAnalyticError(ValueError):
    """No closed form exists for the requested parameters."""


class EmptyOriginSetError(ValueError):
    """The scenario's origin set is empty, so the loss is undefined."""


def branching_moments_recursive(mu_plus: float, sigma2_plus: float, p: float, R: int) -> MomentPair:
    """Mean and variance of the number of individuals in generations 0..R.

    The thinned offspring count has mean ``m = mu_plus * p`` and variance
    ``v = p(1-p) mu_plus + p^2 sigma2_plus``. Splitting at the root gives
    T_R = 1 + sum of Y copies of T_{R-1}, hence
    E T_R = 1 + m E T_{R-1} and Var T_R = m Var T_{R-1} + v (E T_{R-1})^2.
    """
    m = mu_plus * p
    v = p * (1 - p) * mu_plus + p * p * sigma2_plus
    mean, var = 1.0, 0.0
    for _ in range(R):
        mean, var = 1.0 + m * mean, m * var + v * mean * mean
    return MomentPair(mean, var)


def branching_moments(mu_plus: float, sigma2_plus: float, p: float, R: int) -> MomentPair:
    """Size of the open contract cluster of the root, in closed form."""
    m = mu_plus * p
    if abs(1 - m) < CRITICAL_BAND:
        return branching_moments_recursive(mu_plus, sigma2_plus, p, R)
    v = p * (1 - p) * mu_plus + p * p * sigma2_plus
    mean = (1 - m ** (R + 1)) / (1 - m)
    var = v / (1 - m) ** 2 * ((1 - m ** (2 * R + 1)) / (1 - m) - (2 * R + 1) * m**R)
    return MomentPair(mean, max(var, 0.0))


def star_cost_moments(
    q: float,
    mu_minus: float,
    sigma2_minus: float,
    cost_contract: CostSpec,
    cost_user: CostSpec,
) -> MomentPair:
    """Loss of one compromised contract plus its compromised users."""
    mean = cost_contract.mean + q * mu_minus * cost_user.mean
    var = (
        cost_contract.variance
        + (sigma2_minus - mu_minus) * (q * cost_user.mean) ** 2
        + q * mu_minus * cost_user.second_moment
    )
    return MomentPair(mean, var)


def _root_moments(params: ModelParams) -> tuple[MomentPair, MomentPair]:
    size = branching_moments(pmf_mean(params.offspring), pmf_variance(params.offspring), params.p, params.radius)
    star = star_cost_moments(
        params.q, pmf_mean(params.users), pmf_variance(params.users), params.cost_contract, params.cost_user
    )
    return size, star


def scenario1_moments(params: ModelParams) -> MomentPair:
    size, star = _root_moments(params)
    mean = size.mean * star.mean
    var = size.mean * star.variance + size.variance * star.mean**2
    return MomentPair(mean, var)


def scenario2_moments(params: ModelParams) -> MomentPair:
    """Origin is a uniform user of the root; the originator's own cost is excluded.

    Conditioning on the originator's edge: from the root the loss without
    the originator has mean mu_1 - q m and variance sigma_1^2 - Var(C_x zeta_x),
    where Var(C_x zeta_x) = q E(C_-^2) - q^2 m^2 keeps the user-cost variance.
    """
    q = params.q
    s1 = scenario1_moments(params)
    m = params.cost_user.mean
    from_root_mean = s1.mean - q * m
    from_root_var = s1.variance - (q * params.cost_user.second_moment - (q * m) ** 2)
    mean = q * from_root_mean
    var = q * from_root_var + q * (1 - q) * from_root_mean**2
    return MomentPair(mean, max(var, 0.0))


def scenario2_variance_as_printed(params: ModelParams) -> float:
    """The scenario-2 variance with the published parenthesization,
    q sigma_1^2 + q(1-q)[(mu_1 - q m)^2 - (q m)^2]. Kept for comparison only."""
    q = params.q
    s1 = scenario1_moments(params)
    own = q * params.cost_user.mean
    return q * s1.variance + q * (1 - q) * ((s1.mean - own) ** 2 - own**2)


def geometric_sum(a: float, n: int) -> float:
    """sum_{r=0}^{n-1} a^r, by direct summation."""
    total, term = 0.0, 1.0
    for _ in range(n):
        total += term
        term *= a
    return total


def root_hit_probability(d_plus: int, R: int, p: float, q: float) -> tuple[float, float]:
    """Probability that the root is compromised when the origin is a uniform
    non-root contract (first value) or a uniform user of a non-root contract."""
    if d_plus < 1 or R < 1:
        raise EmptyOriginSetError("no contracts outside the root (need d_plus >= 1 and R >= 1)")
    p_plus = p * geometric_sum(d_plus * p, R) / geometric_sum(d_plus, R)
    return p_plus, q * p_plus


def scenario34_moments(params: ModelParams) -> tuple[MomentPair, MomentPair | None]:
    """Moments in scenarios 3 and 4 for a deterministic graph.

    The scenario-4 entry is ``None`` when contracts have no users.
    """
    d_plus = params.offspring.point_value
    d_minus = params.users.point_value
    if d_plus is None or d_minus is None:
        raise UnsupportedAnalyticError("scenarios 3 and 4 have closed forms only for point-mass pmfs")
    star = star_cost_moments(params.q, d_minus, 0.0, params.cost_contract, params.cost_user)
    hit_contract, hit_user = root_hit_probability(d_plus, params.radius, params.p, params.q)

    def moments(hit: float) -> MomentPair:
        return MomentPair(hit * star.mean, hit * ((1 - hit) * star.mean**2 + star.variance))

    return moments(hit_contract), (moments(hit_user) if d_minus > 0 else None)


def scenario_moments(params: ModelParams, scenario: int) -> MomentPair:
    if scenario == 1:
        return scenario1_moments(params)
    if scenario == 2:
        return scenario2_moments(params)
    if scenario in (3, 4):
        s3, s4 = scenario34_moments(params)
        if scenario == 3:
            return s3
        if s4 is None:
            raise EmptyOriginSetError("scenario 4 needs users on non-root contracts")
        return s4
    raise ValueError(f"scenario must be one of {SCENARIOS}, got {scenario!r}")


def aggregate_moments(
    lam: float, t: float, weights: ScenarioWeights, per_scenario: dict[int, MomentPair]
) -> MomentPair:
    """Compound-Poisson mean and variance of the aggregate loss up to time t."""
    rate = lam * t
    mean = var = 0.0
    for s in SCENARIOS:
        w = weights[s]
        if w == 0:
            continue
        m = per_scenario[s]
        mean += rate * w * m.mean
        var += rate * w * (m.variance + m.mean**2)
    return MomentPair(mean, var)


def aggregate_from_params(params: ModelParams) -> MomentPair:
    per = {s: scenario_moments(params, s) for s in params.weights.active()}
    return aggregate_moments(params.lam, params.t, params.weights, per)


def premium(moments: MomentPair, delta: float, principle: str = "expectation") -> float:
    """Loaded premium: ``(1 + delta) E`` or ``E + delta sd``."""
    if delta < 0:
        raise ValueError("delta must be non-negative")
    if principle == "expectation":
        return (1 + delta) * moments.mean
    if principle in ("std-dev", "sd", "standard-deviation"):
        return moments.mean + delta * math.sqrt(moments.variance)
    raise ValueError(f"unknown premium principle {principle!r}")
