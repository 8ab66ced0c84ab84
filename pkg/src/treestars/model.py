"""Parameter containers shared by the analytic and simulation code."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .distributions import CostSpec, ParameterError, Pmf

SCENARIOS = (1, 2, 3, 4)


class MomentPair(NamedTuple):
    mean: float
    variance: float

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)


@dataclass(frozen=True)
class ScenarioWeights:
    """Probabilities Q_1..Q_4 of the four contagion scenarios."""

    q: tuple[float, float, float, float]

    def __init__(self, q: Sequence[float]):
        values = tuple(float(x) for x in q)
        if len(values) != 4:
            raise ParameterError(f"need exactly 4 scenario weights, got {len(values)}")
        if any(not math.isfinite(x) or x < 0 for x in values):
            raise ParameterError(f"scenario weights must be non-negative: {list(values)}")
        total = math.fsum(values)
        if abs(total - 1.0) > 1e-12:
            raise ParameterError(f"scenario weights sum to {total!r}, expected 1")
        object.__setattr__(self, "q", tuple(x / total for x in values))

    def __getitem__(self, scenario: int) -> float:
        return self.q[scenario - 1]

    def active(self) -> list[int]:
        return [s for s in SCENARIOS if self[s] > 0]

    @classmethod
    def only(cls, scenario: int) -> "ScenarioWeights":
        return cls([1.0 if s == scenario else 0.0 for s in SCENARIOS])


def _check_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ParameterError(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class ModelParams:
    """Full model: graph pmfs, radius (generations below the root),
    percolation probabilities, vertex costs, scenario mix and Poisson clock."""

    offspring: Pmf
    users: Pmf
    radius: int
    p: float
    q: float
    cost_contract: CostSpec
    cost_user: CostSpec
    weights: ScenarioWeights = field(default_factory=lambda: ScenarioWeights.only(1))
    lam: float = 1.0
    t: float = 1.0
    delta: float = 0.0

    def __post_init__(self):
        if int(self.radius) != self.radius or self.radius < 0:
            raise ParameterError(f"radius must be a non-negative integer, got {self.radius!r}")
        _check_probability("p", self.p)
        _check_probability("q", self.q)
        if not (self.lam >= 0 and math.isfinite(self.lam)):
            raise ParameterError(f"lambda must be non-negative, got {self.lam!r}")
        if not (self.t >= 0 and math.isfinite(self.t)):
            raise ParameterError(f"t must be non-negative, got {self.t!r}")
        if not self.delta >= 0:
            raise ParameterError(f"loading delta must be non-negative, got {self.delta!r}")

    @property
    def expected_events(self) -> float:
        return self.lam * self.t

    @property
    def is_deterministic_graph(self) -> bool:
        return self.offspring.point_value is not None and self.users.point_value is not None
