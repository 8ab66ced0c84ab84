"""Degree pmfs and vertex cost distributions."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

_PMF_TOL = 1e-12


class ParameterError(ValueError):
    """Raised when a distribution is built from invalid parameters."""


@dataclass(frozen=True)
class Pmf:
    """Finite-support pmf on {0, 1, ..., len(probs) - 1}.

    Entries summing to one within 1e-12 are renormalized exactly.
    """

    probs: tuple[float, ...]

    def __init__(self, probs: Sequence[float]):
        values = tuple(float(x) for x in probs)
        if not values:
            raise ParameterError("pmf must have at least one entry")
        if any(not math.isfinite(x) or x < 0 for x in values):
            raise ParameterError(f"pmf entries must be finite and non-negative: {list(values)}")
        total = math.fsum(values)
        if abs(total - 1.0) > _PMF_TOL:
            raise ParameterError(f"pmf entries sum to {total!r}, expected 1")
        object.__setattr__(self, "probs", tuple(x / total for x in values))

    def __len__(self) -> int:
        return len(self.probs)

    @property
    def max_value(self) -> int:
        """Largest k with positive probability."""
        return max(k for k, w in enumerate(self.probs) if w > 0)

    @property
    def point_value(self) -> int | None:
        """The support point if the pmf is a point mass, else ``None``."""
        support = [k for k, w in enumerate(self.probs) if w > 0]
        return support[0] if len(support) == 1 else None

    @property
    def cdf(self) -> np.ndarray:
        c = np.cumsum(self.probs)
        c[-1] = 1.0
        return c

    def to_list(self) -> list[float]:
        return list(self.probs)

    @classmethod
    def point(cls, k: int) -> "Pmf":
        probs = [0.0] * (k + 1)
        probs[k] = 1.0
        return cls(probs)


def pmf_mean(pmf: Pmf) -> float:
    return math.fsum(k * w for k, w in enumerate(pmf.probs))


def pmf_variance(pmf: Pmf) -> float:
    mean = pmf_mean(pmf)
    second = math.fsum(k * k * w for k, w in enumerate(pmf.probs))
    return max(second - mean * mean, 0.0)


def pmf_sample(pmf: Pmf, rng: np.random.Generator) -> int:
    """Inverse-CDF draw of a single value."""
    u = rng.random()
    return int(np.searchsorted(pmf.cdf, u, side="right"))


def lognormal_params(mean: float, sd: float) -> tuple[float, float]:
    """Log-scale (mu, sigma) of the lognormal with the given mean and sd."""
    if not mean > 0:
        raise ParameterError(f"lognormal mean must be positive, got {mean!r}")
    if sd < 0:
        raise ParameterError(f"lognormal sd must be non-negative, got {sd!r}")
    s2 = math.log1p((sd / mean) ** 2)
    return math.log(mean) - s2 / 2, math.sqrt(s2)


FAMILIES = ("lognormal", "point")


@dataclass(frozen=True)
class CostSpec:
    """Loss incurred when a vertex is compromised.

    A lognormal with ``sd == 0`` is sampled as a point mass.
    """

    family: str
    mean: float
    sd: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterError(f"unknown cost family {self.family!r}; expected one of {FAMILIES}")
        if not (math.isfinite(self.mean) and math.isfinite(self.sd)):
            raise ParameterError("cost mean and sd must be finite")
        if self.mean < 0 or self.sd < 0:
            raise ParameterError("cost mean and sd must be non-negative")
        if self.family == "point" and self.sd != 0:
            raise ParameterError("point cost must have sd 0")
        if self.family == "lognormal" and self.mean <= 0:
            raise ParameterError("lognormal cost requires mean > 0")

    @classmethod
    def point(cls, value: float) -> "CostSpec":
        return cls("point", float(value), 0.0)

    @classmethod
    def lognormal(cls, mean: float, sd: float) -> "CostSpec":
        return cls("lognormal", float(mean), float(sd))

    @property
    def is_degenerate(self) -> bool:
        return self.family == "point" or self.sd == 0

    @property
    def variance(self) -> float:
        return self.sd * self.sd

    @property
    def second_moment(self) -> float:
        return self.mean * self.mean + self.sd * self.sd

    def to_dict(self) -> dict:
        return {"family": self.family, "mean": self.mean, "sd": self.sd}


def cost_sample(spec: CostSpec, rng: np.random.Generator, size: int | None = None):
    """Draw one cost (``size=None``) or an array of ``size`` independent costs."""
    if spec.is_degenerate:
        if size is None:
            return spec.mean
        return np.full(size, spec.mean)
    mu, sigma = lognormal_params(spec.mean, spec.sd)
    if size is None:
        return float(rng.lognormal(mu, sigma))
    return rng.lognormal(mu, sigma, size)
