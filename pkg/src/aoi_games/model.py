"""Domain types and closed-form AoI / cost evaluations.

All platforms share one delivery channel of bandwidth ``mu`` operating as an
LCFS M/M/1 queue with preemption, so platform i's long-run time-average age is

    aoi_i = (total_rate / rate_i) * (1 / total_rate + 1 / mu)

which falls in its own sampling rate and rises in every rival's rate.  Platform
indices are 1-based throughout, matching the convention that platform 1 is the
newcomer with private cost in the Bayesian variant.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Literal, Sequence

from .errors import DomainError

Realization = Literal["high", "low"]


def _check_positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise DomainError(f"{name} must be positive and finite, got {value!r}")
    return value


@dataclass(frozen=True)
class SystemParams:
    """Platform count, shared bandwidth and per-platform unit sampling costs."""

    mu: float
    costs: tuple[float, ...]

    def __init__(self, mu: float, costs: Sequence[float]):
        object.__setattr__(self, "mu", _check_positive("mu", mu))
        object.__setattr__(
            self, "costs", tuple(_check_positive("cost", c) for c in costs)
        )
        if self.n < 1:
            raise DomainError("at least one platform is required")

    @property
    def n(self) -> int:
        return len(self.costs)

    def cost(self, i: int) -> float:
        """Unit sampling cost of platform i (1-based)."""
        if not 1 <= i <= self.n:
            raise DomainError(f"platform index {i} outside 1..{self.n}")
        return self.costs[i - 1]

    def sort_permutation(self) -> tuple[int, ...]:
        """Stable permutation p with costs[p[0]] <= costs[p[1]] <= ... (0-based)."""
        return tuple(sorted(range(self.n), key=lambda k: self.costs[k]))


@dataclass(frozen=True)
class RateProfile:
    """Strictly positive sampling rates, one per platform."""

    rates: tuple[float, ...]

    def __init__(self, rates: Sequence[float]):
        object.__setattr__(
            self, "rates", tuple(_check_positive("rate", r) for r in rates)
        )

    @property
    def n(self) -> int:
        return len(self.rates)

    @property
    def total(self) -> float:
        return sum(self.rates)

    def rate(self, i: int) -> float:
        if not 1 <= i <= self.n:
            raise DomainError(f"platform index {i} outside 1..{self.n}")
        return self.rates[i - 1]

    def rival_total(self, i: int) -> float:
        return self.total - self.rate(i)


@dataclass(frozen=True)
class BayesianSpec:
    """Two-point private cost for platform 1 plus known incumbent costs.

    Platform 1 has cost ``c_high`` with probability ``p_high`` and ``c_low``
    otherwise, each round independently; platforms 2..N have the constant
    ``incumbent_costs``.  The model's ordering assumption (mean cost of
    platform 1 not above any incumbent cost, incumbents nondecreasing) is
    checked and flagged with a warning, not rejected: the cost formulas stay
    evaluable either way.
    """

    c_high: float
    c_low: float
    p_high: float
    incumbent_costs: tuple[float, ...]
    mu: float
    ordering_satisfied: bool = field(compare=False)

    def __init__(
        self,
        c_high: float,
        c_low: float,
        p_high: float,
        incumbent_costs: Sequence[float],
        mu: float,
    ):
        object.__setattr__(self, "c_high", _check_positive("c_high", c_high))
        object.__setattr__(self, "c_low", _check_positive("c_low", c_low))
        if self.c_low >= self.c_high:
            raise DomainError(
                f"c_low must be below c_high, got {c_low!r} >= {c_high!r}"
            )
        p_high = float(p_high)
        if not 0.0 <= p_high <= 1.0:
            raise DomainError(f"p_high must lie in [0, 1], got {p_high!r}")
        object.__setattr__(self, "p_high", p_high)
        object.__setattr__(
            self,
            "incumbent_costs",
            tuple(_check_positive("incumbent cost", c) for c in incumbent_costs),
        )
        if not self.incumbent_costs:
            raise DomainError("at least one incumbent platform is required")
        object.__setattr__(self, "mu", _check_positive("mu", mu))

        chain = (self.mean_cost,) + self.incumbent_costs
        ok = all(a <= b for a, b in zip(chain, chain[1:]))
        object.__setattr__(self, "ordering_satisfied", ok)
        if not ok:
            warnings.warn(
                "cost ordering mean_cost <= c_2 <= ... <= c_N violated; "
                "results remain evaluable but the newcomer no longer has the "
                "smallest mean cost",
                stacklevel=2,
            )

    @property
    def n(self) -> int:
        return len(self.incumbent_costs) + 1

    @property
    def mean_cost(self) -> float:
        return self.p_high * self.c_high + (1.0 - self.p_high) * self.c_low

    def realized_cost(self, realization: Realization) -> float:
        if realization == "high":
            return self.c_high
        if realization == "low":
            return self.c_low
        raise DomainError(f"realization must be 'high' or 'low', got {realization!r}")

    def incumbent_cost(self, i: int) -> float:
        """Cost of incumbent platform i (1-based overall index, i in 2..N)."""
        if not 2 <= i <= self.n:
            raise DomainError(f"incumbent index {i} outside 2..{self.n}")
        return self.incumbent_costs[i - 2]

    def complete_costs(self, cost1: float) -> tuple[float, ...]:
        """Full cost vector with platform 1's cost pinned to ``cost1``."""
        return (float(cost1),) + self.incumbent_costs


@dataclass(frozen=True)
class BayesianRateProfile:
    """Per-realization rate for platform 1 plus constant incumbent rates."""

    rate1_high: float
    rate1_low: float
    incumbent_rates: tuple[float, ...]

    def __init__(
        self, rate1_high: float, rate1_low: float, incumbent_rates: Sequence[float]
    ):
        object.__setattr__(self, "rate1_high", _check_positive("rate1_high", rate1_high))
        object.__setattr__(self, "rate1_low", _check_positive("rate1_low", rate1_low))
        object.__setattr__(
            self,
            "incumbent_rates",
            tuple(_check_positive("incumbent rate", r) for r in incumbent_rates),
        )

    @property
    def n(self) -> int:
        return len(self.incumbent_rates) + 1

    @property
    def incumbent_total(self) -> float:
        return sum(self.incumbent_rates)

    def rate1(self, realization: Realization) -> float:
        if realization == "high":
            return self.rate1_high
        if realization == "low":
            return self.rate1_low
        raise DomainError(f"realization must be 'high' or 'low', got {realization!r}")

    def realized(self, realization: Realization) -> RateProfile:
        return RateProfile((self.rate1(realization),) + self.incumbent_rates)

    def best_response_ordering_holds(self, tol: float = 1e-9) -> bool:
        """Whether rate1_high <= rate1_low, as any best-response pair satisfies."""
        return self.rate1_high <= self.rate1_low + tol


def aoi_from_rates(own_rate: float, rival_total: float, mu: float) -> float:
    """Time-average age given own rate and the rivals' total rate."""
    own_rate = _check_positive("rate", own_rate)
    mu = _check_positive("mu", mu)
    if rival_total < 0.0 or not math.isfinite(rival_total):
        raise DomainError(f"rival total must be nonnegative, got {rival_total!r}")
    total = own_rate + rival_total
    return (total / own_rate) * (1.0 / total + 1.0 / mu)


def aoi(i: int, profile: RateProfile, mu: float) -> float:
    """Time-average age of platform i under ``profile``."""
    return aoi_from_rates(profile.rate(i), profile.rival_total(i), mu)


def cost_from_rates(own_rate: float, rival_total: float, cost: float, mu: float) -> float:
    """One-shot cost: age plus linear sampling expenditure."""
    return aoi_from_rates(own_rate, rival_total, mu) + cost * own_rate


def platform_cost(i: int, profile: RateProfile, params: SystemParams) -> float:
    """Platform i's one-shot cost (age plus sampling spend) under ``profile``."""
    if profile.n != params.n:
        raise DomainError("profile and params disagree on platform count")
    return cost_from_rates(
        profile.rate(i), profile.rival_total(i), params.cost(i), params.mu
    )


def social_cost(profile: RateProfile, params: SystemParams) -> float:
    """Sum of all platforms' one-shot costs."""
    return sum(platform_cost(i, profile, params) for i in range(1, params.n + 1))


def bayesian_platform1_cost(
    realization: Realization, profile: BayesianRateProfile, spec: BayesianSpec
) -> float:
    """Platform 1's one-shot cost under the given cost realization."""
    if profile.n != spec.n:
        raise DomainError("profile and spec disagree on platform count")
    return cost_from_rates(
        profile.rate1(realization),
        profile.incumbent_total,
        spec.realized_cost(realization),
        spec.mu,
    )


def bayesian_platform1_expected_cost(
    profile: BayesianRateProfile, spec: BayesianSpec
) -> float:
    return spec.p_high * bayesian_platform1_cost("high", profile, spec) + (
        1.0 - spec.p_high
    ) * bayesian_platform1_cost("low", profile, spec)


def bayesian_incumbent_cost(
    i: int, profile: BayesianRateProfile, spec: BayesianSpec
) -> float:
    """Incumbent i's expected one-shot cost, averaging over platform 1's cost draw."""
    if profile.n != spec.n:
        raise DomainError("profile and spec disagree on platform count")
    ci = spec.incumbent_cost(i)
    own = profile.incumbent_rates[i - 2]
    others = profile.incumbent_total - own
    age = spec.p_high * aoi_from_rates(own, profile.rate1_high + others, spec.mu) + (
        1.0 - spec.p_high
    ) * aoi_from_rates(own, profile.rate1_low + others, spec.mu)
    return age + ci * own


def bayesian_social_cost(profile: BayesianRateProfile, spec: BayesianSpec) -> float:
    """Expected social cost: platform 1's expected cost plus incumbents' costs."""
    total = bayesian_platform1_expected_cost(profile, spec)
    for i in range(2, spec.n + 1):
        total += bayesian_incumbent_cost(i, profile, spec)
    return total
