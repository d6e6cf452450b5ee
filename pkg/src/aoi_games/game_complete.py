"""Complete-information one-shot game: equilibrium, optimum, PoA, statics.

The first-order systems solved here are, per platform i with rival total
r_i = sum_j rate_j - rate_i:

    equilibrium:    cost_i = (1 + r_i/mu) / rate_i**2
    social optimum: cost_i + (1/mu) * sum_{j != i} 1/rate_j
                           = (1 + r_i/mu) / rate_i**2

Both are coordinatewise best-response maps, monotone increasing with a unique
positive fixed point, so damped Picard iteration from the zero-rival best
response converges from below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, DomainError
from .model import RateProfile, SystemParams, platform_cost, social_cost
from .solvers import DEFAULT_OPTIONS, SolveOptions, solve_fixed_point


@dataclass(frozen=True)
class EquilibriumResult:
    profile: RateProfile
    per_platform_costs: tuple[float, ...]
    social: float
    residuals: tuple[float, ...]


def best_response(rival_total: float, cost: float, mu: float) -> float:
    """One-shot cost minimizer against a fixed rival total rate."""
    if rival_total < 0.0 or not math.isfinite(rival_total):
        raise DomainError(f"rival total must be nonnegative, got {rival_total!r}")
    if cost <= 0.0 or mu <= 0.0:
        raise DomainError("cost and mu must be positive")
    return math.sqrt((1.0 + rival_total / mu) / cost)


def _nash_map(params: SystemParams):
    c = np.asarray(params.costs)
    mu = params.mu

    def g(lam: np.ndarray) -> np.ndarray:
        rival = lam.sum() - lam
        return np.sqrt((1.0 + rival / mu) / c)

    return g

def _optimum_map(params: SystemParams):
    c = np.asarray(params.costs)
    mu = params.mu

    def g(lam: np.ndarray) -> np.ndarray:
        rival = lam.sum() - lam
        recip = (1.0 / lam).sum() - 1.0 / lam
        return np.sqrt((1.0 + rival / mu) / (c + recip / mu))

    return g


def _start(params: SystemParams) -> np.ndarray:
    # Best response to zero rivals: below the fixed point of either map.
    return 1.0 / np.sqrt(np.asarray(params.costs))


def nash_residuals(rates: np.ndarray, params: SystemParams) -> np.ndarray:
    lam = np.asarray(rates, dtype=float)
    rival = lam.sum() - lam
    return np.asarray(params.costs) - (1.0 + rival / params.mu) / lam**2


def optimum_residuals(rates: np.ndarray, params: SystemParams) -> np.ndarray:
    lam = np.asarray(rates, dtype=float)
    rival = lam.sum() - lam
    recip = (1.0 / lam).sum() - 1.0 / lam
    return (
        np.asarray(params.costs)
        + recip / params.mu
        - (1.0 + rival / params.mu) / lam**2
    )


def _package(rates: np.ndarray, params: SystemParams, residuals: np.ndarray) -> EquilibriumResult:
    profile = RateProfile(rates)
    costs = tuple(platform_cost(i, profile, params) for i in range(1, params.n + 1))
    return EquilibriumResult(
        profile=profile,
        per_platform_costs=costs,
        social=sum(costs),
        residuals=tuple(abs(float(r)) for r in residuals),
    )


def nash_equilibrium(
    params: SystemParams, opts: SolveOptions = DEFAULT_OPTIONS
) -> EquilibriumResult:
    """Competition equilibrium rates; raises DivergenceError in the blow-up regime."""
    rates = solve_fixed_point(_nash_map(params), _start(params), opts)
    return _package(rates, params, nash_residuals(rates, params))


def social_optimum(
    params: SystemParams, opts: SolveOptions = DEFAULT_OPTIONS
) -> EquilibriumResult:
    """Socially optimal rates minimizing the summed cost."""
    rates = solve_fixed_point(_optimum_map(params), _start(params), opts)
    return _package(rates, params, optimum_residuals(rates, params))


def poa_ratio(params: SystemParams, opts: SolveOptions = DEFAULT_OPTIONS) -> float:
    """Equilibrium social cost over optimal social cost; inf when unbounded."""
    optimum = social_optimum(params, opts)
    try:
        nash = nash_equilibrium(params, opts)
    except DivergenceError:
        return math.inf
    return nash.social / optimum.social


_EXPECTED_SIGNS = {
    "own_cost": -1,
    "rival_cost": -1,
    "bandwidth": -1,
    "rival_rate": +1,
}


@dataclass(frozen=True)
class StaticsReport:
    perturbation: str
    platform: int
    observed_sign: int
    expected_sign: int
    rate_change: float

    @property
    def matches(self) -> bool:
        return self.observed_sign == self.expected_sign


def comparative_statics_check(
    params: SystemParams,
    perturbation: str,
    i: int = 1,
    j: int = 2,
    step: float = 1e-3,
    opts: SolveOptions = DEFAULT_OPTIONS,
) -> StaticsReport:
    """Sign of the equilibrium rate change of platform i under a small bump.

    ``own_cost`` / ``rival_cost`` / ``bandwidth`` raise cost_i / cost_j / mu by
    ``step``; ``rival_rate`` lowers cost_j so that rate_j rises, probing the
    co-movement of rate_i with rate_j.
    """
    if perturbation not in _EXPECTED_SIGNS:
        raise DomainError(f"unknown perturbation {perturbation!r}")
    if perturbation in ("rival_cost", "rival_rate") and (i == j or not 1 <= j <= params.n):
        raise DomainError("rival index j must differ from i and be in range")
    base = nash_equilibrium(params, opts).profile.rate(i)

    costs = list(params.costs)
    mu = params.mu
    if perturbation == "own_cost":
        costs[i - 1] += step
    elif perturbation == "rival_cost":
        costs[j - 1] += step
    elif perturbation == "bandwidth":
        mu += step
    else:
        costs[j - 1] -= step
        if costs[j - 1] <= 0.0:
            raise DomainError("step too large: rival cost would become non-positive")
    bumped = nash_equilibrium(SystemParams(mu, costs), opts).profile.rate(i)

    change = bumped - base
    observed = 0 if change == 0.0 else int(math.copysign(1, change))
    return StaticsReport(
        perturbation=perturbation,
        platform=i,
        observed_sign=observed,
        expected_sign=_EXPECTED_SIGNS[perturbation],
        rate_change=change,
    )
