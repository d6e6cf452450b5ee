"""Bayesian one-shot game with platform 1's private two-point cost.

State vector layout for the fixed-point solves: [rate1_high, rate1_low,
incumbent rates...].  Platform 1 best-responds per realization to the
incumbents' total; incumbents best-respond to the probability-weighted mix of
platform 1's two rates.  The social-optimum variant adds each platform's
externality charge to its effective cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, DomainError
from .game_complete import EquilibriumResult, nash_equilibrium
from .model import (
    BayesianRateProfile,
    BayesianSpec,
    SystemParams,
    bayesian_incumbent_cost,
    bayesian_platform1_cost,
    bayesian_social_cost,
)
from .solvers import DEFAULT_OPTIONS, SolveOptions, solve_fixed_point, solve_scalar_bracketed


@dataclass(frozen=True)
class BayesianEquilibriumResult:
    profile: BayesianRateProfile
    platform1_costs: tuple[float, float, float]  # (high, low, expected)
    incumbent_costs: tuple[float, ...]
    social: float
    residuals: tuple[float, ...]  # (high eq, low eq, incumbent eqs...)


def _start(spec: BayesianSpec) -> np.ndarray:
    return np.concatenate(
        (
            [1.0 / math.sqrt(spec.c_high), 1.0 / math.sqrt(spec.c_low)],
            1.0 / np.sqrt(np.asarray(spec.incumbent_costs)),
        )
    )


def _nash_map(spec: BayesianSpec):
    c_inc = np.asarray(spec.incumbent_costs)
    mu, p = spec.mu, spec.p_high

    def g(x: np.ndarray) -> np.ndarray:
        inc = x[2:]
        R = inc.sum()
        a1 = 1.0 + R / mu
        lam_h = math.sqrt(a1 / spec.c_high)
        lam_l = math.sqrt(a1 / spec.c_low)
        mix = p * lam_h + (1.0 - p) * lam_l
        rival = mix + (R - inc)
        new_inc = np.sqrt((1.0 + rival / mu) / c_inc)
        return np.concatenate(([lam_h, lam_l], new_inc))

    return g


def _optimum_map(spec: BayesianSpec):
    c_inc = np.asarray(spec.incumbent_costs)
    mu, p = spec.mu, spec.p_high

    def g(x: np.ndarray) -> np.ndarray:
        inc = x[2:]
        R = inc.sum()
        s_recip = (1.0 / inc).sum()
        a1 = 1.0 + R / mu
        lam_h = math.sqrt(a1 / (spec.c_high + s_recip / mu))
        lam_l = math.sqrt(a1 / (spec.c_low + s_recip / mu))
        mix = p * lam_h + (1.0 - p) * lam_l
        mix_recip = p / lam_h + (1.0 - p) / lam_l
        rival = mix + (R - inc)
        charge = mix_recip + (s_recip - 1.0 / inc)
        new_inc = np.sqrt((1.0 + rival / mu) / (c_inc + charge / mu))
        return np.concatenate(([lam_h, lam_l], new_inc))

    return g


def nash_residuals(x: np.ndarray, spec: BayesianSpec) -> np.ndarray:
    lam_h, lam_l, inc = x[0], x[1], x[2:]
    mu, p = spec.mu, spec.p_high
    R = inc.sum()
    a1 = 1.0 + R / mu
    res_h = spec.c_high - a1 / lam_h**2
    res_l = spec.c_low - a1 / lam_l**2
    rival_h = lam_h + R - inc
    rival_l = lam_l + R - inc
    res_inc = (
        np.asarray(spec.incumbent_costs)
        - p * (1.0 + rival_h / mu) / inc**2
        - (1.0 - p) * (1.0 + rival_l / mu) / inc**2
    )
    return np.concatenate(([res_h, res_l], res_inc))


def optimum_residuals(x: np.ndarray, spec: BayesianSpec) -> np.ndarray:
    lam_h, lam_l, inc = x[0], x[1], x[2:]
    mu, p = spec.mu, spec.p_high
    R = inc.sum()
    s_recip = (1.0 / inc).sum()
    a1 = 1.0 + R / mu
    res_h = spec.c_high + s_recip / mu - a1 / lam_h**2
    res_l = spec.c_low + s_recip / mu - a1 / lam_l**2
    rival_h = lam_h + R - inc
    rival_l = lam_l + R - inc
    charge = p / lam_h + (1.0 - p) / lam_l + (s_recip - 1.0 / inc)
    res_inc = (
        np.asarray(spec.incumbent_costs)
        + charge / mu
        - (p * (1.0 + rival_h / mu) + (1.0 - p) * (1.0 + rival_l / mu)) / inc**2
    )
    return np.concatenate(([res_h, res_l], res_inc))


def _package(x: np.ndarray, spec: BayesianSpec, residuals: np.ndarray) -> BayesianEquilibriumResult:
    profile = BayesianRateProfile(x[0], x[1], x[2:])
    hi = bayesian_platform1_cost("high", profile, spec)
    lo = bayesian_platform1_cost("low", profile, spec)
    expected = spec.p_high * hi + (1.0 - spec.p_high) * lo
    inc_costs = tuple(
        bayesian_incumbent_cost(i, profile, spec) for i in range(2, spec.n + 1)
    )
    return BayesianEquilibriumResult(
        profile=profile,
        platform1_costs=(hi, lo, expected),
        incumbent_costs=inc_costs,
        social=bayesian_social_cost(profile, spec),
        residuals=tuple(abs(float(r)) for r in residuals),
    )


def bayesian_nash(
    spec: BayesianSpec, opts: SolveOptions = DEFAULT_OPTIONS
) -> BayesianEquilibriumResult:
    """Bayesian competition equilibrium.

    The per-realization rates of platform 1 share the same rival total, so
    rate1_high / rate1_low equals sqrt(c_low / c_high) identically.
    """
    x = solve_fixed_point(_nash_map(spec), _start(spec), opts)
    return _package(x, spec, nash_residuals(x, spec))


def bayesian_social_optimum(
    spec: BayesianSpec, opts: SolveOptions = DEFAULT_OPTIONS
) -> BayesianEquilibriumResult:
    x = solve_fixed_point(_optimum_map(spec), _start(spec), opts)
    return _package(x, spec, optimum_residuals(x, spec))


def per_realization_benchmark(
    spec: BayesianSpec, opts: SolveOptions = DEFAULT_OPTIONS
) -> tuple[EquilibriumResult, EquilibriumResult]:
    """Complete-information equilibria played per realization (high, low).

    These are the benchmarks the information-advantage comparison is made
    against: everyone observes platform 1's draw and plays the one-shot
    equilibrium of the realized complete game.
    """
    high = nash_equilibrium(SystemParams(spec.mu, spec.complete_costs(spec.c_high)), opts)
    low = nash_equilibrium(SystemParams(spec.mu, spec.complete_costs(spec.c_low)), opts)
    return high, low


def bayesian_poa_ratio(
    spec: BayesianSpec, opts: SolveOptions = DEFAULT_OPTIONS
) -> float:
    """Expected social cost at equilibrium over the optimum; inf when unbounded."""
    optimum = bayesian_social_optimum(spec, opts)
    try:
        nash = bayesian_nash(spec, opts)
    except DivergenceError:
        return math.inf
    return nash.social / optimum.social


@dataclass(frozen=True)
class InfoAdvantageReport:
    high_cost_incomplete: float     # platform 1's one-shot cost at c_high, Bayesian play
    high_cost_complete: float       # same realization under complete information
    high_realization_worse: bool    # incomplete >= complete
    average_incomplete: float       # expectation at the spec's p_high
    average_complete: float
    worse_on_average: bool
    p_threshold: float              # p_high above which the average flips against platform 1
    threshold_residual: float


def info_advantage_report(
    spec: BayesianSpec, opts: SolveOptions = DEFAULT_OPTIONS
) -> InfoAdvantageReport:
    """Does hiding the cost help platform 1?  One-shot and average comparison.

    The probability threshold solves p = rhs(p) with

        rhs(p) = (pi_low_complete - pi_low_incomplete(p)) /
                 (pi_low_complete - pi_low_incomplete(p)
                  + pi_high_incomplete(p) - pi_high_complete),

    located by scanning for the interior sign change of p - rhs(p) (p = 0 is
    a degenerate root where both averages coincide).
    """
    bench_high, bench_low = per_realization_benchmark(spec, opts)
    high_com = bench_high.per_platform_costs[0]
    low_com = bench_low.per_platform_costs[0]

    def rhs(p: float) -> float:
        probe = BayesianSpec(spec.c_high, spec.c_low, p, spec.incumbent_costs, spec.mu)
        nash = bayesian_nash(probe, opts)
        high_inc, low_inc, _ = nash.platform1_costs
        num = low_com - low_inc
        den = num + (high_inc - high_com)
        if den <= 0.0:
            raise DomainError("threshold ratio denominator must be positive")
        return num / den

    def gap(p: float) -> float:
        return p - rhs(p)

    grid = np.linspace(0.01, 0.99, 50)
    vals = [gap(p) for p in grid]
    p_threshold = None
    if vals[0] >= 0.0:
        p_threshold = 0.0
    else:
        for k in range(len(grid) - 1):
            if vals[k] < 0.0 <= vals[k + 1]:
                p_threshold = solve_scalar_bracketed(gap, grid[k], grid[k + 1], opts)
                break
        if p_threshold is None:
            p_threshold = 1.0
    residual = abs(gap(p_threshold)) if 0.0 < p_threshold < 1.0 else 0.0

    nash = bayesian_nash(spec, opts)
    high_inc, low_inc, _ = nash.platform1_costs
    p = spec.p_high
    avg_inc = p * high_inc + (1.0 - p) * low_inc
    avg_com = p * high_com + (1.0 - p) * low_com
    return InfoAdvantageReport(
        high_cost_incomplete=high_inc,
        high_cost_complete=high_com,
        high_realization_worse=high_inc >= high_com - 1e-12,
        average_incomplete=avg_inc,
        average_complete=avg_com,
        worse_on_average=avg_inc >= avg_com,
        p_threshold=float(p_threshold),
        threshold_residual=float(residual),
    )
