"""Approximate trigger mechanism under incomplete information.

Platform 1 is recommended a single rate regardless of its cost draw, built
from its mean cost, so observing its sampling reveals nothing exploitable.
The approximate optimum is therefore the complete-information social optimum
with platform 1's cost replaced by its mean.

No-deviation conditions, with A = 1 + (incumbent total)/mu at the plan,
A_star = 1 + (incumbent total)/mu at the Bayesian equilibrium, and
w = p_high*sqrt(c_high) + (1-p_high)*sqrt(c_low):

  platform 1, draw c in {c_low, c_high}:
      (delta*mean_cost + (1-delta)*c) * x^2 - 2*M_c*x + A <= 0,
      M_c = delta*sqrt(A_star)*w + (1-delta)*sqrt(A*c)
  incumbent i against plan rival total r (A_i = 1 + r/mu):
      c_i*x^2 - 2*M_i*x + A_i <= 0,
      M_i = sqrt(c_i)*(delta*sqrt(punish A_i) + (1-delta)*sqrt(A_i))

Platform 1's recommended rate is the larger of the two smaller roots, which
satisfies both draws' conditions only while the two feasible intervals
overlap.  They always separate as delta -> 0 (the one-shot game has no
single-rate equilibrium for platform 1), in which case the plan degenerates
to the Bayesian equilibrium itself, played per realization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .game_bayesian import bayesian_nash, bayesian_social_optimum
from .game_complete import social_optimum
from .model import (
    BayesianRateProfile,
    BayesianSpec,
    Realization,
    RateProfile,
    SystemParams,
    bayesian_social_cost,
    cost_from_rates,
)
from .solvers import DEFAULT_OPTIONS, SolveOptions, solve_fixed_point

_MARGIN_TOL = 1e-9


@dataclass(frozen=True)
class ApproxThresholds:
    platform1_low: float            # no-deviation bound when the draw is c_low
    platform1_high: float           # and when it is c_high
    incumbents: tuple[float, ...]   # platforms 2..N
    platform1_binding: float        # max over the realizable branches

    @property
    def overall_max(self) -> float:
        return max((self.platform1_binding,) + self.incumbents)


@dataclass(frozen=True)
class ApproxCooperationPlan:
    delta: float
    regime: str
    profile: RateProfile                 # single rate for platform 1, then incumbents
    thresholds: ApproxThresholds
    reference_hat: RateProfile           # approximate optimum
    reference_nash: BayesianRateProfile  # punishment profile
    binding: tuple[int, ...]
    binding_realization: Realization | None  # branch pinning platform 1's rate
    degenerate: bool                     # fell back to per-realization equilibrium play


def _realizable(spec: BayesianSpec) -> tuple[Realization, ...]:
    if spec.p_high == 0.0:
        return ("low",)
    if spec.p_high == 1.0:
        return ("high",)
    return ("high", "low")


def approx_social_optimum(
    spec: BayesianSpec, opts: SolveOptions = DEFAULT_OPTIONS
) -> RateProfile:
    """Rates minimizing social cost with platform 1 held to one mean-cost rate."""
    params = SystemParams(spec.mu, spec.complete_costs(spec.mean_cost))
    return social_optimum(params, opts).profile


def _mix_weight(spec: BayesianSpec) -> float:
    return spec.p_high * math.sqrt(spec.c_high) + (1.0 - spec.p_high) * math.sqrt(
        spec.c_low
    )


def _nash_punishment_costs(spec: BayesianSpec, nash: BayesianRateProfile):
    """Expected per-round punishment cost of platform 1 and each incumbent."""
    mu, p = spec.mu, spec.p_high
    R = nash.incumbent_total
    a_star = 1.0 + R / mu
    p1 = 2.0 * math.sqrt(a_star) * _mix_weight(spec) + 1.0 / mu
    inc = []
    for i in range(2, spec.n + 1):
        own = nash.incumbent_rates[i - 2]
        mix = p * nash.rate1_high + (1.0 - p) * nash.rate1_low
        a_i = 1.0 + (mix + R - own) / mu
        inc.append(2.0 * math.sqrt(a_i * spec.incumbent_cost(i)) + 1.0 / mu)
    return p1, tuple(inc)


def platform1_margin(
    spec: BayesianSpec,
    rates: np.ndarray,
    realization: Realization,
    nash: BayesianRateProfile,
    delta: float,
) -> float:
    """deviate - comply for platform 1 under the given draw at a single-rate plan."""
    mu = spec.mu
    c = spec.realized_cost(realization)
    a = 1.0 + float(rates[1:].sum()) / mu
    punish1, _ = _nash_punishment_costs(spec, nash)
    deviate = 2.0 * math.sqrt(a * c) + 1.0 / mu + delta / (1.0 - delta) * punish1
    x = float(rates[0])
    now = a / x + c * x + 1.0 / mu
    later = a / x + spec.mean_cost * x + 1.0 / mu
    return deviate - (now + delta / (1.0 - delta) * later)


def incumbent_margin(
    spec: BayesianSpec,
    rates: np.ndarray,
    i: int,
    nash: BayesianRateProfile,
    delta: float,
) -> float:
    """deviate - comply for incumbent i at a single-rate plan."""
    mu = spec.mu
    ci = spec.incumbent_cost(i)
    own = float(rates[i - 1])
    rival = float(rates.sum()) - own
    a = 1.0 + rival / mu
    _, punish_inc = _nash_punishment_costs(spec, nash)
    deviate = 2.0 * math.sqrt(a * ci) + 1.0 / mu + delta / (1.0 - delta) * punish_inc[i - 2]
    comply = (a / own + ci * own + 1.0 / mu) / (1.0 - delta)
    return deviate - comply


def _threshold_platform1(
    spec: BayesianSpec,
    hat: np.ndarray,
    nash: BayesianRateProfile,
    realization: Realization,
) -> float:
    """Closed-form no-deviation bound for platform 1 at the approximate optimum."""
    mu = spec.mu
    c = spec.realized_cost(realization)
    a_hat = 1.0 + float(hat[1:].sum()) / mu
    a_star = 1.0 + nash.incumbent_total / mu
    lam1 = float(hat[0])
    num = c * lam1 - 2.0 * math.sqrt(a_hat * c) + a_hat / lam1
    den = (
        (c - spec.mean_cost) * lam1
        + 2.0 * math.sqrt(a_star) * _mix_weight(spec)
        - 2.0 * math.sqrt(a_hat * c)
    )
    if den <= 0.0:
        # Punishment never deters this draw at the approximate optimum, at
        # any discount factor: the constraint binds everywhere.
        return math.inf
    return num / den


def _threshold_incumbent(
    spec: BayesianSpec, hat: np.ndarray, nash: BayesianRateProfile, i: int
) -> float:
    mu = spec.mu
    ci = spec.incumbent_cost(i)
    own = float(hat[i - 1])
    a_hat = 1.0 + (float(hat.sum()) - own) / mu
    mix = spec.p_high * nash.rate1_high + (1.0 - spec.p_high) * nash.rate1_low
    a_bar = 1.0 + (mix + nash.incumbent_total - nash.incumbent_rates[i - 2]) / mu
    num = a_hat / own + ci * own - 2.0 * math.sqrt(a_hat * ci)
    den = 2.0 * math.sqrt(a_bar * ci) - 2.0 * math.sqrt(a_hat * ci)
    if den <= 0.0:
        return math.inf
    return num / den


def approx_thresholds(
    spec: BayesianSpec, opts: SolveOptions = DEFAULT_OPTIONS
) -> ApproxThresholds:
    """No-deviation thresholds at the approximate optimum profile."""
    hat = np.asarray(approx_social_optimum(spec, opts).rates)
    nash = bayesian_nash(spec, opts).profile
    low = _threshold_platform1(spec, hat, nash, "low")
    high = _threshold_platform1(spec, hat, nash, "high")
    binding = max(
        _threshold_platform1(spec, hat, nash, r) for r in _realizable(spec)
    )
    incumbents = tuple(
        _threshold_incumbent(spec, hat, nash, i) for i in range(2, spec.n + 1)
    )
    return ApproxThresholds(
        platform1_low=low,
        platform1_high=high,
        incumbents=incumbents,
        platform1_binding=binding,
    )


def _plan_map(
    spec: BayesianSpec,
    binding: set[int],
    hat: np.ndarray,
    nash: BayesianRateProfile,
    delta: float,
    realizable: tuple[Realization, ...],
):
    mu = spec.mu
    punish_a = 1.0 + nash.incumbent_total / mu
    w = _mix_weight(spec)
    mix = spec.p_high * nash.rate1_high + (1.0 - spec.p_high) * nash.rate1_low

    def roots(eff: float, m: float, a: float) -> tuple[float, float]:
        # Negative discriminants mean the branch is infeasible at any rate;
        # clamping collapses the interval and the margin check catches it.
        disc = math.sqrt(max(m * m - eff * a, 0.0))
        return (m - disc) / eff, (m + disc) / eff

    def g(x: np.ndarray) -> np.ndarray:
        new = hat.copy()
        if 1 in binding:
            a = 1.0 + float(x[1:].sum()) / mu
            lower, upper = 0.0, math.inf
            for r in realizable:
                c = spec.realized_cost(r)
                eff = delta * spec.mean_cost + (1.0 - delta) * c
                m = delta * math.sqrt(punish_a) * w + (1.0 - delta) * math.sqrt(a * c)
                lo, hi = roots(eff, m, a)
                lower, upper = max(lower, lo), min(upper, hi)
            # The rate nearest the approximate optimum inside both branches'
            # no-deviation intervals; the usual case is the larger of the two
            # smaller roots, but the high branch can also cap from above when
            # its best response sits below the recommendation.
            new[0] = min(max(hat[0], lower), upper)
        for i in range(2, spec.n + 1):
            if i not in binding:
                continue
            k = i - 1
            ci = spec.incumbent_cost(i)
            rival = float(x.sum()) - float(x[k])
            a_i = 1.0 + rival / mu
            a_bar = 1.0 + (mix + nash.incumbent_total - nash.incumbent_rates[k - 1]) / mu
            m = math.sqrt(ci) * (
                delta * math.sqrt(a_bar) + (1.0 - delta) * math.sqrt(a_i)
            )
            new[k] = max(roots(ci, m, a_i)[0], hat[k])
        return new

    return g


def _binding_realization(
    spec: BayesianSpec,
    rates: np.ndarray,
    nash: BayesianRateProfile,
    delta: float,
    realizable: tuple[Realization, ...],
) -> Realization | None:
    if len(realizable) == 1:
        return realizable[0]
    margins = {
        r: platform1_margin(spec, rates, r, nash, delta) for r in realizable
    }
    return min(margins, key=margins.get)


def _regime_label(delta: float, th: ApproxThresholds) -> str:
    stressed = int(delta < th.platform1_binding) + sum(
        1 for t in th.incumbents if delta < t
    )
    n = 1 + len(th.incumbents)
    if stressed == 0:
        return "large"
    if stressed == n:
        return "small"
    return f"medium({stressed})"


def approx_cooperation_profile(
    spec: BayesianSpec, delta: float, opts: SolveOptions = DEFAULT_OPTIONS
) -> ApproxCooperationPlan:
    """Single-rate cooperation plan for the given discount factor.

    Falls back to the Bayesian equilibrium (per-realization play, reported
    through its larger low-cost rate) when no single rate can satisfy both of
    platform 1's realization constraints.
    """
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0, 1), got {delta!r}")
    hat = np.asarray(approx_social_optimum(spec, opts).rates)
    nash_res = bayesian_nash(spec, opts)
    nash = nash_res.profile
    th = approx_thresholds(spec, opts)
    realizable = _realizable(spec)

    binding = set()
    if delta < th.platform1_binding:
        binding.add(1)
    for i in range(2, spec.n + 1):
        if delta < th.incumbents[i - 2]:
            binding.add(i)

    rates = hat.copy()
    degenerate = False
    while True:
        if binding:
            rates = solve_fixed_point(
                _plan_map(spec, binding, hat, nash, delta, realizable), rates, opts
            )
        else:
            rates = hat.copy()
        p1_margins = [
            platform1_margin(spec, rates, r, nash, delta) for r in realizable
        ]
        if 1 in binding and min(p1_margins) < -_MARGIN_TOL:
            # Platform 1's two feasible intervals no longer intersect: no
            # single rate is incentive-compatible, so recommend equilibrium
            # play itself.
            degenerate = True
            rates = np.concatenate(
                ([max(nash.rate1_low, nash.rate1_high)], nash.incumbent_rates)
            )
            binding = set(range(1, spec.n + 1))
            break
        violated = set()
        if 1 not in binding and min(p1_margins) < -_MARGIN_TOL:
            violated.add(1)
        for i in range(2, spec.n + 1):
            if i not in binding and incumbent_margin(
                spec, rates, i, nash, delta
            ) < -_MARGIN_TOL:
                violated.add(i)
        if not violated:
            break
        binding |= violated

    return ApproxCooperationPlan(
        delta=delta,
        regime=_regime_label(delta, th),
        profile=RateProfile(rates),
        thresholds=th,
        reference_hat=RateProfile(hat),
        reference_nash=nash,
        binding=tuple(sorted(binding)),
        binding_realization=None
        if degenerate
        else _binding_realization(spec, rates, nash, delta, realizable),
        degenerate=degenerate,
    )


@dataclass(frozen=True)
class CheatIncentiveReport:
    applicable: bool                 # False when the cost draw is degenerate
    cost_honest: float               # high draw, recommended high-draw optimum rate
    cost_cheat: float                # high draw, imitating the low-draw rate
    cheat_profitable: bool
    externality_charge: float        # S = (1/mu) * sum incumbents' 1/rate
    no_cheat_bound: float            # sqrt(c_high + S) * sqrt(c_low + S)
    no_cheat_condition_holds: bool   # bound <= c_high


def cheat_incentive(
    spec: BayesianSpec, opts: SolveOptions = DEFAULT_OPTIONS
) -> CheatIncentiveReport:
    """Would a per-realization optimum profile invite undetectable cheating?

    Under such a profile both of platform 1's rates are legitimate, so a
    high-cost platform 1 may imitate the low-cost rate without detection; the
    cheat is unprofitable only when sqrt(c_high+S)*sqrt(c_low+S) <= c_high.
    """
    if spec.p_high in (0.0, 1.0):
        nan = math.nan
        return CheatIncentiveReport(False, nan, nan, False, nan, nan, False)
    opt = bayesian_social_optimum(spec, opts).profile
    s = sum(1.0 / r for r in opt.incumbent_rates) / spec.mu
    honest = cost_from_rates(
        opt.rate1_high, opt.incumbent_total, spec.c_high, spec.mu
    )
    cheat = cost_from_rates(
        opt.rate1_low, opt.incumbent_total, spec.c_high, spec.mu
    )
    bound = math.sqrt(spec.c_high + s) * math.sqrt(spec.c_low + s)
    return CheatIncentiveReport(
        applicable=True,
        cost_honest=honest,
        cost_cheat=cheat,
        cheat_profitable=cheat < honest,
        externality_charge=s,
        no_cheat_bound=bound,
        no_cheat_condition_holds=bound <= spec.c_high,
    )


def approximation_ratio(
    spec_family, opts: SolveOptions = DEFAULT_OPTIONS
) -> list[tuple[int, float]]:
    """Mechanism-over-optimum social cost ratios for a family of specs."""
    out = []
    for spec in spec_family:
        hat = approx_social_optimum(spec, opts)
        plan_profile = BayesianRateProfile(
            hat.rates[0], hat.rates[0], hat.rates[1:]
        )
        mech = bayesian_social_cost(plan_profile, spec)
        opt = bayesian_social_optimum(spec, opts).social
        out.append((spec.n, mech / opt))
    return out
