"""Trigger mechanism of non-monetary punishment under complete information.

Cooperation profiles are enforced by grim punishment: one detected deviation
sends every platform to the one-shot equilibrium forever.  A platform with
discount factor delta complies at rate x against rival total r iff

    pi(best_response, r) + delta/(1-delta) * pi(punishment)
        >= pi(x, r) / (1-delta)

which, at equality, is the quadratic  c*x^2 - 2*M*x + A = 0 with
A = 1 + r/mu and M = delta*nash_rate + (1-delta)*sqrt(A/c); the smaller root
is the cooperative rate with the smaller social cost.

Plan construction starts from the threshold-based binding set and then adds
any platform whose certificate margin turns negative at the candidate profile
(holding the others at their optimum rates is not always incentive-compatible
just above a threshold, because the binding platforms sample above optimum and
tighten everyone else's condition).  Every returned plan carries margins
certified at the analytic best responses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, DomainError
from .game_complete import EquilibriumResult, best_response, nash_equilibrium, social_optimum
from .model import RateProfile, SystemParams, cost_from_rates, social_cost
from .solvers import DEFAULT_OPTIONS, SolveOptions, solve_fixed_point

# Margins down to this level count as binding-set violations; the acceptance
# tolerance for certified plans is the looser -1e-8.
_MARGIN_TOL = 1e-9
_FORM_AGREEMENT_TOL = 1e-6


@dataclass(frozen=True)
class CooperationPlan:
    delta: float
    regime: str                       # "large" | "medium(j)" | "small"
    profile: RateProfile              # caller's platform order
    thresholds: tuple[float, ...]
    reference_nash: RateProfile
    reference_optimum: RateProfile
    binding: tuple[int, ...]          # 1-based platforms solved at equality


def _threshold_from_profiles(
    i: int, params: SystemParams, opt: RateProfile, nash: RateProfile
) -> float:
    """Smallest delta at which platform i tolerates the all-optimum profile."""
    if params.n == 1:
        return 0.0  # optimum equals equilibrium; nothing to deviate to
    rival = opt.rival_total(i)
    b = best_response(rival, params.cost(i), params.mu)
    lam_opt = opt.rate(i)
    lam_nash = nash.rate(i)
    closed = (lam_opt - b) ** 2 / (2.0 * lam_opt * (lam_nash - b))
    # Redundant route through the cost differences; the algebra is only
    # trusted after the two agree.
    gain = cost_from_rates(lam_opt, rival, params.cost(i), params.mu) - cost_from_rates(
        b, rival, params.cost(i), params.mu
    )
    loss = cost_from_rates(
        lam_nash, nash.rival_total(i), params.cost(i), params.mu
    ) - cost_from_rates(b, rival, params.cost(i), params.mu)
    via_costs = gain / loss
    if abs(closed - via_costs) > _FORM_AGREEMENT_TOL:
        raise ConsistencyError(
            f"threshold forms disagree for platform {i}: {closed!r} vs {via_costs!r}"
        )
    return closed


def delta_thresholds(
    params: SystemParams, opts: SolveOptions = DEFAULT_OPTIONS
) -> tuple[float, ...]:
    """Per-platform compliance thresholds at the all-optimum profile."""
    opt = social_optimum(params, opts).profile
    nash = nash_equilibrium(params, opts).profile
    return tuple(
        _threshold_from_profiles(i, params, opt, nash) for i in range(1, params.n + 1)
    )


def delta_threshold(
    i: int, params: SystemParams, opts: SolveOptions = DEFAULT_OPTIONS
) -> float:
    return delta_thresholds(params, opts)[i - 1]


def deviation_value(
    i: int,
    coop_profile: RateProfile,
    params: SystemParams,
    delta: float,
    opts: SolveOptions = DEFAULT_OPTIONS,
) -> tuple[float, float]:
    """(deviate, comply): discounted totals of the best one-shot deviation
    followed by perpetual punishment, versus perpetual cooperation."""
    if not 0.0 <= delta < 1.0:
        raise DomainError(f"delta must lie in [0, 1), got {delta!r}")
    nash = nash_equilibrium(params, opts).profile
    rival = coop_profile.rival_total(i)
    b = best_response(rival, params.cost(i), params.mu)
    punish = cost_from_rates(
        nash.rate(i), nash.rival_total(i), params.cost(i), params.mu
    )
    deviate = cost_from_rates(b, rival, params.cost(i), params.mu) + delta / (
        1.0 - delta
    ) * punish
    comply = cost_from_rates(
        coop_profile.rate(i), rival, params.cost(i), params.mu
    ) / (1.0 - delta)
    return deviate, comply


def compliance_margin(
    i: int,
    rates: np.ndarray,
    params: SystemParams,
    nash: RateProfile,
    delta: float,
) -> float:
    """deviate - comply at the analytic best response; >= 0 means no deviation pays."""
    rival = float(rates.sum() - rates[i - 1])
    b = best_response(rival, params.cost(i), params.mu)
    punish = cost_from_rates(nash.rate(i), nash.rival_total(i), params.cost(i), params.mu)
    deviate = cost_from_rates(b, rival, params.cost(i), params.mu)
    comply = cost_from_rates(float(rates[i - 1]), rival, params.cost(i), params.mu)
    return deviate + delta / (1.0 - delta) * punish - comply / (1.0 - delta)


def _binding_map(
    params: SystemParams,
    binding: set[int],
    opt: np.ndarray,
    nash: np.ndarray,
    delta: float,
):
    mu = params.mu
    costs = np.asarray(params.costs)

    def g(lam: np.ndarray) -> np.ndarray:
        new = opt.copy()
        for i in binding:
            k = i - 1
            rival = lam.sum() - lam[k]
            a = 1.0 + rival / mu
            b = math.sqrt(a / costs[k])
            m = delta * nash[k] + (1.0 - delta) * b
            disc = m * m - a / costs[k]
            if disc < -1e-12 * max(m * m, 1.0):
                raise ConsistencyError(
                    f"negative discriminant {disc!r} for platform {i}"
                )
            root = m - math.sqrt(max(disc, 0.0))
            # Below the optimum rate the constraint is already slack there.
            new[k] = max(root, opt[k])
        return new

    return g


def _regime_label(delta: float, thresholds: tuple[float, ...]) -> str:
    stressed = sum(1 for t in thresholds if delta < t)
    if stressed == 0:
        return "large"
    if stressed == len(thresholds):
        return "small"
    return f"medium({stressed})"


def cooperation_profile(
    params: SystemParams, delta: float, opts: SolveOptions = DEFAULT_OPTIONS
) -> CooperationPlan:
    """Per-delta recommended rates enforcing no deviation for every platform."""
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0, 1), got {delta!r}")
    opt_res = social_optimum(params, opts)
    nash_res = nash_equilibrium(params, opts)
    opt = np.asarray(opt_res.profile.rates)
    nash = nash_res.profile.rates
    nash_arr = np.asarray(nash)
    thresholds = tuple(
        _threshold_from_profiles(i, params, opt_res.profile, nash_res.profile)
        for i in range(1, params.n + 1)
    )

    # A platform binds when delta sits strictly below its threshold; ties go
    # to the cooperative side.
    binding = {i for i in range(1, params.n + 1) if delta < thresholds[i - 1]}
    rates = opt.copy()
    while True:
        if binding:
            rates = solve_fixed_point(
                _binding_map(params, binding, opt, nash_arr, delta), rates, opts
            )
        else:
            rates = opt.copy()
        violated = {
            i
            for i in range(1, params.n + 1)
            if i not in binding
            and compliance_margin(i, rates, params, nash_res.profile, delta)
            < -_MARGIN_TOL
        }
        if not violated:
            break
        binding |= violated

    return CooperationPlan(
        delta=delta,
        regime=_regime_label(delta, thresholds),
        profile=RateProfile(rates),
        thresholds=thresholds,
        reference_nash=nash_res.profile,
        reference_optimum=opt_res.profile,
        binding=tuple(sorted(binding)),
    )


def social_cost_ratio_curve(
    params: SystemParams,
    delta_grid,
    opts: SolveOptions = DEFAULT_OPTIONS,
) -> list[tuple[float, float]]:
    """(delta, mechanism social cost / optimal social cost) over the grid."""
    optimum = social_optimum(params, opts)
    out = []
    for delta in delta_grid:
        plan = cooperation_profile(params, float(delta), opts)
        out.append((float(delta), social_cost(plan.profile, params) / optimum.social))
    return out
