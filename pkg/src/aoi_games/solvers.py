"""Numerical backbone: bracketed scalar roots and damped fixed-point iteration.

Every equation system in the package reduces to one of two shapes: a scalar
equation with a verified sign-change bracket, or a coordinatewise
best-response map that is monotone with a unique fixed point.  Both solvers
are deterministic: identical inputs produce bit-identical results.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BracketingError, ConvergenceError, DivergenceError


@dataclass(frozen=True)
class SolveOptions:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-12
    max_iter: int = 10_000
    damping: float = 1.0

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not 0.0 < self.damping <= 1.0:
            raise ValueError("damping must lie in (0, 1]")


DEFAULT_OPTIONS = SolveOptions()


def solve_scalar_bracketed(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    opts: SolveOptions = DEFAULT_OPTIONS,
) -> float:
    """Root of a continuous f on [lo, hi] with f(lo) * f(hi) <= 0.

    Secant steps accelerate an always-maintained bisection bracket, so
    convergence is guaranteed.  Returns x with |f(x)| <= abs_tol or bracket
    width <= rel_tol * |x|.
    """
    lo, hi = float(lo), float(hi)
    if not lo < hi:
        raise BracketingError(f"need lo < hi, got [{lo}, {hi}]")
    flo, fhi = f(lo), f(hi)
    if abs(flo) <= opts.abs_tol:
        return lo
    if abs(fhi) <= opts.abs_tol:
        return hi
    if flo * fhi > 0.0:
        raise BracketingError(
            f"no sign change on [{lo}, {hi}]: f(lo)={flo:.6g}, f(hi)={fhi:.6g}"
        )

    x = 0.5 * (lo + hi)
    for _ in range(opts.max_iter):
        # Secant candidate from the bracket endpoints, midpoint fallback.
        denom = fhi - flo
        if denom != 0.0:
            cand = lo - flo * (hi - lo) / denom
        else:
            cand = 0.5 * (lo + hi)
        margin = 0.01 * (hi - lo)
        if not lo + margin <= cand <= hi - margin:
            cand = 0.5 * (lo + hi)
        fc = f(cand)
        x = cand
        if abs(fc) <= opts.abs_tol:
            return x
        if flo * fc <= 0.0:
            hi, fhi = cand, fc
        else:
            lo, flo = cand, fc
        if hi - lo <= opts.rel_tol * abs(x):
            return x
        # Floating-point floor: bracket cannot shrink further.
        if hi - lo <= 4.0 * np.finfo(float).eps * max(abs(lo), abs(hi), 1.0):
            return x
    raise ConvergenceError(
        f"bracketed solve did not converge in {opts.max_iter} iterations"
    )


def solve_fixed_point(
    g: Callable[[np.ndarray], np.ndarray],
    start: np.ndarray,
    opts: SolveOptions = DEFAULT_OPTIONS,
    divergence_cap: float = 1e12,
) -> np.ndarray:
    """Fixed point of a map g over positive vectors.

    Damped Picard iteration; the step is halved whenever the residual fails
    to decrease.  Returns x with ||g(x) - x||_inf <= abs_tol * (1 + ||x||_inf).
    Raises DivergenceError once any component exceeds ``divergence_cap``.
    """
    x = np.array(start, dtype=float, copy=True)
    alpha = opts.damping
    prev_res = np.inf
    for _ in range(opts.max_iter):
        gx = np.asarray(g(x), dtype=float)
        if not np.all(np.isfinite(gx)):
            raise ConvergenceError("fixed-point map produced a non-finite value")
        if np.max(np.abs(gx)) > divergence_cap:
            raise DivergenceError(
                f"iterate exceeded divergence cap {divergence_cap:g}"
            )
        res = float(np.max(np.abs(gx - x)))
        if res <= opts.abs_tol * (1.0 + float(np.max(np.abs(x)))):
            return x
        if res >= prev_res:
            alpha = max(alpha * 0.5, 2.0 ** -20)
        prev_res = res
        x = x + alpha * (gx - x)
    raise ConvergenceError(
        f"fixed-point iteration did not converge in {opts.max_iter} iterations "
        f"(last residual {prev_res:.3g})"
    )
