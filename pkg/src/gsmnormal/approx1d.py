"""Best centered normal approximation N(0, t0) of a one-dimensional scale mixture.

t0 is the unique root of F(1/t) = 2^(-3/2) with F(y) = E[(1 + V y)^(-3/2)],
and the squared L2 distance at t is

    I(t) = (2 pi)^(-1/2) [E(V + V1)^(-1/2) - 2 E(V + t)^(-1/2) + (2t)^(-1/2)].

A second convention with twice that value is carried alongside as
``distance_paper_convention`` so results can be compared with reference
tables computed that way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .exceptions import BadMeasure, Divergent, NonConvergent, NotL2
from .mixing import MixingMeasure1D
from .numerics import RootBracket, find_root
from .validation import check_positive

__all__ = [
    "TARGET",
    "Approx1DResult",
    "ScalingReport",
    "solve_t0",
    "distance_at",
    "objective_derivative",
    "stationarity_function",
    "scaling_check",
    "is_l2",
]

TARGET = 2.0 ** -1.5
_SQRT_2PI = math.sqrt(2.0 * math.pi)
_MAX_EXPANSIONS = 200


@dataclass(frozen=True)
class Approx1DResult:
    t0: float
    y0: float
    distance_corrected: float
    distance_paper_convention: float
    mean_V: float
    bracket_iterations: int
    residual: float

    def as_dict(self) -> dict:
        return {
            "t0": self.t0,
            "y0": self.y0,
            "distance_corrected": self.distance_corrected,
            "distance_paper_convention": self.distance_paper_convention,
            "mean_V": self.mean_V,
            "residual": self.residual,
            "bracket_iterations": self.bracket_iterations,
        }


def is_l2(mu: MixingMeasure1D) -> bool:
    """Square integrability of the mixture density: E[(V + V1)^(-1/2)] < inf."""
    return math.isfinite(mu.pair_resolvent(0.5))


def stationarity_function(mu: MixingMeasure1D) -> Callable[[float], float]:
    """t -> F(1/t) - 2^(-3/2); increasing in t, zero exactly at t0."""
    def g(t: float) -> float:
        return mu.f_profile(1.0 / t) - TARGET
    return g


def _bracket(g_log: Callable[[float], float], mu: MixingMeasure1D) -> tuple[float, float]:
    """Log-scale bracket [a, b] with g_log(a) < 0 < g_log(b)."""
    mean_v = mu.mean()
    finite_mean = math.isfinite(mean_v)
    if finite_mean:
        hi = math.log(mean_v)
        lo = math.log(min(1e-8, 1e-3 * mean_v))
    else:
        hi = math.log(mu.median())
        lo = math.log(min(1e-8, 1e-3 * mu.median()))
    for _ in range(_MAX_EXPANSIONS):
        if g_log(hi) > 0:
            break
        # at the mean F(1/t) >= 2^(-3/2) by Jensen; this loop only absorbs
        # rounding there, or searches upward when the mean is infinite
        hi += math.log(2.0)
    else:
        raise BadMeasure("could not find an upper bracket for t0")
    for _ in range(_MAX_EXPANSIONS):
        if g_log(lo) < 0:
            break
        lo += math.log(1e-3)
    else:
        raise BadMeasure("could not find a lower bracket for t0")
    return lo, hi


def solve_t0(mu: MixingMeasure1D, tol: float = 1e-10) -> Approx1DResult:
    """Solve for the variance t0 of the best normal approximation.

    The root is located in log t, so ``tol`` bounds the bracket width
    relative to t0.
    """
    tol = check_positive(tol, "tol")
    if mu.is_point_mass:
        v = float(mu.values[0])
        return Approx1DResult(v, 1.0 / v, 0.0, 0.0, v, 0, 0.0)
    if not is_l2(mu):
        raise NotL2(f"{type(mu).__name__} mixing gives a density outside L2")

    g = stationarity_function(mu)

    def g_log(s: float) -> float:
        try:
            return g(math.exp(s))
        except NonConvergent as exc:
            raise BadMeasure(f"F could not be evaluated at t={math.exp(s):.6g}: {exc}") from exc

    lo, hi = _bracket(g_log, mu)
    res = find_root(g_log, RootBracket(lo, hi, -1, 1), tol=tol, full_output=True)
    t0 = math.exp(res.root)
    corrected, doubled = distance_at(mu, t0)
    return Approx1DResult(
        t0=t0,
        y0=1.0 / t0,
        distance_corrected=corrected,
        distance_paper_convention=doubled,
        mean_V=mu.mean(),
        bracket_iterations=res.iterations,
        residual=abs(res.value),
    )


def distance_at(mu: MixingMeasure1D, t: float) -> tuple[float, float]:
    """(corrected, paper_convention) squared L2 distances to N(0, t).

    Negative round-off near an exact fit is clamped to zero.
    """
    t = check_positive(t, "t")
    pair = mu.pair_resolvent(0.5)
    if not math.isfinite(pair):
        raise Divergent("E[(V + V1)^(-1/2)] is infinite")
    value = (pair - 2.0 * mu.resolvent_moment(t, 0.5) + (2.0 * t) ** -0.5) / _SQRT_2PI
    value = max(value, 0.0)
    return value, 2.0 * value


def objective_derivative(mu: MixingMeasure1D, t: float) -> float:
    """d/dt of the corrected distance: (sqrt 2 / pi) Gamma(3/2) t^(-3/2) [F(1/t) - 2^(-3/2)]."""
    t = check_positive(t, "t")
    coef = math.sqrt(2.0) / math.pi * math.gamma(1.5)
    return coef * t ** -1.5 * (mu.f_profile(1.0 / t) - TARGET)


@dataclass(frozen=True)
class ScalingReport:
    factor: float
    t0: float
    t0_scaled: float
    t0_residual: float
    distance: float
    distance_scaled: float
    distance_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.t0_residual <= self.tol and self.distance_residual <= self.tol


def scaling_check(mu: MixingMeasure1D, factor: float, tol: float = 1e-8) -> ScalingReport:
    """Compare the solution for lambda * V with the rescaled solution for V.

    Expected: t0 scales by lambda and the distance by lambda^(-1/2).  Both
    residuals are relative.
    """
    factor = check_positive(factor, "lambda")
    base = solve_t0(mu)
    scaled = solve_t0(mu.scaled(factor))
    t_res = abs(scaled.t0 - factor * base.t0) / (factor * base.t0)
    expected = base.distance_corrected / math.sqrt(factor)
    scale = max(expected, 1e-300)
    d_res = abs(scaled.distance_corrected - expected) / scale if expected > 0 else scaled.distance_corrected
    return ScalingReport(factor, base.t0, scaled.t0, t_res,
                         base.distance_corrected, scaled.distance_corrected, d_res, tol)

