"""Deterministic numerical kernel.

Adaptive Gauss-Kronrod quadrature on finite intervals, the half-line and
the real line; a safeguarded bisection/secant root finder; gamma and zeta
helpers; seeded Monte Carlo means.

All random numbers come from numpy's ``PCG64`` bit generator seeded with
the 64-bit seed of a :class:`McSpec`, so a seed and a sample count fix
every estimate bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special

from .exceptions import BadBracket, DomainError, NonConvergent, NonFinite

__all__ = [
    "QuadratureSpec",
    "McSpec",
    "RootBracket",
    "RootResult",
    "DEFAULT_QUADRATURE",
    "integrate_interval",
    "integrate_halfline",
    "integrate_line",
    "find_root",
    "lgamma",
    "multivariate_lgamma",
    "zeta",
    "make_rng",
    "mc_mean",
]

# Kronrod 15-point nodes on [-1, 1] (non-negative half) with the embedded
# 7-point Gauss rule (nodes at odd positions of _XGK).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_gauss_half = np.zeros(8)
_gauss_half[1::2] = _WG
GAUSS_WEIGHTS = np.concatenate([_gauss_half[:-1], _gauss_half[::-1]])

_TRANSFORMS = ("rational", "exponential")


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and options for adaptive quadrature.

    ``halfline_transform`` selects the map of (0, 1) onto (0, inf):
    ``"rational"`` uses x = u / (1 - u), ``"exponential"`` uses x = -log u.
    """

    abs_tol: float = 1e-13
    rel_tol: float = 1e-12
    max_subdivisions: int = 5000
    halfline_transform: str = "rational"

    def __post_init__(self):
        if not self.abs_tol > 0 or not self.rel_tol > 0:
            raise DomainError("quadrature tolerances must be positive")
        if int(self.max_subdivisions) < 1:
            raise DomainError("max_subdivisions must be at least 1")
        if self.halfline_transform not in _TRANSFORMS:
            raise DomainError(
                f"halfline_transform must be one of {_TRANSFORMS}, "
                f"got {self.halfline_transform!r}"
            )


DEFAULT_QUADRATURE = QuadratureSpec()


@dataclass(frozen=True)
class McSpec:
    """Sample count and seed for Monte Carlo estimates."""

    sample_count: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if int(self.sample_count) < 1:
            raise DomainError("sample_count must be at least 1")
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")


def _rule(f, lo, hi):
    """Apply the Gauss-Kronrod pair to every row interval at once."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[:, None] + half[:, None] * NODES[None, :]
    fx = np.asarray(f(x), dtype=float)
    if fx.shape != x.shape:
        fx = np.broadcast_to(fx, x.shape)
    bad = ~np.isfinite(fx)
    if np.any(bad):
        # a node rounded onto an endpoint of a tiny interval sees the
        # endpoint singularity itself; it carries no mass
        on_edge = (x == lo[:, None]) | (x == hi[:, None])
        if np.any(bad & ~on_edge):
            raise NonFinite("integrand returned a non-finite value")
        fx = np.where(bad, 0.0, fx)
    kron = half * (fx @ KRONROD_WEIGHTS)
    gauss = half * (fx @ GAUSS_WEIGHTS)
    return kron, np.abs(kron - gauss)


def integrate_interval(f: Callable, a: float, b: float,
                       spec: QuadratureSpec = DEFAULT_QUADRATURE, full_output: bool = False):
    """Integrate a vectorized ``f`` over the finite interval [a, b].

    ``f`` receives numpy arrays of abscissae and must return an array of
    the same shape.  Intervals with the largest error estimates are
    bisected in batches until the summed estimate falls below
    ``max(abs_tol, rel_tol * |value|)``.  With ``full_output`` the pair
    (value, error estimate) is returned.
    """
    value, error = _integrate_interval(f, float(a), float(b), spec)
    return (value, error) if full_output else value


def _integrate_interval(f, a, b, spec):
    if a == b:
        return 0.0, 0.0
    sign = 1.0
    if a > b:
        a, b = b, a
        sign = -1.0
    lo = np.array([a])
    hi = np.array([b])
    val, err = _rule(f, lo, hi)
    done_val = 0.0
    done_err = 0.0
    subdivisions = 0
    while True:
        total = done_val + val.sum()
        total_err = done_err + err.sum()
        target = max(spec.abs_tol, spec.rel_tol * abs(total))
        if total_err <= target:
            return sign * float(total), float(total_err)
        if subdivisions >= spec.max_subdivisions:
            raise NonConvergent(
                f"quadrature did not converge after {subdivisions} subdivisions "
                f"(error estimate {total_err:.3g}, target {target:.3g})"
            )
        # intervals too narrow to split further are frozen
        width = hi - lo
        frozen = width <= 8 * np.finfo(float).eps * np.maximum(np.abs(lo), np.abs(hi))
        if np.any(frozen):
            done_val += val[frozen].sum()
            done_err += err[frozen].sum()
            keep = ~frozen
            lo, hi, val, err = lo[keep], hi[keep], val[keep], err[keep]
            if lo.size == 0:
                raise NonConvergent("quadrature stalled at machine resolution")
            continue
        share = (target - done_err) / max(lo.size, 1)
        split = err > max(share, 0.0)
        split[np.argmax(err)] = True
        budget = spec.max_subdivisions - subdivisions
        if split.sum() > budget:
            order = np.argsort(-err, kind="stable")[:budget]
            split = np.zeros_like(split)
            split[order] = True
        mid = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[split], mid])
        new_hi = np.concatenate([mid, hi[split]])
        new_val, new_err = _rule(f, new_lo, new_hi)
        keep = ~split
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        val = np.concatenate([val[keep], new_val])
        err = np.concatenate([err[keep], new_err])
        subdivisions += int(split.sum())


def integrate_halfline(f: Callable, spec: QuadratureSpec = DEFAULT_QUADRATURE,
                       full_output: bool = False):
    """Integrate a vectorized ``f`` over (0, inf).

    The piece over (0, 1] is integrated in x directly and the tail through
    the configured transform, written so that its singular end sits at 0
    where floating point can resolve it.  For the rational map the tail
    x = u / (1 - u), u in (1/2, 1), becomes x = (1 - s) / s with s = 1 - u;
    for the exponential map x = -log u, u in (0, 1/e).  The exponential
    map suits integrands with exponentially decaying tails.
    """
    head, head_err = _integrate_interval(f, 0.0, 1.0, spec)
    if spec.halfline_transform == "rational":
        def tail(s):
            with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
                x = (1.0 - s) / s
                x = np.where(s > 0, x, 1.0)
                # 1/s^2 written as x^2/(1-s)^2 so tiny s cannot overflow
                return np.where(s > 0, f(x) * x * x / ((1.0 - s) * (1.0 - s)), 0.0)
        rest, rest_err = _integrate_interval(tail, 0.0, 0.5, spec)
    else:
        def tail(u):
            with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
                # beyond x ~ 690 the weight 1/u overflows; the exponential
                # map is meant for tails that are negligible there
                live = u > 1e-300
                x = -np.log(np.where(live, u, 1.0))
                return np.where(live, f(x) / np.where(live, u, 1.0), 0.0)
        rest, rest_err = _integrate_interval(tail, 0.0, math.exp(-1.0), spec)
    if full_output:
        return head + rest, head_err + rest_err
    return head + rest


def integrate_line(f: Callable, spec: QuadratureSpec = DEFAULT_QUADRATURE,
                   full_output: bool = False):
    """Integrate a vectorized ``f`` over the whole real line."""
    return integrate_halfline(lambda x: f(x) + f(-x), spec, full_output)


@dataclass(frozen=True)
class RootBracket:
    """An interval [lo, hi] over which a function changes sign."""

    lo: float
    hi: float
    f_lo_sign: int
    f_hi_sign: int

    def __post_init__(self):
        if not self.lo < self.hi:
            raise BadBracket(f"bracket needs lo < hi, got [{self.lo}, {self.hi}]")
        if self.f_lo_sign == self.f_hi_sign or 0 in (self.f_lo_sign, self.f_hi_sign):
            raise BadBracket("bracket endpoint signs must be opposite and non-zero")

    @classmethod
    def from_function(cls, f: Callable[[float], float], lo: float, hi: float) -> "RootBracket":
        return cls(lo, hi, int(np.sign(f(lo))), int(np.sign(f(hi))))


@dataclass(frozen=True)
class RootResult:
    root: float
    value: float
    iterations: int
    width: float


def find_root(f: Callable[[float], float], bracket: RootBracket, tol: float = 1e-12,
              maxiter: int = 500, full_output: bool = False):
    """Locate a sign change of ``f`` inside ``bracket``.

    Illinois-style secant steps are taken while they shrink the bracket
    quickly; steps are kept at least ``tol / 2`` inside the bracket, and a
    step outside the bracket or three consecutive steps that fail to halve
    it are replaced by bisection.  Iteration stops when the bracket
    is narrower than ``tol`` or ``f`` vanishes exactly.  The returned
    point is the bracket endpoint with the smaller ``|f|``.
    """
    lo, hi = float(bracket.lo), float(bracket.hi)
    f_lo, f_hi = float(f(lo)), float(f(hi))
    for value in (f_lo, f_hi):
        if not math.isfinite(value):
            raise NonFinite("root function is not finite at the bracket ends")
    if np.sign(f_lo) != bracket.f_lo_sign or np.sign(f_hi) != bracket.f_hi_sign:
        raise BadBracket(
            f"sign precondition failed: f({lo})={f_lo:.3g}, f({hi})={f_hi:.3g}"
        )

    iterations = 0
    slow_steps = 0
    side = 0
    # g_lo, g_hi: endpoint values used by the secant, scaled down when an
    # endpoint survives repeated steps (Illinois modification)
    g_lo, g_hi = f_lo, f_hi
    while hi - lo > tol and iterations < maxiter:
        iterations += 1
        width = hi - lo
        x = hi - g_hi * (hi - lo) / (g_hi - g_lo) if g_hi != g_lo else 0.5 * (lo + hi)
        if slow_steps >= 3 or not lo < x < hi:
            x = 0.5 * (lo + hi)
            slow_steps = 0
        else:
            # keep a minimal step so a root hugging an endpoint closes the bracket
            step = min(0.5 * tol, 0.25 * width)
            x = min(max(x, lo + step), hi - step)
        fx = float(f(x))
        if not math.isfinite(fx):
            raise NonFinite(f"root function is not finite at {x}")
        if fx == 0.0:
            lo = hi = x
            f_lo = f_hi = 0.0
            break
        if np.sign(fx) == np.sign(f_lo):
            lo, f_lo, g_lo = x, fx, fx
            if side == -1:
                g_hi *= 0.5
            side = -1
        else:
            hi, f_hi, g_hi = x, fx, fx
            if side == 1:
                g_lo *= 0.5
            side = 1
        slow_steps = slow_steps + 1 if hi - lo > 0.5 * width else 0

    root, value = (lo, f_lo) if abs(f_lo) <= abs(f_hi) else (hi, f_hi)
    if full_output:
        return RootResult(root, value, iterations, hi - lo)
    return root


def lgamma(x: float) -> float:
    """log Gamma(x) for x > 0."""
    if not x > 0:
        raise DomainError(f"lgamma needs x > 0, got {x}")
    return math.lgamma(x)


def multivariate_lgamma(p: float, n: int) -> float:
    """log of the multivariate gamma function of order ``n``.

    Gamma_n(p) = pi^(n(n-1)/4) prod_{i=1..n} Gamma(p - (i-1)/2), defined
    for p > (n-1)/2.
    """
    n = int(n)
    if n < 1:
        raise DomainError("multivariate_lgamma needs n >= 1")
    if not p > 0.5 * (n - 1):
        raise DomainError(f"multivariate_lgamma needs p > (n-1)/2, got p={p}, n={n}")
    total = 0.25 * n * (n - 1) * math.log(math.pi)
    for i in range(n):
        total += math.lgamma(p - 0.5 * i)
    return total


def zeta(t: float) -> float:
    """Riemann zeta function for real t > 1."""
    if not t > 1:
        raise DomainError(f"zeta needs t > 1, got {t}")
    return float(special.zeta(t))


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


def mc_mean(sampler: Callable[[np.random.Generator, int], np.ndarray],
            spec: McSpec) -> tuple[float, float]:
    """Sample mean and standard error of ``spec.sample_count`` draws.

    ``sampler(rng, size)`` must return ``size`` finite reals.
    """
    draws = np.asarray(sampler(make_rng(spec.seed), int(spec.sample_count)), dtype=float)
    if not np.all(np.isfinite(draws)):
        raise NonFinite("sampler produced non-finite values")
    mean = float(draws.mean())
    if draws.size < 2:
        return mean, 0.0
    return mean, float(draws.std(ddof=1) / math.sqrt(draws.size))
