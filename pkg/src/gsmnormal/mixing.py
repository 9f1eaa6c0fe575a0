"""Scalar mixing measures: laws of the variance V on (0, inf).

Each measure exposes the integral functionals the approximation problem is
built from.  Expectations go through closed forms where they exist and
through adaptive quadrature otherwise.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special, stats

from .exceptions import BadMeasure, NonConvergent, Unsupported
from .numerics import (
    DEFAULT_QUADRATURE,
    McSpec,
    QuadratureSpec,
    RootBracket,
    find_root,
    integrate_halfline,
    integrate_interval,
    make_rng,
)
from .validation import check_positive, check_weights

__all__ = [
    "MixingMeasure1D",
    "Discrete",
    "Uniform",
    "Exponential",
    "InverseGamma",
    "KolmogorovSmirnov",
    "GenericDensity",
    "point_mass",
    "ks_density",
    "ks_cdf",
    "laplace",
    "mean",
    "resolvent_moment",
    "f_profile",
    "pair_resolvent",
    "pair_resolvent_half",
    "sample",
]

# below this small-ball exponent margin a generic density is declared divergent
_EXPONENT_MARGIN = 1e-3


class MixingMeasure1D:
    """Base class for probability laws on (0, inf)."""

    quadrature: QuadratureSpec

    # exponent b in mu((0, eps]) ~ eps**b as eps -> 0 (inf: no mass near 0)
    small_ball_exponent: float = math.inf

    @property
    def is_point_mass(self) -> bool:
        return False

    def expect(self, func: Callable[[np.ndarray], np.ndarray]) -> float:
        """E[func(V)] for a vectorized ``func``."""
        raise NotImplementedError

    def laplace(self, u: float) -> float:
        u = check_positive(u, "u", allow_zero=True)
        if u == 0:
            return 1.0
        return self.expect(lambda v: np.exp(-u * v))

    def mean(self) -> float:
        raise NotImplementedError

    def median(self) -> float:
        raise NotImplementedError

    def resolvent_moment(self, t: float, q: float) -> float:
        t = check_positive(t, "t")
        q = check_positive(q, "q")
        return self.expect(lambda v: (t + v) ** -q)

    def f_profile(self, y: float) -> float:
        y = check_positive(y, "y", allow_zero=True)
        if y == 0:
            return 1.0
        return self.expect(lambda v: (1.0 + v * y) ** -1.5)

    def pair_resolvent(self, q: float) -> float:
        """E[(V + V1)^(-q)] for independent V, V1 ~ mu; ``inf`` when divergent.

        P(V + V1 <= eps) behaves like eps**(2b) where b is the small-ball
        exponent, so the expectation is finite exactly when 2b > q.
        """
        q = check_positive(q, "q")
        return _pair_resolvent_cached(self, q)

    def _pair_resolvent(self, q: float) -> float:
        def outer(v):
            flat = np.ravel(v)
            out = np.array([self.resolvent_moment(float(x), q) for x in flat])
            return out.reshape(np.shape(v))
        return self.expect(outer)

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise Unsupported(f"no sampler for {type(self).__name__}")

    def scaled(self, factor: float) -> "MixingMeasure1D":
        """The law of factor * V."""
        raise NotImplementedError


@functools.lru_cache(maxsize=256)
def _pair_resolvent_cached(mu: MixingMeasure1D, q: float) -> float:
    if 2.0 * mu.small_ball_exponent <= q + _EXPONENT_MARGIN:
        return math.inf
    return mu._pair_resolvent(q)


@dataclass(frozen=True, eq=False)
class Discrete(MixingMeasure1D):
    """Finitely many atoms v_1 < ... < v_m with probabilities p_i."""

    values: tuple
    weights: tuple
    quadrature: QuadratureSpec = field(default=DEFAULT_QUADRATURE, repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        if v.size == 0:
            raise BadMeasure("a discrete measure needs at least one atom")
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise BadMeasure("atoms must be finite and positive")
        if np.any(np.diff(v) <= 0):
            raise BadMeasure("atoms must be strictly increasing")
        w = check_weights(self.weights, v.size)
        object.__setattr__(self, "values", tuple(float(x) for x in v))
        object.__setattr__(self, "weights", tuple(float(x) for x in w))
        object.__setattr__(self, "_v", v)
        object.__setattr__(self, "_w", w)

    @classmethod
    def from_atoms(cls, atoms, **kwargs) -> "Discrete":
        """Build from (v, p) pairs in any order."""
        atoms = sorted((float(v), float(p)) for v, p in atoms)
        return cls(tuple(a[0] for a in atoms), tuple(a[1] for a in atoms), **kwargs)

    @property
    def atoms(self) -> np.ndarray:
        return self._v

    @property
    def probabilities(self) -> np.ndarray:
        return self._w

    @property
    def is_point_mass(self) -> bool:
        return len(self.values) == 1

    def expect(self, func):
        return float(np.dot(self._w, func(self._v)))

    def laplace(self, u):
        u = check_positive(u, "u", allow_zero=True)
        return float(np.dot(self._w, np.exp(-u * self._v)))

    def mean(self):
        return float(np.dot(self._w, self._v))

    def median(self):
        cum = np.cumsum(self._w)
        return float(self._v[np.searchsorted(cum, 0.5 - 1e-15)])

    def _pair_resolvent(self, q):
        sums = self._v[:, None] + self._v[None, :]
        return float(self._w @ (sums ** -q) @ self._w)

    def draw(self, rng, size):
        if self.is_point_mass:
            return np.full(size, self._v[0])
        return rng.choice(self._v, size=size, p=self._w)

    def scaled(self, factor):
        factor = check_positive(factor, "factor")
        return Discrete(tuple(factor * self._v), self.weights, self.quadrature)


def point_mass(v: float, quadrature: QuadratureSpec = DEFAULT_QUADRATURE) -> Discrete:
    """The Dirac measure at v."""
    return Discrete((check_positive(v, "v"),), (1.0,), quadrature)


@dataclass(frozen=True, eq=False)
class Uniform(MixingMeasure1D):
    a: float = 0.0
    b: float = 1.0
    quadrature: QuadratureSpec = field(default=DEFAULT_QUADRATURE, repr=False)

    def __post_init__(self):
        check_positive(self.a, "a", allow_zero=True)
        if not (math.isfinite(self.b) and self.b > self.a):
            raise BadMeasure(f"uniform needs 0 <= a < b, got a={self.a}, b={self.b}")

    @property
    def small_ball_exponent(self):
        return 1.0 if self.a == 0 else math.inf

    def expect(self, func):
        width = self.b - self.a
        return integrate_interval(func, self.a, self.b, self.quadrature) / width

    def mean(self):
        return 0.5 * (self.a + self.b)

    def median(self):
        return self.mean()

    def draw(self, rng, size):
        return rng.uniform(self.a, self.b, size)

    def scaled(self, factor):
        factor = check_positive(factor, "factor")
        return Uniform(factor * self.a, factor * self.b, self.quadrature)


@dataclass(frozen=True, eq=False)
class Exponential(MixingMeasure1D):
    """Exponential law with the given mean."""

    scale: float = 1.0
    quadrature: QuadratureSpec = field(default=DEFAULT_QUADRATURE, repr=False)

    small_ball_exponent = 1.0

    def __post_init__(self):
        check_positive(self.scale, "mean")

    def pdf(self, v):
        v = np.asarray(v, dtype=float)
        return np.where(v > 0, np.exp(-v / self.scale) / self.scale, 0.0)

    def expect(self, func):
        m = self.scale
        return integrate_halfline(lambda w: func(m * w) * np.exp(-w), self.quadrature)

    def laplace(self, u):
        u = check_positive(u, "u", allow_zero=True)
        return 1.0 / (1.0 + u * self.scale)

    def mean(self):
        return self.scale

    def median(self):
        return self.scale * math.log(2.0)

    def draw(self, rng, size):
        return rng.exponential(self.scale, size)

    def scaled(self, factor):
        factor = check_positive(factor, "factor")
        return Exponential(factor * self.scale, self.quadrature)


@dataclass(frozen=True, eq=False)
class InverseGamma(MixingMeasure1D):
    """V = 1/W with W ~ Gamma(shape, rate)."""

    shape: float
    rate: float
    quadrature: QuadratureSpec = field(default=DEFAULT_QUADRATURE, repr=False)

    small_ball_exponent = math.inf

    def __post_init__(self):
        check_positive(self.shape, "shape")
        check_positive(self.rate, "rate")

    def pdf(self, v):
        v = np.asarray(v, dtype=float)
        a, b = self.shape, self.rate
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            logp = a * math.log(b) - math.lgamma(a) - (a + 1) * np.log(v) - b / v
            return np.where(v > 0, np.exp(logp), 0.0)

    def expect(self, func):
        a, b = self.shape, self.rate
        log_norm = math.lgamma(a)

        def integrand(s):
            with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
                weight = np.exp((a - 1) * np.log(s) - s - log_norm)
                return np.where(s > 0, func(b / s) * weight, 0.0)
        return integrate_halfline(integrand, self.quadrature)

    def laplace(self, u):
        u = check_positive(u, "u", allow_zero=True)
        if u == 0:
            return 1.0
        a, b = self.shape, self.rate
        z = 2.0 * math.sqrt(b * u)
        log_val = (math.log(2.0) + 0.5 * a * math.log(b * u)
                   + math.log(special.kve(a, z)) - z - math.lgamma(a))
        return math.exp(log_val)

    def mean(self):
        return self.rate / (self.shape - 1.0) if self.shape > 1 else math.inf

    def median(self):
        return float(stats.invgamma.ppf(0.5, self.shape, scale=self.rate))

    def draw(self, rng, size):
        return self.rate / rng.gamma(self.shape, 1.0, size)

    def scaled(self, factor):
        factor = check_positive(factor, "factor")
        return InverseGamma(self.shape, factor * self.rate, self.quadrature)


# ---------------------------------------------------------------------------
# Kolmogorov-Smirnov law: k1(l) = sum_{n>=1} (-1)^(n+1) n^2 exp(-n^2 l / 2)

_KS_SWITCH = 1.0
_DUAL_TERMS = 6


def _ks_direct(lam: np.ndarray, derivative: bool) -> np.ndarray:
    """Alternating series, summed until the next term is below 1e-16 of the
    partial sum inside the monotone region (n^2 >= 2/lam for the density);
    at least 50 terms when lam < 0.2."""
    lam = np.asarray(lam, dtype=float)
    total = np.zeros_like(lam) if derivative else np.ones_like(lam)
    lam_min = float(lam.min()) if lam.size else 1.0
    n = 0
    while True:
        n += 1
        term = np.exp(-0.5 * n * n * lam)
        if derivative:
            total += (-1) ** (n + 1) * n * n * term
        else:
            total += 2.0 * (-1) ** n * term
        nxt = (n + 1) ** 2 * np.exp(-0.5 * (n + 1) ** 2 * lam) if derivative \
            else 2.0 * np.exp(-0.5 * (n + 1) ** 2 * lam)
        monotone = (n + 1) ** 2 * lam_min >= 2.0
        small = np.all(nxt <= 1e-16 * np.abs(total))
        if monotone and small and not (lam_min < 0.2 and n < 50):
            return total
        if n > 100_000:
            return total


def _ks_dual(lam: np.ndarray, derivative: bool) -> np.ndarray:
    """Theta-transformed series, rapidly convergent for small lam:
    F(l) = sqrt(8 pi / l) sum_k exp(-c_k / l), c_k = (2k - 1)^2 pi^2 / 2."""
    lam = np.asarray(lam, dtype=float)
    total = np.zeros_like(lam)
    root = math.sqrt(8.0 * math.pi)
    for k in range(1, _DUAL_TERMS + 1):
        c = 0.5 * (2 * k - 1) ** 2 * math.pi ** 2
        e = np.exp(-c / lam)
        if derivative:
            total += root * e * (c * lam ** -2.5 - 0.5 * lam ** -1.5)
        else:
            total += root * e * lam ** -0.5
    return total


def _ks_eval(lam, derivative):
    lam = np.asarray(lam, dtype=float)
    out = np.zeros_like(lam)
    pos = lam > 0
    small = pos & (lam < _KS_SWITCH)
    large = lam >= _KS_SWITCH
    with np.errstate(divide="ignore", over="ignore", invalid="ignore", under="ignore"):
        if np.any(small):
            out[small] = _ks_dual(lam[small], derivative)
        if np.any(large):
            out[large] = _ks_direct(lam[large], derivative)
    if not derivative:
        out = np.where(np.isposinf(lam), 1.0, out)
    return out


def ks_density(lam):
    """Kolmogorov-Smirnov mixing density k1, clamped at 0 from below."""
    return np.maximum(_ks_eval(lam, True), 0.0)


def ks_cdf(lam):
    """F(l) = sum over all integers n of (-1)^n exp(-n^2 l / 2)."""
    return np.clip(_ks_eval(lam, False), 0.0, 1.0)


@dataclass(frozen=True, eq=False)
class KolmogorovSmirnov(MixingMeasure1D):
    """The mixing law that turns the standard logistic density into a
    Gaussian scale mixture."""

    quadrature: QuadratureSpec = field(default=DEFAULT_QUADRATURE, repr=False)

    small_ball_exponent = math.inf

    def pdf(self, v):
        return ks_density(v)

    def cdf(self, v):
        return ks_cdf(v)

    def expect(self, func):
        return integrate_halfline(lambda v: func(v) * ks_density(v), self.quadrature)

    def mean(self):
        return math.pi ** 2 / 3.0

    def median(self):
        return float(_ks_quantile(np.array([0.5]))[0])

    def draw(self, rng, size):
        return _ks_quantile(rng.random(size))

    def scaled(self, factor):
        factor = check_positive(factor, "factor")
        return GenericDensity(lambda v: ks_density(v / factor) / factor,
                              name=f"kolmogorov_smirnov*{factor:g}",
                              quadrature=self.quadrature)


def _ks_quantile(p: np.ndarray) -> np.ndarray:
    """Invert the series CDF by vectorized bisection."""
    lo = np.zeros_like(p, dtype=float)
    hi = np.full_like(p, 100.0, dtype=float)
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        below = ks_cdf(mid) < p
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


@dataclass(frozen=True, eq=False)
class GenericDensity(MixingMeasure1D):
    """A user-supplied vectorized density on (0, inf).

    The density is checked to integrate to one within
    ``normalization_tol`` on construction.
    """

    density: Callable[[np.ndarray], np.ndarray]
    name: str = "generic"
    quadrature: QuadratureSpec = field(default=DEFAULT_QUADRATURE, repr=False)
    normalization_tol: float = 1e-8

    def __post_init__(self):
        try:
            total = integrate_halfline(self.pdf, self.quadrature)
        except (NonConvergent, ArithmeticError) as exc:
            raise BadMeasure(f"density {self.name!r} cannot be integrated: {exc}") from exc
        if abs(total - 1.0) > self.normalization_tol:
            raise BadMeasure(f"density {self.name!r} integrates to {total!r}, not 1")

    def pdf(self, v):
        v = np.asarray(v, dtype=float)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            out = np.asarray(self.density(v), dtype=float)
        return np.where(v > 0, out, 0.0)

    @functools.cached_property
    def small_ball_exponent(self):
        near = integrate_interval(self.pdf, 0.0, 1e-4, self.quadrature)
        nearer = integrate_interval(self.pdf, 0.0, 1e-8, self.quadrature)
        if nearer <= 0:
            return math.inf
        return math.log(near / nearer) / math.log(1e4)

    def expect(self, func):
        return integrate_halfline(lambda v: func(v) * self.pdf(v), self.quadrature)

    def mean(self):
        try:
            return self.expect(lambda v: v)
        except NonConvergent:
            return math.inf

    def cdf(self, x: float) -> float:
        return integrate_interval(self.pdf, 0.0, x, self.quadrature)

    def median(self):
        hi = 1.0
        while self.cdf(hi) < 0.5:
            hi *= 2.0
        lo = hi / 2.0
        while self.cdf(lo) > 0.5 and lo > 1e-300:
            lo /= 2.0
        g = lambda x: self.cdf(x) - 0.5
        if g(lo) == 0:
            return lo
        return find_root(g, RootBracket.from_function(g, lo, hi), tol=1e-12 * hi)

    def scaled(self, factor):
        factor = check_positive(factor, "factor")
        base = self.density
        return GenericDensity(lambda v: base(v / factor) / factor,
                              name=f"{self.name}*{factor:g}", quadrature=self.quadrature,
                              normalization_tol=self.normalization_tol)


def laplace(mu: MixingMeasure1D, u: float) -> float:
    """L_V(u) = E[exp(-u V)]."""
    return mu.laplace(u)


def mean(mu: MixingMeasure1D) -> float:
    """E[V], ``inf`` when V has no first moment."""
    return mu.mean()


def resolvent_moment(mu: MixingMeasure1D, t: float, q: float) -> float:
    """E[(t + V)^(-q)]."""
    return mu.resolvent_moment(t, q)


def f_profile(mu: MixingMeasure1D, y: float) -> float:
    """F(y) = E[(1 + V y)^(-3/2)]; the level 2^(-3/2) is hit at y = 1/t0."""
    return mu.f_profile(y)


def pair_resolvent(mu: MixingMeasure1D, q: float) -> float:
    return mu.pair_resolvent(q)


def pair_resolvent_half(mu: MixingMeasure1D) -> float:
    """E[(V + V1)^(-1/2)]; ``inf`` signals that the mixture is not in L2."""
    return mu.pair_resolvent(0.5)


def sample(mu: MixingMeasure1D, spec: McSpec) -> np.ndarray:
    """``spec.sample_count`` seeded draws from mu."""
    return np.asarray(mu.draw(make_rng(spec.seed), int(spec.sample_count)), dtype=float)

