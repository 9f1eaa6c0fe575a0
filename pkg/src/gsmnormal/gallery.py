"""Closed-form Gaussian scale mixtures paired with their mixing laws.

Each pair can be checked numerically: the mixture integral of the mixing
law must reproduce the closed-form density.  The module also hosts the
product/sum theta identity behind the Kolmogorov-Smirnov law, the
multivariate t family with its two distinct mixing laws, and the radial
logistic family g_n in R^n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .density import GsmDensity, density
from .exceptions import DomainError
from .matrix_mixing import InverseWishart, MixingMeasureND, ScalarMatrix, sample_inverse_wishart
from .mixing import Exponential, InverseGamma, KolmogorovSmirnov, MixingMeasure1D, ks_cdf, ks_density
from .numerics import McSpec, integrate_halfline, zeta
from .validation import check_grid, check_positive

__all__ = [
    "ClosedFormPair",
    "VerificationReport",
    "laplace_pair",
    "stable_half_pair",
    "stable_constant",
    "west_density",
    "west_mixing_density",
    "stable_laplace_check",
    "logistic_pair",
    "logistic_density",
    "jacobi_check",
    "ks_cdf_monotone_check",
    "ks_normalization_check",
    "mvt_constant",
    "mvt_pair",
    "sample_inverse_wishart",
    "sphere_area",
    "j_integral",
    "j_quadrature",
    "example5_constant",
    "example5_family",
    "verify_pair",
    "nonidentifiability_check",
    "CLAIMS",
    "run_claim",
]

LOGISTIC_GRID = (-5.0, -3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0, 5.0)
PAIR_GRID = tuple(np.linspace(-5.0, 5.0, 41))
MC_SIGMAS = 3.0

Mixing = Union[MixingMeasure1D, MixingMeasureND]


@dataclass(frozen=True)
class VerificationReport:
    claim: str
    description: str
    max_abs_error: float
    tolerance: float
    passed: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "passed", bool(self.max_abs_error <= self.tolerance))

    def as_dict(self) -> dict:
        return {
            "claim": self.claim,
            "description": self.description,
            "max_abs_error": self.max_abs_error,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


@dataclass(frozen=True, eq=False)
class ClosedFormPair:
    """A closed-form density together with a mixing law that generates it.

    ``density`` takes a point of R^dim (a float when dim is 1).
    """

    name: str
    density: Callable
    mixing: Mixing
    dim: int = 1

    def mixture(self, x, mc_tol: float | None = None) -> float:
        return density(GsmDensity(self.mixing), x, mc_tol=mc_tol)

    def verify(self, grid=PAIR_GRID, tol: float = 1e-7) -> VerificationReport:
        return verify_pair(self, grid, tol)


def _point(x, dim: int) -> np.ndarray:
    """A grid value r as the point r * e_1 in R^dim, or a full point unchanged."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        out = np.zeros(dim)
        out[0] = float(arr)
        return out
    return arr.reshape(dim)


def verify_pair(pair: ClosedFormPair, grid=PAIR_GRID, tol: float = 1e-7) -> VerificationReport:
    """Compare the mixture integral with the closed form on ``grid``.

    Monte Carlo pairs report the largest |error| / std_error instead,
    checked against ``MC_SIGMAS``.
    """
    grid = list(grid)
    if isinstance(pair.mixing, InverseWishart):
        worst = 0.0
        for x in grid:
            est = pair.mixing.density_estimate(_point(x, pair.dim))
            z = abs(est.value - pair.density(_point(x, pair.dim))) / est.std_error
            worst = max(worst, z)
        return VerificationReport(pair.name, f"max z-score over {len(grid)} points", worst, MC_SIGMAS)
    errs = [abs(pair.mixture(_point(x, pair.dim)) - pair.density(_point(x, pair.dim)))
            for x in grid]
    return VerificationReport(pair.name, f"max |mixture - closed form| over {len(grid)} points",
                              float(max(errs)), tol)


# --- double exponential -----------------------------------------------------

def laplace_pair(a: float = 1.0) -> ClosedFormPair:
    """(a/2) exp(-a|x|) with exponential mixing of mean 2/a^2."""
    a = check_positive(a, "a")

    def f(x):
        return 0.5 * a * math.exp(-a * abs(float(np.ravel(x)[0])))
    return ClosedFormPair(f"laplace(a={a:g})", f, Exponential(2.0 / a ** 2))


# --- positive stable law of index 1/2 ---------------------------------------

def stable_constant(alpha: float, big_a: float) -> float:
    """Normalizing constant of C exp(-2^-alpha A |x|^(2 alpha))."""
    return alpha * big_a ** (1.0 / (2.0 * alpha)) / (math.sqrt(2.0) * math.gamma(1.0 / (2.0 * alpha)))


def west_density(t, big_a: float):
    """Positive stable density of index 1/2: (A / (2 sqrt pi)) t^(-3/2) exp(-A^2 / (4t))."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore", under="ignore"):
        out = big_a / (2.0 * math.sqrt(math.pi)) * t ** -1.5 * np.exp(-big_a ** 2 / (4.0 * t))
    return np.where(t > 0, out, 0.0)


def west_mixing_density(v, big_a: float):
    """C sqrt(2 pi) g(1/v) v^(-3/2), the mixing density built from the stable law."""
    v = np.asarray(v, dtype=float)
    c = stable_constant(0.5, big_a)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        out = c * math.sqrt(2.0 * math.pi) * west_density(1.0 / v, big_a) * v ** -1.5
    return np.where(v > 0, out, 0.0)


def stable_laplace_check(big_a: float = 1.0, theta: float = 1.0) -> VerificationReport:
    """Quadrature of the Laplace transform of the stable law against exp(-A sqrt(theta))."""
    big_a = check_positive(big_a, "A")
    theta = check_positive(theta, "theta")
    value = integrate_halfline(lambda t: np.exp(-theta * t) * west_density(t, big_a))
    err = abs(value - math.exp(-big_a * math.sqrt(theta)))
    return VerificationReport("stable-half-laplace",
                              f"Laplace transform at theta={theta:g}, A={big_a:g}", err, 1e-8)


def stable_half_pair(big_a: float = 1.0) -> ClosedFormPair:
    """C exp(-A|x|/sqrt 2), C = A / (2 sqrt 2), with exponential mixing of rate A^2/4."""
    big_a = check_positive(big_a, "A")
    c = big_a / (2.0 * math.sqrt(2.0))

    def f(x):
        return c * math.exp(-big_a * abs(float(np.ravel(x)[0])) / math.sqrt(2.0))
    return ClosedFormPair(f"stable-half(A={big_a:g})", f, Exponential(4.0 / big_a ** 2))


def _stable_checks(big_a: float = 1.0) -> list[VerificationReport]:
    pair = stable_half_pair(big_a)
    c_err = abs(stable_constant(0.5, big_a) - big_a / (2.0 * math.sqrt(2.0)))
    v = np.linspace(0.05, 20.0, 41)
    mu_err = float(np.max(np.abs(west_mixing_density(v, big_a) - pair.mixing.pdf(v))))
    return [
        VerificationReport("stable-half-constant", "general and index-1/2 constants", c_err, 1e-14),
        VerificationReport("stable-half-mixing", "stable-built mixing density vs exponential pdf",
                           mu_err, 1e-12),
        stable_laplace_check(big_a, 1.0),
        pair.verify(),
    ]


# --- logistic / Kolmogorov-Smirnov --------------------------------------------

def logistic_density(x) -> float:
    """e^x / (1 + e^x)^2 evaluated as e^-|x| / (1 + e^-|x|)^2."""
    e = math.exp(-abs(float(np.ravel(x)[0])))
    return e / (1.0 + e) ** 2


def logistic_pair() -> ClosedFormPair:
    return ClosedFormPair("logistic-ks", logistic_density, KolmogorovSmirnov())


def ks_normalization_check(tol: float = 1e-8) -> VerificationReport:
    total = integrate_halfline(ks_density)
    return VerificationReport("ks-normalization", "integral of the mixing density", abs(total - 1.0), tol)


def jacobi_check(x: float) -> VerificationReport:
    """prod (1 - q^(2n-1))^2 (1 - q^(2n)) against sum over Z of (-1)^n q^(n^2), q = exp(-x/2)."""
    x = check_positive(x, "x")
    log_q = -0.5 * x
    prod = 1.0
    n = 1
    while (2 * n - 1) * log_q > math.log(1e-18):
        q_odd = math.exp((2 * n - 1) * log_q)
        q_even = math.exp(2 * n * log_q)
        prod *= (1.0 - q_odd) ** 2 * (1.0 - q_even)
        n += 1
    total = 1.0
    n = 1
    while n * n * log_q > math.log(1e-18):
        total += 2.0 * (-1) ** n * math.exp(n * n * log_q)
        n += 1
    return VerificationReport("jacobi", f"product vs theta sum at x={x:g}", abs(prod - total), 1e-12)


def ks_cdf_monotone_check(grid=None) -> VerificationReport:
    """F increases on a grid from near 0 to near 1; reports the worst decrease and F at the left end."""
    grid = check_grid(np.linspace(0.01, 80.0, 800) if grid is None else grid, positive=True)
    values = ks_cdf(grid)
    worst = max(0.0, float(-np.min(np.diff(values))), float(values[0]), float(1.0 - values[-1]))
    return VerificationReport("ks-cdf", "monotone from 0 to 1 on the grid", worst, 1e-12)


# --- multivariate t: two mixing laws, one density ---------------------------

def mvt_constant(p: float, n: int) -> float:
    """C = (2 pi)^(-n/2) Gamma(p) / (2^(-n/2) Gamma(p - n/2))."""
    n = int(n)
    if not p > 0.5 * n:
        raise DomainError(f"need p > n/2, got p={p}, n={n}")
    log_c = (-0.5 * n * math.log(2.0 * math.pi) + math.lgamma(p)
             + 0.5 * n * math.log(2.0) - math.lgamma(p - 0.5 * n))
    return math.exp(log_c)


def mvt_pair(p: float, n: int, mc: McSpec = McSpec(sample_count=1_000_000)):
    """Returns (scalar pair, inverse Wishart pair, C) for C / (1 + |x|^2)^p."""
    n = int(n)
    c = mvt_constant(p, n)

    def f(x):
        x = np.asarray(x, dtype=float).reshape(n)
        return c * (1.0 + float(x @ x)) ** -p
    scalar = ClosedFormPair(f"mvt(p={p:g},n={n})/scalar",
                            f, ScalarMatrix(InverseGamma(p - 0.5 * n, 0.5), n), n)
    wishart = ClosedFormPair(f"mvt(p={p:g},n={n})/inverse-wishart", f, InverseWishart(p, n, mc), n)
    return scalar, wishart, c


def nonidentifiability_check(p: float, n: int, grid=(0.0, 0.5, 1.0, 2.0, 3.0),
                             mc: McSpec = McSpec(sample_count=1_000_000)) -> VerificationReport:
    """Max z-score between the two mixing routes for the same density."""
    scalar, wishart, _ = mvt_pair(p, n, mc)
    worst = 0.0
    for r in grid:
        x = _point(r, n)
        est = wishart.mixing.density_estimate(x)
        worst = max(worst, abs(est.value - scalar.mixture(x)) / est.std_error)
    return VerificationReport(f"mvt(p={p:g},n={n})/routes",
                              "scalar route vs inverse Wishart route, max z-score", worst, MC_SIGMAS)


# --- radial logistic family g_n in R^n ------------------------------------------

def sphere_area(n: int) -> float:
    """Area of the unit sphere in R^n, n pi^(n/2) / Gamma(1 + n/2)."""
    n = int(n)
    # written as 2 pi^(n/2) / Gamma(n/2) so n = 1 gives exactly 2
    return 2.0 * math.pi ** (0.5 * n) / math.gamma(0.5 * n)


def j_quadrature(t: float) -> float:
    """Direct quadrature of the integral of e^-r r^t / (1 + e^-r)^2 over (0, inf)."""
    t = check_positive(t, "t", allow_zero=True)

    def g(r):
        r = np.asarray(r, dtype=float)
        e = np.exp(-r)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(r > 0, e * r ** t / (1.0 + e) ** 2, 0.5 ** 2 if t == 0 else 0.0)
    return integrate_halfline(g)


def j_integral(t: float) -> float:
    """J(t) in closed form: 1/2 at 0, log 2 at 1, Gamma(t+1)(1 - 2^(1-t)) zeta(t) above 1."""
    t = check_positive(t, "t", allow_zero=True)
    if t == 0:
        return 0.5
    if abs(t - 1.0) < 1e-6:
        return math.log(2.0)
    if t > 1:
        return math.gamma(t + 1.0) * (1.0 - 2.0 ** (1.0 - t)) * zeta(t)
    return j_quadrature(t)


def example5_constant(n: int) -> float:
    """C_n = 1 / (S_(n-1) J(n-1))."""
    n = int(n)
    if n < 1:
        raise DomainError("n must be at least 1")
    return 1.0 / (sphere_area(n) * j_integral(n - 1))


def _g_radial(r: float, c_n: float) -> float:
    e = math.exp(-abs(r))
    return c_n * e / (1.0 + e) ** 2


def example5_family(n: int, radii=(0.0, 0.25, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0)):
    """Returns (C_n, J, k_n, report) for g_n(x) = C_n e^-|x| / (1 + e^-|x|)^2.

    k_n(l) = C_n (2 pi l)^((n-1)/2) k_1(l) is the mixing density.  The
    report combines |integral of k_n - 1| and the largest gap between the
    N(0, l I_n) mixture under k_n and g_n on ``radii``.
    """
    n = int(n)
    c_n = example5_constant(n)

    def k_n(lam):
        lam = np.asarray(lam, dtype=float)
        with np.errstate(invalid="ignore"):
            return np.where(lam > 0, c_n * (2.0 * math.pi * np.maximum(lam, 0.0)) ** (0.5 * (n - 1))
                            * ks_density(lam), 0.0)

    norm_err = abs(integrate_halfline(k_n) - 1.0)

    def mixture(r):
        def g(lam):
            lam = np.asarray(lam, dtype=float)
            with np.errstate(divide="ignore", over="ignore", invalid="ignore", under="ignore"):
                gauss = np.exp(-0.5 * r * r / lam - 0.5 * n * np.log(2.0 * math.pi * lam))
            return np.where(lam > 0, gauss * k_n(lam), 0.0)
        return integrate_halfline(g)

    mix_err = max(abs(mixture(float(r)) - _g_radial(float(r), c_n)) for r in radii)
    report = VerificationReport(f"example5(n={n})",
                                "max of |integral k_n - 1| and radial mixture gap",
                                max(norm_err, mix_err), 1e-7)
    return c_n, j_integral, k_n, report


# --- claim registry for batch verification ---------------------------------------

def _claim_jacobi(x=(0.25, 0.5, 1.0, 2.0, 4.0), **_):
    xs = x if isinstance(x, (list, tuple)) else [x]
    return [jacobi_check(float(v)) for v in xs]


def _claim_logistic(**_):
    return [logistic_pair().verify(LOGISTIC_GRID), ks_normalization_check(), ks_cdf_monotone_check()]


def _claim_laplace(a=1.0, **_):
    return [laplace_pair(float(a)).verify()]


def _claim_stable(A=1.0, **_):
    return _stable_checks(float(A))


def _claim_mvt(p=2.0, n=2, sample_count=1_000_000, seed=0, **_):
    mc = McSpec(int(sample_count), int(seed))
    scalar, wishart, c = mvt_pair(float(p), int(n), mc)
    radii = (0.0, 0.5, 1.0, 2.0, 3.0)
    return [scalar.verify(radii), wishart.verify(radii),
            nonidentifiability_check(float(p), int(n), radii, mc)]


def _claim_example5(n=2, **_):
    return [example5_family(int(n))[3]]


CLAIMS: dict[str, Callable[..., list]] = {
    "jacobi": _claim_jacobi,
    "logistic-ks": _claim_logistic,
    "laplace": _claim_laplace,
    "stable-half": _claim_stable,
    "mvt": _claim_mvt,
    "example5": _claim_example5,
}


def run_claim(name: str, **params) -> list[VerificationReport]:
    """Run a registered claim; unknown names raise KeyError."""
    if name not in CLAIMS:
        raise KeyError(f"unknown claim {name!r}; known: {', '.join(sorted(CLAIMS))}")
    return CLAIMS[name](**params)
