"""The Gaussian scale mixture density f of sqrt(V) Z and its L2 quantities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .exceptions import BadMeasure, McAccuracy
from .matrix_mixing import InverseWishart, MixingMeasureND
from .mixing import MixingMeasure1D
from .validation import check_grid, check_pd

__all__ = [
    "GsmDensity",
    "L2Membership",
    "density",
    "characteristic",
    "l2_membership",
    "gaussian_moment_integrals",
    "log_density_convexity_check",
    "normal_density",
]

Mixing = Union[MixingMeasure1D, MixingMeasureND]


@dataclass(frozen=True, eq=False)
class GsmDensity:
    """Density of sqrt(V) Z for V ~ ``mixing`` independent of Z ~ N(0, I_n)."""

    mixing: Mixing
    dim: int = 0

    def __post_init__(self):
        if isinstance(self.mixing, MixingMeasure1D):
            expected = 1
        elif isinstance(self.mixing, MixingMeasureND):
            expected = self.mixing.n
        else:
            raise BadMeasure(f"unsupported mixing measure {type(self.mixing).__name__}")
        if self.dim and self.dim != expected:
            raise BadMeasure(f"dim={self.dim} does not match the mixing order {expected}")
        object.__setattr__(self, "dim", expected)

    @property
    def is_scalar(self) -> bool:
        return isinstance(self.mixing, MixingMeasure1D)


class L2Membership(NamedTuple):
    member: bool
    squared_norm: float
    std_error: float = 0.0


def _density_1d(mu: MixingMeasure1D, x: float) -> float:
    x2 = float(x) * float(x)

    def g(v):
        with np.errstate(divide="ignore", over="ignore", invalid="ignore", under="ignore"):
            out = np.exp(-0.5 * x2 / v) / np.sqrt(2.0 * math.pi * v)
        return np.where((v > 0) & np.isfinite(v), out, 0.0)
    return mu.expect(g)


def density(g: GsmDensity, x, mc_tol: float | None = None) -> float:
    """f(x).

    Discrete mixing uses the exact finite sum, scalar mixing a quadrature
    over the mixing law, and inverse Wishart mixing a Monte Carlo average;
    with ``mc_tol`` set, a standard error above ``mc_tol * f(x)`` raises
    :class:`McAccuracy`.
    """
    if g.is_scalar:
        return _density_1d(g.mixing, np.ravel(x)[0] if np.ndim(x) else x)
    if isinstance(g.mixing, InverseWishart):
        est = g.mixing.density_estimate(x)
        if mc_tol is not None and est.std_error > mc_tol * abs(est.value):
            raise McAccuracy(
                f"Monte Carlo standard error {est.std_error:.3g} exceeds "
                f"{mc_tol:g} x density {est.value:.3g}"
            )
        return est.value
    return g.mixing.density(x)


def characteristic(g: GsmDensity, s) -> float:
    """E[exp(-s* V s / 2)]: the Fourier transform of f at s."""
    if g.is_scalar:
        s = float(np.ravel(s)[0]) if np.ndim(s) else float(s)
        return g.mixing.laplace(0.5 * s * s)
    return g.mixing.laplace_quadratic(s)


def l2_membership(g: GsmDensity) -> L2Membership:
    """Whether f is square integrable, with ||f||^2 = (2 pi)^(-n/2) E[det(V + V1)^(-1/2)].

    Inverse Wishart mixing with p > n/2 always yields a square-integrable
    density; the norm is then a Monte Carlo estimate.
    """
    n = g.dim
    norm = (2.0 * math.pi) ** (-0.5 * n)
    if g.is_scalar:
        pair = g.mixing.pair_resolvent(0.5)
        se = 0.0
    elif isinstance(g.mixing, InverseWishart):
        pair, se = g.mixing.pair_det_resolvent_estimate()
    else:
        pair = g.mixing.pair_det_resolvent()
        se = 0.0
    if not math.isfinite(pair):
        return L2Membership(False, math.inf, 0.0)
    return L2Membership(True, norm * pair, norm * se)


def normal_density(x, t) -> float:
    """Density of N(0, t) at x; ``t`` a positive scalar or PD matrix."""
    t = np.atleast_2d(np.asarray(t, dtype=float))
    x = np.asarray(x, dtype=float).reshape(t.shape[0])
    _, logdet = np.linalg.slogdet(t)
    quad = float(x @ np.linalg.solve(t, x))
    return math.exp(-0.5 * (t.shape[0] * math.log(2 * math.pi) + logdet + quad))


def gaussian_moment_integrals(a) -> tuple[float, np.ndarray]:
    """Closed forms of the integrals of exp(-s* A s / 2) and of
    exp(-s* A s / 2) s s* over R^n: (2 pi)^(n/2) / sqrt(det A) times
    1 and A^-1 respectively."""
    a = check_pd(a, "A")
    n = a.shape[0]
    _, logdet = np.linalg.slogdet(a)
    scalar = math.exp(0.5 * n * math.log(2 * math.pi) - 0.5 * logdet)
    inv = np.linalg.inv(a)
    return scalar, scalar * 0.5 * (inv + inv.T)


def log_density_convexity_check(g: GsmDensity, grid, tol: float = 1e-9) -> bool:
    """True iff u -> -log f(sqrt(2u)) is midpoint convex on ``grid``.

    Each consecutive pair (u_i, u_j) is checked with
    kappa((u_i + u_j)/2) <= (kappa(u_i) + kappa(u_j))/2 + tol.
    """
    if not g.is_scalar:
        raise BadMeasure("the convexity check applies to scalar mixing only")
    u = check_grid(grid, positive=True)

    def kappa(values):
        return np.array([-math.log(_density_1d(g.mixing, math.sqrt(2.0 * w))) for w in values])

    k = kappa(u)
    k_mid = kappa(0.5 * (u[:-1] + u[1:]))
    return bool(np.all(k_mid <= 0.5 * (k[:-1] + k[1:]) + tol))
