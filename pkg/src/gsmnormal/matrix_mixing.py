"""Mixing measures on the cone of positive definite matrices.

Three kinds are supported: finitely many matrix atoms, scalar multiples
Lambda * I_n of the identity with Lambda drawn from a scalar law, and the
inverse Wishart law whose inverse Y has density proportional to
det(y)^(p - 1/2 - (n+1)/2) exp(-tr(y)/2).  The inverse Wishart kind is
handled by seeded Monte Carlo over a fixed batch of draws.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .exceptions import BadMeasure, DomainError
from .mixing import MixingMeasure1D
from .numerics import McSpec, make_rng
from .validation import check_pd, check_pd_stack, check_weights

__all__ = [
    "Estimate",
    "MixingMeasureND",
    "DiscreteMatrix",
    "ScalarMatrix",
    "InverseWishart",
    "sample_wishart",
    "sample_inverse_wishart",
]


class Estimate(NamedTuple):
    value: float
    std_error: float


def _is_scalar_identity(t: np.ndarray) -> bool:
    return bool(np.array_equal(t, t[0, 0] * np.eye(t.shape[0])))


class MixingMeasureND:
    """Base class for laws of a random PD matrix V of order ``n``."""

    n: int

    def resolvent_matrix(self, t: np.ndarray) -> np.ndarray:
        """M(t) = E[(V + t)^-1 det(V + t)^(-1/2)]."""
        raise NotImplementedError

    def det_resolvent(self, t: np.ndarray) -> float:
        """E[det(V + t)^(-1/2)]."""
        raise NotImplementedError

    def pair_det_resolvent(self) -> float:
        """E[det(V + V1)^(-1/2)] for independent copies; ``inf`` if divergent."""
        raise NotImplementedError

    def laplace_quadratic(self, s) -> float:
        """E[exp(-s* V s / 2)], the characteristic function of the mixture."""
        raise NotImplementedError

    def density(self, x) -> float:
        raise NotImplementedError

    def mean(self):
        """E[V] as a matrix, or ``None`` when it does not exist."""
        raise NotImplementedError

    def initial_guess(self) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class DiscreteMatrix(MixingMeasureND):
    """Finitely many PD atoms v_i of a common order with probabilities p_i."""

    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=float)
        if atoms.ndim == 2:
            atoms = atoms[None]
        atoms = check_pd_stack(atoms)
        weights = check_weights(self.weights, atoms.shape[0])
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "n", atoms.shape[1])

    @classmethod
    def point_mass(cls, v) -> "DiscreteMatrix":
        return cls(np.asarray(v, dtype=float)[None], np.ones(1))

    @property
    def is_point_mass(self) -> bool:
        return self.atoms.shape[0] == 1

    def _shifted(self, t):
        t = check_pd(t, "t")
        if t.shape != (self.n, self.n):
            raise DomainError(f"t must have order {self.n}")
        return self.atoms + t

    def resolvent_matrix(self, t):
        s = self._shifted(t)
        _, logdet = np.linalg.slogdet(s)
        scale = self.weights * np.exp(-0.5 * logdet)
        m = np.einsum("k,kij->ij", scale, np.linalg.inv(s))
        return 0.5 * (m + m.T)

    def det_resolvent(self, t):
        _, logdet = np.linalg.slogdet(self._shifted(t))
        return float(np.dot(self.weights, np.exp(-0.5 * logdet)))

    def pair_det_resolvent(self):
        total = 0.0
        chunk = max(1, 200_000 // max(1, self.atoms.shape[0]))
        for start in range(0, self.atoms.shape[0], chunk):
            block = self.atoms[start:start + chunk, None] + self.atoms[None, :]
            _, logdet = np.linalg.slogdet(block)
            total += float(self.weights[start:start + chunk] @ np.exp(-0.5 * logdet) @ self.weights)
        return total

    def laplace_quadratic(self, s):
        s = np.asarray(s, dtype=float).reshape(self.n)
        quad = np.einsum("i,kij,j->k", s, self.atoms, s)
        return float(np.dot(self.weights, np.exp(-0.5 * quad)))

    def density(self, x):
        x = np.asarray(x, dtype=float).reshape(self.n)
        _, logdet = np.linalg.slogdet(self.atoms)
        quad = np.einsum("i,kij,j->k", x, np.linalg.inv(self.atoms), x)
        logf = -0.5 * (self.n * math.log(2 * math.pi) + logdet + quad)
        return float(np.dot(self.weights, np.exp(logf)))

    def mean(self):
        return np.einsum("k,kij->ij", self.weights, self.atoms)

    def initial_guess(self):
        return self.mean()

    def congruent(self, u) -> "DiscreteMatrix":
        """The law of u V u* for a square matrix u."""
        u = np.asarray(u, dtype=float)
        return DiscreteMatrix(u @ self.atoms @ u.T, self.weights)


@dataclass(frozen=True, eq=False)
class ScalarMatrix(MixingMeasureND):
    """V = Lambda * I_n with Lambda ~ nu."""

    nu: MixingMeasure1D
    n: int = 1

    def __post_init__(self):
        if int(self.n) < 1:
            raise BadMeasure("order n must be at least 1")
        object.__setattr__(self, "n", int(self.n))

    def _check_t(self, t):
        t = check_pd(t, "t")
        if t.shape != (self.n, self.n):
            raise DomainError(f"t must have order {self.n}")
        return t

    def resolvent_matrix(self, t):
        t = self._check_t(t)
        n = self.n
        if _is_scalar_identity(t):
            return self.nu.resolvent_moment(t[0, 0], 1.0 + 0.5 * n) * np.eye(n)
        d, u = np.linalg.eigh(t)

        def column(j):
            def g(lam):
                lam = np.asarray(lam)
                return np.prod((lam[..., None] + d) ** -0.5, axis=-1) / (lam + d[j])
            return self.nu.expect(g)
        diag = np.array([column(j) for j in range(n)])
        m = (u * diag) @ u.T
        return 0.5 * (m + m.T)

    def det_resolvent(self, t):
        d = np.linalg.eigvalsh(self._check_t(t))
        if np.all(d == d[0]):
            return self.nu.resolvent_moment(d[0], 0.5 * self.n)
        return self.nu.expect(lambda lam: np.prod((np.asarray(lam)[..., None] + d) ** -0.5, axis=-1))

    def pair_det_resolvent(self):
        return self.nu.pair_resolvent(0.5 * self.n)

    def laplace_quadratic(self, s):
        s = np.asarray(s, dtype=float).reshape(self.n)
        return self.nu.laplace(0.5 * float(s @ s))

    def radial_density(self, r: float) -> float:
        r2 = float(r) ** 2
        n = self.n

        def g(lam):
            with np.errstate(divide="ignore", over="ignore", invalid="ignore", under="ignore"):
                out = np.exp(-0.5 * r2 / lam - 0.5 * n * np.log(2 * math.pi * lam))
            return np.where(lam > 0, out, 0.0)
        return self.nu.expect(g)

    def density(self, x):
        x = np.asarray(x, dtype=float).reshape(self.n)
        return self.radial_density(math.sqrt(float(x @ x)))

    def mean(self):
        m = self.nu.mean()
        return None if not math.isfinite(m) else m * np.eye(self.n)

    def initial_guess(self):
        m = self.nu.mean()
        return (m if math.isfinite(m) else self.nu.median()) * np.eye(self.n)


def sample_wishart(df: float, n: int, rng: np.random.Generator, size: int) -> np.ndarray:
    """Bartlett construction of Wishart(df, I_n) draws.

    Y = A A* with A lower triangular, A_ii = sqrt(chi2(df - i)) for
    i = 0..n-1 and standard normal entries below the diagonal.
    """
    if not df > n - 1:
        raise DomainError(f"Wishart needs df > n - 1, got df={df}, n={n}")
    a = np.zeros((size, n, n))
    for i in range(n):
        a[:, i, i] = np.sqrt(rng.chisquare(df - i, size))
        if i:
            a[:, i, :i] = rng.standard_normal((size, i))
    return a @ np.swapaxes(a, 1, 2)


def _wishart_df(p: float, n: int) -> float:
    # exponent of det(y) is (df - n - 1)/2 = p - 1/2 - (n + 1)/2
    return 2.0 * p - 1.0


def sample_inverse_wishart(p: float, n: int, spec: McSpec) -> np.ndarray:
    """Seeded draws of V whose inverse has density proportional to
    det(y)^(p - 1/2 - (n+1)/2) exp(-tr(y)/2); needs p > n/2."""
    n = int(n)
    if not p > 0.5 * n:
        raise DomainError(f"inverse Wishart mixing needs p > n/2, got p={p}, n={n}")
    y = sample_wishart(_wishart_df(p, n), n, make_rng(spec.seed), int(spec.sample_count))
    return np.linalg.inv(y)


@dataclass(frozen=True, eq=False)
class InverseWishart(MixingMeasureND):
    """The matrix mixing law producing C / (1 + |x|^2)^p.

    All functionals are Monte Carlo averages over one seeded batch of
    ``mc.sample_count`` draws, so repeated calls share random numbers.
    """

    p: float
    n: int = 1
    mc: McSpec = field(default_factory=McSpec)

    def __post_init__(self):
        object.__setattr__(self, "n", int(self.n))
        if not self.p > 0.5 * self.n:
            raise DomainError(f"inverse Wishart mixing needs p > n/2, got p={self.p}, n={self.n}")

    @property
    def df(self) -> float:
        return _wishart_df(self.p, self.n)

    @functools.cached_property
    def precision_draws(self) -> np.ndarray:
        """The Wishart draws Y = V^-1."""
        return sample_wishart(self.df, self.n, make_rng(self.mc.seed), int(self.mc.sample_count))

    @functools.cached_property
    def draws(self) -> np.ndarray:
        v = np.linalg.inv(self.precision_draws)
        return 0.5 * (v + np.swapaxes(v, 1, 2))

    @functools.cached_property
    def empirical(self) -> DiscreteMatrix:
        """The draws as an equally weighted discrete measure."""
        m = self.draws.shape[0]
        return DiscreteMatrix(self.draws, np.full(m, 1.0 / m))

    def resolvent_matrix(self, t):
        return self.empirical.resolvent_matrix(t)

    def det_resolvent(self, t):
        return self.det_resolvent_estimate(t).value

    def det_resolvent_estimate(self, t) -> Estimate:
        _, logdet = np.linalg.slogdet(self.empirical._shifted(t))
        return _estimate(np.exp(-0.5 * logdet))

    def pair_det_resolvent(self):
        return self.pair_det_resolvent_estimate().value

    def pair_det_resolvent_estimate(self) -> Estimate:
        half = self.draws.shape[0] // 2
        if half == 0:
            raise DomainError("need at least two draws for a pair estimate")
        _, logdet = np.linalg.slogdet(self.draws[:half] + self.draws[half:2 * half])
        return _estimate(np.exp(-0.5 * logdet))

    def laplace_quadratic(self, s):
        s = np.asarray(s, dtype=float).reshape(self.n)
        return _estimate(np.exp(-0.5 * np.einsum("i,kij,j->k", s, self.draws, s))).value

    def density_estimate(self, x) -> Estimate:
        x = np.asarray(x, dtype=float).reshape(self.n)
        y = self.precision_draws
        _, logdet = np.linalg.slogdet(y)
        quad = np.einsum("i,kij,j->k", x, y, x)
        vals = np.exp(0.5 * logdet - 0.5 * quad - 0.5 * self.n * math.log(2 * math.pi))
        return _estimate(vals)

    def density(self, x):
        return self.density_estimate(x).value

    def mean(self):
        # E[V] = I / (df - n - 1) for df > n + 1
        extra = self.df - self.n - 1
        return np.eye(self.n) / extra if extra > 0 else None

    def initial_guess(self):
        traces = np.trace(self.draws, axis1=1, axis2=2)
        return float(np.median(traces)) / self.n * np.eye(self.n)


def _estimate(values: np.ndarray) -> Estimate:
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return Estimate(float(values.mean()), 0.0)
    return Estimate(float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size)))
