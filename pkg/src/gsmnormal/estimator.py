"""Estimator-style wrapper around the 1-D and n-D solvers."""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .approx1d import solve_t0
from .approxnd import solve_t0_nd
from .exceptions import BadMeasure
from .matrix_mixing import DiscreteMatrix, MixingMeasureND
from .mixing import Discrete, MixingMeasure1D
from .numerics import make_rng
from .validation import check_pd_stack

__all__ = ["BestNormalApproximation"]


def _as_measure(X, sample_weight=None):
    """Turn fit input into a mixing measure.

    Accepted: a measure instance, a 1-D array (or one column) of positive
    variances, or an (m, n, n) stack of PD variance matrices.  Arrays are
    read as equally weighted atoms unless ``sample_weight`` is given.
    """
    if isinstance(X, (MixingMeasure1D, MixingMeasureND)):
        if sample_weight is not None:
            raise BadMeasure("sample_weight cannot be combined with a measure instance")
        return X
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 3:
        stack = check_pd_stack(arr)
        w = np.ones(stack.shape[0]) if sample_weight is None else np.asarray(sample_weight, dtype=float)
        return DiscreteMatrix(stack, w / w.sum())
    arr = check_array(arr.reshape(-1, 1) if arr.ndim == 1 else arr, ensure_2d=True)
    if arr.shape[1] != 1:
        raise BadMeasure("variance samples must be one column or an (m, n, n) stack")
    v = arr[:, 0]
    w = np.ones_like(v) if sample_weight is None else np.asarray(sample_weight, dtype=float).ravel()
    if w.shape != v.shape or np.any(w <= 0):
        raise BadMeasure("sample_weight must be positive with one entry per sample")
    values, inverse = np.unique(v, return_inverse=True)
    merged = np.bincount(inverse, weights=w)
    return Discrete(tuple(values), tuple(merged / merged.sum()))


class BestNormalApproximation(TransformerMixin, BaseEstimator):
    """Best L2 centered normal approximation N(0, t0) of a scale mixture.

    ``fit`` takes the mixing law of V (see :func:`_as_measure`).  After
    fitting, ``t0_`` is the (n, n) covariance, ``transform`` whitens points
    by t0^(-1/2) and ``score_samples`` gives the N(0, t0) log density.
    """

    def __init__(self, tol: float = 1e-10, max_iter: int = 500, random_state: int = 0):
        self.tol = tol
        self.max_iter = max_iter
        self.random_state = random_state

    def fit(self, X, y=None, sample_weight=None):
        mu = _as_measure(X, sample_weight)
        if isinstance(mu, MixingMeasure1D):
            res = solve_t0(mu, tol=self.tol)
            self.t0_ = np.array([[res.t0]])
            self.distance_ = res.distance_corrected
            self.distance_paper_convention_ = res.distance_paper_convention
            self.n_iter_ = res.bracket_iterations
            self.residual_ = res.residual
        else:
            res = solve_t0_nd(mu, tol=self.tol, max_iter=self.max_iter, seed=self.random_state)
            self.t0_ = res.t0
            self.distance_ = res.distance_corrected
            self.n_iter_ = res.iterations
            self.residual_ = res.residual
            self.minimality_certified_ = res.minimality_certified
        self.mixing_ = mu
        self.y0_ = np.linalg.inv(self.t0_)
        self.n_features_in_ = self.t0_.shape[0]
        d, u = np.linalg.eigh(self.t0_)
        self._whitener = (u / np.sqrt(d)) @ u.T
        return self

    def _points(self, X):
        check_is_fitted(self, "t0_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return X

    def transform(self, X):
        return self._points(X) @ self._whitener

    def score_samples(self, X):
        X = self._points(X)
        n = self.n_features_in_
        _, logdet = np.linalg.slogdet(self.t0_)
        quad = np.einsum("ij,jk,ik->i", X, self.y0_, X)
        return -0.5 * (n * math.log(2.0 * math.pi) + logdet + quad)

    def score(self, X, y=None):
        return float(np.mean(self.score_samples(X)))

    def sample(self, n_samples: int = 1, random_state=None):
        check_is_fitted(self, "t0_")
        seed = self.random_state if random_state is None else random_state
        rng = make_rng(int(seed))
        return rng.multivariate_normal(np.zeros(self.n_features_in_), self.t0_, size=int(n_samples))
