import math
import time

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gsmnormal.approx1d import (
    TARGET,
    distance_at,
    is_l2,
    objective_derivative,
    scaling_check,
    solve_t0,
    stationarity_function,
)
from gsmnormal.exceptions import Divergent, DomainError, NotL2
from gsmnormal.mixing import (
    Discrete,
    Exponential,
    GenericDensity,
    InverseGamma,
    KolmogorovSmirnov,
    Uniform,
    point_mass,
)

from oracles import (
    DIST_EXAMPLE1,
    DIST_EXPONENTIAL,
    DIST_UNIFORM,
    T0_EXAMPLE1,
    T0_EXPONENTIAL,
    T0_UNIFORM,
)

EXAMPLE1 = Discrete((1.0, 2.0), (0.5, 0.5))
# mass near zero like v^(1/8), so E[(V + V1)^(-1/2)] diverges
SPIKY = GenericDensity(lambda v: np.where(v < 1.0, 0.125 * v ** -0.875, 0.0), name="spiky")


@st.composite
def discrete_measures(draw):
    m = draw(st.integers(2, 6))
    logs = draw(st.lists(st.floats(-3.0, 3.0), min_size=m, max_size=m, unique=True))
    values = np.sort(np.exp(logs))
    if np.any(np.diff(values) <= 1e-9 * values[1:]):
        values = np.exp(np.linspace(-1.0, 1.0, m))
    raw = np.array(draw(st.lists(st.floats(0.05, 1.0), min_size=m, max_size=m)))
    return Discrete(tuple(values), tuple(raw / raw.sum()))


class TestSolve:
    @pytest.mark.parametrize("mu,t0,dist", [
        (EXAMPLE1, T0_EXAMPLE1, DIST_EXAMPLE1),
        (Uniform(0.0, 1.0), T0_UNIFORM, DIST_UNIFORM),
        (Exponential(1.0), T0_EXPONENTIAL, DIST_EXPONENTIAL),
    ], ids=["example1", "uniform", "exponential"])
    def test_against_oracles(self, mu, t0, dist):
        res = solve_t0(mu)
        assert res.t0 == pytest.approx(t0, rel=1e-9)
        assert res.distance_corrected == pytest.approx(dist, abs=1e-8)
        assert res.distance_paper_convention == 2.0 * res.distance_corrected
        assert res.y0 == pytest.approx(1.0 / res.t0)

    def test_point_mass(self):
        res = solve_t0(point_mass(2.0))
        assert res.t0 == 2.0
        assert res.distance_corrected == 0.0

    def test_infinite_mean(self):
        mu = InverseGamma(0.5, 0.5)
        res = solve_t0(mu)
        assert res.mean_V == math.inf
        assert abs(stationarity_function(mu)(res.t0)) < 1e-10

    def test_kolmogorov_smirnov(self):
        res = solve_t0(KolmogorovSmirnov())
        assert abs(stationarity_function(KolmogorovSmirnov())(res.t0)) < 1e-10
        assert res.t0 < math.pi ** 2 / 3

    def test_not_l2(self):
        assert not is_l2(SPIKY)
        with pytest.raises(NotL2):
            solve_t0(SPIKY)

    def test_dict_keys(self):
        d = solve_t0(EXAMPLE1).as_dict()
        assert set(d) == {"t0", "y0", "distance_corrected", "distance_paper_convention",
                          "mean_V", "residual", "bracket_iterations"}

    def test_fast(self):
        start = time.perf_counter()
        solve_t0(EXAMPLE1)
        assert time.perf_counter() - start < 0.1


class TestDistance:
    def test_degenerate_limit(self):
        # point mass at 1, t -> infinity: the distance tends to ||phi_1||^2
        d, _ = distance_at(point_mass(1.0), 1e12)
        assert d == pytest.approx(1.0 / (2.0 * math.sqrt(math.pi)), rel=1e-5)

    def test_zero_at_point_mass(self):
        assert distance_at(point_mass(1.5), 1.5)[0] == 0.0

    def test_domain(self):
        with pytest.raises(DomainError):
            distance_at(EXAMPLE1, 0.0)

    def test_divergent(self):
        with pytest.raises(Divergent):
            distance_at(SPIKY, 1.0)

    @pytest.mark.parametrize("mu", [EXAMPLE1, Uniform(0.0, 1.0), Exponential(1.0)],
                             ids=["example1", "uniform", "exponential"])
    @pytest.mark.parametrize("t", [0.2, 0.8, 3.0])
    def test_derivative_matches_finite_difference(self, mu, t):
        h = 1e-5 * t
        fd = (distance_at(mu, t + h)[0] - distance_at(mu, t - h)[0]) / (2 * h)
        assert objective_derivative(mu, t) == pytest.approx(fd, rel=1e-5, abs=1e-10)


class TestScaling:
    @pytest.mark.parametrize("mu", [EXAMPLE1, Uniform(0.0, 1.0), Exponential(1.0), KolmogorovSmirnov()],
                             ids=["example1", "uniform", "exponential", "ks"])
    @pytest.mark.parametrize("factor", [0.5, 3.0])
    def test_scaling(self, mu, factor):
        report = scaling_check(mu, factor)
        assert report.passed, report


class TestProperties:
    @given(discrete_measures())
    def test_jensen(self, mu):
        assert solve_t0(mu).t0 <= mu.mean() + 1e-12

    @given(discrete_measures())
    def test_local_minimum(self, mu):
        res = solve_t0(mu)
        for eps in (1e-3, 1e-2, 1e-1):
            for s in (-1.0, 1.0):
                assert distance_at(mu, res.t0 * (1 + s * eps))[0] >= res.distance_corrected

    @given(discrete_measures())
    def test_single_sign_change(self, mu):
        g = stationarity_function(mu)
        mean_v = mu.mean()
        grid = np.geomspace(min(1e-8, 1e-3 * mean_v), mean_v, 200)
        signs = np.sign([g(t) for t in grid])
        signs = signs[signs != 0]
        assert np.count_nonzero(np.diff(signs)) == 1

    @given(discrete_measures())
    def test_residual(self, mu):
        res = solve_t0(mu)
        assert abs(mu.f_profile(1.0 / res.t0) - TARGET) <= 1e-10


class TestDerivativeExamples:
    def test_zero_at_point_mass(self):
        assert objective_derivative(point_mass(2.0), 2.0) == pytest.approx(0.0, abs=1e-16)

    def test_signs(self):
        assert objective_derivative(EXAMPLE1, 1.0) < 0
        assert objective_derivative(EXAMPLE1, 2.0) > 0

    @pytest.mark.parametrize("mu", [EXAMPLE1, Uniform(0.0, 1.0), Exponential(1.0)],
                             ids=["example1", "uniform", "exponential"])
    def test_consistency_around_root(self, mu):
        t0 = solve_t0(mu).t0
        for t in (0.5 * t0, 2.0 * t0):
            h = 1e-4 * t
            fd = (distance_at(mu, t + h)[0] - distance_at(mu, t - h)[0]) / (2 * h)
            assert objective_derivative(mu, t) == pytest.approx(fd, rel=1e-6)
        # the derivative vanishes at t0, so only an absolute bound is meaningful there
        h = 1e-5 * t0
        fd = (distance_at(mu, t0 + h)[0] - distance_at(mu, t0 - h)[0]) / (2 * h)
        assert abs(objective_derivative(mu, t0) - fd) <= 1e-9


def test_scaling_example1_by_four():
    report = scaling_check(EXAMPLE1, 4.0)
    assert report.t0_scaled == pytest.approx(4 * T0_EXAMPLE1, rel=1e-10)
    # 5.57108 is 4 x the five-digit root, so the root tolerance scales by 4
    assert report.t0_scaled == pytest.approx(5.57108, abs=4e-4)
    assert report.distance_scaled == pytest.approx(0.5 * report.distance, rel=1e-8)


def test_scaling_point_mass():
    report = scaling_check(point_mass(1.0), 3.0)
    assert report.t0_scaled == 3.0 and report.distance_scaled == 0.0
