import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gsmnormal.exceptions import BadMeasure, DomainError, NotPD, Unsupported
from gsmnormal.matrix_mixing import (
    DiscreteMatrix,
    InverseWishart,
    ScalarMatrix,
    sample_inverse_wishart,
    sample_wishart,
)
from gsmnormal.mixing import (
    Discrete,
    Exponential,
    GenericDensity,
    InverseGamma,
    KolmogorovSmirnov,
    Uniform,
    f_profile,
    ks_cdf,
    ks_density,
    laplace,
    mean,
    pair_resolvent,
    pair_resolvent_half,
    point_mass,
    resolvent_moment,
    sample,
)
from gsmnormal.numerics import McSpec, make_rng

from oracles import (
    KS_CDF_1,
    PAIR_EXAMPLE1,
    PAIR_IG_QUARTER,
    PAIR_UNIFORM,
    RESOLVENT_EXP_0524,
)

EXAMPLE1 = Discrete((1.0, 2.0), (0.5, 0.5))

MEASURES = [
    EXAMPLE1,
    Uniform(0.0, 1.0),
    Uniform(0.5, 2.0),
    Exponential(1.0),
    InverseGamma(1.5, 0.7),
    KolmogorovSmirnov(),
]


class TestConstruction:
    @pytest.mark.parametrize("values,weights", [
        ((), ()), ((1.0, -1.0), (0.5, 0.5)), ((2.0, 1.0), (0.5, 0.5)), ((1.0, 2.0), (0.5, 0.6)),
    ])
    def test_discrete_rejects(self, values, weights):
        with pytest.raises(BadMeasure):
            Discrete(values, weights)

    def test_from_atoms_sorts(self):
        mu = Discrete.from_atoms([(2.0, 0.25), (1.0, 0.75)])
        assert mu.values == (1.0, 2.0)
        assert mu.weights == (0.75, 0.25)

    def test_uniform_rejects(self):
        with pytest.raises(BadMeasure):
            Uniform(1.0, 1.0)

    def test_generic_must_normalize(self):
        with pytest.raises(BadMeasure):
            GenericDensity(lambda v: 2.0 * np.exp(-v))

    def test_point_mass(self):
        assert point_mass(3.0).is_point_mass
        with pytest.raises(DomainError):
            point_mass(0.0)


class TestFunctionals:
    def test_laplace_examples(self):
        assert laplace(EXAMPLE1, 0.0) == 1.0
        assert laplace(EXAMPLE1, 1.0) == pytest.approx(0.5 * (math.exp(-1) + math.exp(-2)), rel=1e-15)
        assert laplace(Exponential(1.0), 1.0) == pytest.approx(0.5, rel=1e-15)

    @pytest.mark.parametrize("mu", MEASURES[1:], ids=lambda m: type(m).__name__)
    def test_laplace_override_matches_quadrature(self, mu):
        for u in (0.1, 1.0, 5.0):
            direct = mu.expect(lambda v: np.exp(-u * v))
            assert mu.laplace(u) == pytest.approx(direct, rel=1e-10)

    def test_means(self):
        assert mean(EXAMPLE1) == 1.5
        assert mean(Uniform(0.0, 1.0)) == 0.5
        assert mean(InverseGamma(0.5, 0.5)) == math.inf
        assert mean(KolmogorovSmirnov()) == pytest.approx(KolmogorovSmirnov().expect(lambda v: v), rel=1e-10)

    def test_resolvent_against_oracle(self):
        assert resolvent_moment(Exponential(1.0), 0.524, 1.5) == pytest.approx(RESOLVENT_EXP_0524, rel=1e-12)

    def test_f_profile_point_mass(self):
        assert f_profile(point_mass(2.0), 0.5) == pytest.approx(2.0 ** -1.5, rel=1e-15)
        assert f_profile(EXAMPLE1, 0.0) == 1.0

    def test_pair_examples(self):
        assert pair_resolvent_half(EXAMPLE1) == pytest.approx(PAIR_EXAMPLE1, rel=1e-14)
        assert pair_resolvent_half(Uniform(0.0, 1.0)) == pytest.approx(PAIR_UNIFORM, rel=1e-10)
        assert pair_resolvent_half(Exponential(1.0)) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-10)

    def test_inverse_gamma_quarter_is_finite(self):
        assert pair_resolvent_half(InverseGamma(0.25, 0.5)) == pytest.approx(PAIR_IG_QUARTER, rel=1e-9)

    def test_divergent_pair(self):
        assert pair_resolvent(Uniform(0.0, 1.0), 2.0) == math.inf

    @pytest.mark.parametrize("mu", MEASURES, ids=lambda m: type(m).__name__)
    def test_f_profile_decreasing(self, mu):
        ys = np.geomspace(1e-3, 1e3, 25)
        vals = np.array([mu.f_profile(y) for y in ys])
        assert np.all(np.diff(vals) < 0)
        assert np.all((vals > 0) & (vals < 1))

    @given(st.floats(0.01, 50.0), st.floats(0.25, 3.0))
    def test_resolvent_decreasing_in_t(self, t, q):
        mu = Exponential(1.0)
        assert mu.resolvent_moment(t * 1.1, q) < mu.resolvent_moment(t, q)


class TestDiscreteClosedForms:
    @given(st.lists(st.floats(0.05, 20.0), min_size=2, max_size=5, unique=True), st.floats(0.05, 10.0))
    def test_closed_form_vs_quadrature(self, values, t):
        values = sorted(values)
        if np.any(np.diff(values) <= 1e-9):
            return
        mu = Discrete(tuple(values), tuple(np.full(len(values), 1 / len(values))))
        direct = sum((t + v) ** -1.5 for v in values) / len(values)
        assert mu.resolvent_moment(t, 1.5) == pytest.approx(direct, rel=1e-12)

    def test_generic_density_matches_uniform(self):
        u = Uniform(0.0, 1.0)
        generic = GenericDensity(lambda v: np.where(v < 1.0, 1.0, 0.0) * (v > 0))
        assert generic.resolvent_moment(0.3, 1.5) == pytest.approx(u.resolvent_moment(0.3, 1.5), rel=1e-10)


class TestCompleteMonotonicity:
    @pytest.mark.parametrize("mu", MEASURES, ids=lambda m: type(m).__name__)
    def test_finite_differences_alternate(self, mu):
        h = 0.25
        vals = np.array([mu.laplace(k * h) for k in range(6)])
        for order in range(1, 4):
            diffs = np.diff(vals, n=order)
            assert np.all((-1) ** order * diffs >= -1e-13)


class TestKolmogorovSmirnov:
    def test_cdf_at_one(self):
        assert ks_cdf(np.array([1.0]))[0] == pytest.approx(KS_CDF_1, rel=1e-12)

    def test_series_switch_continuous(self):
        lam = np.array([1.0 - 1e-12, 1.0 + 1e-12])
        assert abs(np.diff(ks_density(lam))[0]) < 1e-9
        assert abs(np.diff(ks_cdf(lam))[0]) < 1e-11

    def test_ecdf_at_one(self):
        draws = sample(KolmogorovSmirnov(), McSpec(200_000, 3))
        frac = float(np.mean(draws <= 1.0))
        se = math.sqrt(KS_CDF_1 * (1 - KS_CDF_1) / draws.size)
        assert abs(frac - KS_CDF_1) <= 4 * se


class TestSampling:
    @pytest.mark.parametrize("mu", [EXAMPLE1, Uniform(0.0, 2.0), Exponential(2.0), InverseGamma(3.0, 2.0)],
                             ids=lambda m: type(m).__name__)
    def test_sample_mean(self, mu):
        draws = sample(mu, McSpec(200_000, 11))
        se = draws.std() / math.sqrt(draws.size)
        assert abs(draws.mean() - mu.mean()) <= 4 * se

    def test_deterministic(self):
        spec = McSpec(1000, 5)
        np.testing.assert_array_equal(sample(Exponential(1.0), spec), sample(Exponential(1.0), spec))

    def test_generic_has_no_sampler(self):
        with pytest.raises(Unsupported):
            sample(GenericDensity(lambda v: np.exp(-v)), McSpec(10, 0))


class TestScaling:
    @pytest.mark.parametrize("mu", MEASURES, ids=lambda m: type(m).__name__)
    def test_scaled_laplace(self, mu):
        c = 2.5
        assert mu.scaled(c).laplace(0.4) == pytest.approx(mu.laplace(0.4 * c), rel=1e-9)


class TestMatrixMixing:
    def test_discrete_matrix_rejects_non_pd(self):
        with pytest.raises(NotPD):
            DiscreteMatrix(np.array([[[1.0, 2.0], [2.0, 1.0]]]), np.ones(1))

    def test_scalar_matrix_resolvent_identity(self):
        mu = ScalarMatrix(Exponential(1.0), 2)
        m = mu.resolvent_matrix(0.7 * np.eye(2))
        assert m[0, 0] == pytest.approx(Exponential(1.0).resolvent_moment(0.7, 2.0), rel=1e-12)
        assert m[0, 1] == 0.0

    def test_scalar_matrix_general_t(self):
        mu = ScalarMatrix(EXAMPLE1, 2)
        t = np.array([[1.0, 0.3], [0.3, 2.0]])
        direct = sum(0.5 * np.linalg.inv(lam * np.eye(2) + t) / math.sqrt(np.linalg.det(lam * np.eye(2) + t))
                     for lam in (1.0, 2.0))
        np.testing.assert_allclose(mu.resolvent_matrix(t), direct, rtol=1e-10)

    def test_discrete_matrix_matches_scalar(self):
        dm = DiscreteMatrix(np.stack([np.eye(3), 2 * np.eye(3)]), np.array([0.5, 0.5]))
        sm = ScalarMatrix(EXAMPLE1, 3)
        t = np.diag([0.5, 1.0, 1.5])
        np.testing.assert_allclose(dm.resolvent_matrix(t), sm.resolvent_matrix(t), rtol=1e-10)
        assert dm.pair_det_resolvent() == pytest.approx(sm.pair_det_resolvent(), rel=1e-12)

    def test_wishart_mean(self):
        draws = sample_wishart(5.0, 3, make_rng(1), 100_000)
        np.testing.assert_allclose(draws.mean(axis=0), 5.0 * np.eye(3), atol=0.05)

    def test_inverse_wishart_mean(self):
        p, n = 4.0, 2
        draws = sample_inverse_wishart(p, n, McSpec(200_000, 2))
        mu = InverseWishart(p, n, McSpec(10, 0))
        np.testing.assert_allclose(draws.mean(axis=0), mu.mean(), atol=0.01)

    def test_inverse_wishart_domain(self):
        with pytest.raises(DomainError):
            InverseWishart(1.0, 2)
