import numpy as np
import pytest
from scipy import stats
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from gsmnormal import BestNormalApproximation
from gsmnormal.exceptions import BadMeasure
from gsmnormal.matrix_mixing import ScalarMatrix
from gsmnormal.mixing import Discrete, Exponential

from oracles import DIST_EXAMPLE1, T0_EXAMPLE1, T0_EXPONENTIAL, TAU_EXAMPLE1_N2


def test_fit_variance_samples():
    est = BestNormalApproximation().fit(np.array([1.0, 2.0, 2.0, 1.0]))
    assert est.t0_.shape == (1, 1)
    assert est.t0_[0, 0] == pytest.approx(T0_EXAMPLE1, rel=1e-10)
    assert est.distance_ == pytest.approx(DIST_EXAMPLE1, abs=1e-10)
    assert est.distance_paper_convention_ == 2 * est.distance_


def test_sample_weight_equivalent():
    a = BestNormalApproximation().fit(np.array([1.0, 2.0]), sample_weight=[1.0, 3.0])
    b = BestNormalApproximation().fit(Discrete((1.0, 2.0), (0.25, 0.75)))
    assert a.t0_[0, 0] == pytest.approx(b.t0_[0, 0], rel=1e-14)


def test_fit_measure():
    est = BestNormalApproximation().fit(Exponential(1.0))
    assert est.t0_[0, 0] == pytest.approx(T0_EXPONENTIAL, rel=1e-9)


def test_fit_matrix_stack():
    stack = np.stack([np.eye(2), 2 * np.eye(2)])
    est = BestNormalApproximation().fit(stack)
    np.testing.assert_allclose(est.t0_, TAU_EXAMPLE1_N2 * np.eye(2), rtol=1e-9)
    assert est.minimality_certified_
    assert est.n_features_in_ == 2


def test_fit_scalar_matrix_measure():
    est = BestNormalApproximation().fit(ScalarMatrix(Discrete((1.0, 2.0), (0.5, 0.5)), 2))
    np.testing.assert_allclose(est.t0_, TAU_EXAMPLE1_N2 * np.eye(2), rtol=1e-8)


def test_transform_whitens():
    stack = np.array([[[2.0, 0.5], [0.5, 1.0]], [[1.0, -0.3], [-0.3, 3.0]]])
    est = BestNormalApproximation().fit(stack)
    x = est.sample(50_000, random_state=1)
    z = est.transform(x)
    np.testing.assert_allclose(np.cov(z.T), np.eye(2), atol=0.03)


def test_score_samples_is_normal_logpdf():
    est = BestNormalApproximation().fit(np.array([1.0, 2.0]))
    x = np.array([[0.0], [1.5], [-2.0]])
    ref = stats.norm(scale=np.sqrt(est.t0_[0, 0])).logpdf(x[:, 0])
    np.testing.assert_allclose(est.score_samples(x), ref, rtol=1e-13)
    assert est.score(x) == pytest.approx(ref.mean())


def test_not_fitted():
    with pytest.raises(NotFittedError):
        BestNormalApproximation().transform(np.zeros((1, 1)))


def test_wrong_width():
    est = BestNormalApproximation().fit(np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        est.transform(np.zeros((3, 2)))


def test_rejects_bad_input():
    with pytest.raises(BadMeasure):
        BestNormalApproximation().fit(np.ones((3, 2)))
    with pytest.raises(BadMeasure):
        BestNormalApproximation().fit(np.array([1.0, 2.0]), sample_weight=[1.0, -1.0])
    with pytest.raises(BadMeasure):
        BestNormalApproximation().fit(Exponential(1.0), sample_weight=[1.0])


def test_params_and_clone():
    est = BestNormalApproximation(tol=1e-9, max_iter=50, random_state=3)
    assert est.get_params() == {"tol": 1e-9, "max_iter": 50, "random_state": 3}
    twin = clone(est)
    assert twin.get_params() == est.get_params()
    assert not hasattr(twin, "t0_")


def test_sample_deterministic():
    est = BestNormalApproximation(random_state=5).fit(np.array([1.0, 2.0]))
    np.testing.assert_array_equal(est.sample(10), est.sample(10))
