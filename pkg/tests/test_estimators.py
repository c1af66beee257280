import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from growthfit import distributions as dist
from growthfit.distributions import ModelSpec, StudentTParams
from growthfit.estimators import ExponentialTails, GrowthRateDistribution, LogGrowthTransformer, check_rates
from growthfit.selection import aic


@pytest.fixture(scope="module")
def t_sample():
    return dist.draw(ModelSpec.from_label("student_t"), StudentTParams(0.05, 0.1, 4.0), 3000,
                     np.random.default_rng(0)).values


def test_check_rates_shapes():
    assert check_rates([[0.1], [0.2]]).shape == (2,)
    with pytest.raises(ValueError):
        check_rates(np.zeros((3, 2)))
    with pytest.raises(ValueError):
        check_rates([0.1, np.nan])


class TestGrowthRateDistribution:
    def test_params_and_clone(self):
        est = GrowthRateDistribution(family="asub", n_starts=3, random_state=7)
        params = est.get_params()
        assert params["family"] == "asub" and params["n_starts"] == 3
        twin = clone(est)
        assert twin.get_params() == params and twin is not est

    def test_fit_and_score(self, t_sample):
        est = GrowthRateDistribution(n_starts=2).fit(t_sample)
        assert est.converged_
        assert est.params_.nu == pytest.approx(4.0, rel=0.3)
        assert est.n_parameters_ == 3
        ll = est.score_samples(t_sample)
        assert ll.shape == (t_sample.size,)
        assert est.score(t_sample) == pytest.approx(est.log_likelihood_ / t_sample.size, rel=1e-12)
        assert est.aic(t_sample) == pytest.approx(aic(3, est.log_likelihood_), rel=1e-12)
        assert est.bic(t_sample) > est.aic(t_sample)
        c, s = est.cdf([0.05]), est.sf([0.05])
        assert c[0] + s[0] == pytest.approx(1.0)

    def test_column_input(self, t_sample):
        a = GrowthRateDistribution(family="normal").fit(t_sample)
        b = GrowthRateDistribution(family="normal").fit(t_sample[:, None])
        assert a.params_ == b.params_

    def test_not_fitted(self):
        with pytest.raises(NotFittedError):
            GrowthRateDistribution().score_samples([0.1])

    def test_sample(self, t_sample):
        est = GrowthRateDistribution(family="normal").fit(t_sample)
        x = est.sample(50, random_state=3)
        assert x.shape == (50,)
        np.testing.assert_array_equal(x, est.sample(50, random_state=3))

    def test_random_state_object(self, t_sample):
        est = GrowthRateDistribution(n_starts=2, random_state=np.random.RandomState(1)).fit(t_sample[:500])
        assert est.converged_


class TestPipeline:
    def test_panel_to_distribution(self):
        rng = np.random.default_rng(4)
        start = rng.uniform(1e3, 1e5, 400)
        end = start * np.exp(rng.normal(0.02, 0.1, 400))
        pipe = make_pipeline(LogGrowthTransformer(), GrowthRateDistribution(family="normal"))
        pipe.fit(np.column_stack([start, end]))
        fitted = pipe[-1]
        assert fitted.params_.mu == pytest.approx(np.mean(np.log(end / start)), abs=1e-12)
        assert np.isfinite(pipe.score(np.column_stack([start, end])))

    def test_transformer_validation(self):
        with pytest.raises(ValueError):
            LogGrowthTransformer().fit(np.ones((3, 3)))
        with pytest.raises(ValueError):
            LogGrowthTransformer().fit_transform(np.array([[1.0, 0.0]]))


class TestExponentialTails:
    def test_fit(self):
        x = np.random.default_rng(2).laplace(0, 0.1, 20_000)
        est = ExponentialTails().fit(x)
        assert est.upper_rate_ == pytest.approx(10.0, rel=0.1)
        assert est.lower_rate_ == pytest.approx(10.0, rel=0.1)
        assert est.lower_threshold_ < est.upper_threshold_
        prof = est.tent_profile(x)
        assert prof.upper_residual < 0.2

    def test_clone(self):
        est = clone(ExponentialTails(upper_q=0.9, lower_q=0.1))
        assert est.get_params() == {"upper_q": 0.9, "lower_q": 0.1}
