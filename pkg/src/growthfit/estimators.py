"""scikit-learn compatible estimators.

``GrowthRateDistribution`` fits one parametric family by maximum
likelihood, ``ExponentialTails`` fits exponential laws to both tails and
``LogGrowthTransformer`` turns two population columns into log-growth
rates. All follow the usual ``fit`` / ``transform`` / ``get_params``
conventions, so they compose with pipelines and grid searches.
"""

import numpy as np
from sklearn.base import BaseEstimator, DensityMixin, TransformerMixin
from sklearn.utils import check_random_state
from sklearn.utils.validation import check_array, check_is_fitted

from . import diagnostics
from . import distributions as dist
from .estimation import FitOptions, fit_mle
from .selection import CriteriaRow


def check_rates(X):
    """Validate growth rates given as shape ``(n,)`` or ``(n, 1)``; return a 1-D float array."""
    X = check_array(X, ensure_2d=False, dtype=np.float64)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise ValueError(f"expected a single column of growth rates, got shape {X.shape}")
        X = X[:, 0]
    return X


def _seed_from(random_state):
    if isinstance(random_state, (int, np.integer)):
        return int(random_state)
    return int(check_random_state(random_state).randint(np.iinfo(np.int32).max))


class GrowthRateDistribution(DensityMixin, BaseEstimator):
    """Maximum-likelihood fit of one log-growth-rate family.

    Parameters
    ----------
    family : str, default="student_t"
        One of ``normal``, ``student_t``, ``adln``, ``asub``, ``2st12``,
        ``2st39``, ``3st``.
    n_starts : int, default=8
        Number of Nelder-Mead starts.
    max_iter : int, default=5000
    f_tol, x_tol : float
        Simplex convergence tolerances on objective and parameters.
    se_step : float, default=1e-4
        Relative step of the finite-difference Hessian.
    random_state : int, RandomState or None, default=0
        Seeds the jittered starts.
    n_jobs : int, default=1
        Starts evaluated in parallel through joblib.

    Attributes
    ----------
    spec_ : ModelSpec
    params_ : family parameter dataclass
    std_errors_ : dict or None
    log_likelihood_ : float
    n_obs_ : int
    converged_ : bool
    fit_result_ : FitResult
    """

    def __init__(self, family="student_t", n_starts=8, max_iter=5000, f_tol=1e-10, x_tol=1e-8,
                 se_step=1e-4, random_state=0, n_jobs=1):
        self.family = family
        self.n_starts = n_starts
        self.max_iter = max_iter
        self.f_tol = f_tol
        self.x_tol = x_tol
        self.se_step = se_step
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _options(self):
        return FitOptions(n_starts=self.n_starts, max_iters=self.max_iter, f_tol=self.f_tol,
                          x_tol=self.x_tol, se_step=self.se_step,
                          seed=_seed_from(self.random_state), n_jobs=self.n_jobs)

    def fit(self, X, y=None):
        values = check_rates(X)
        spec = dist.ModelSpec.from_label(self.family)
        result = fit_mle(spec, values, self._options())
        self.spec_ = spec
        self.fit_result_ = result
        self.params_ = result.params
        self.std_errors_ = result.std_errors
        self.log_likelihood_ = result.log_lik
        self.n_obs_ = result.n_obs
        self.converged_ = result.converged
        return self

    @property
    def n_parameters_(self):
        check_is_fitted(self, "params_")
        return dist.n_free_params(self.spec_)

    def score_samples(self, X):
        """Log-density of each observation."""
        check_is_fitted(self, "params_")
        return dist.log_pdf(self.spec_, self.params_, check_rates(X))

    def score(self, X, y=None):
        """Mean log-likelihood per observation."""
        return float(np.mean(self.score_samples(X)))

    def cdf(self, X):
        check_is_fitted(self, "params_")
        return dist.cdf(self.spec_, self.params_, check_rates(X))

    def sf(self, X):
        check_is_fitted(self, "params_")
        return dist.sf(self.spec_, self.params_, check_rates(X))

    def _log_lik(self, X):
        return float(np.sum(self.score_samples(X))), check_rates(X).size

    def aic(self, X):
        log_lik, n = self._log_lik(X)
        return CriteriaRow.from_values(self.family, self.n_parameters_, n, log_lik).aic

    def bic(self, X):
        log_lik, n = self._log_lik(X)
        return CriteriaRow.from_values(self.family, self.n_parameters_, n, log_lik).bic

    def hqc(self, X):
        log_lik, n = self._log_lik(X)
        return CriteriaRow.from_values(self.family, self.n_parameters_, n, log_lik).hqc

    def sample(self, n_samples=1, random_state=None):
        check_is_fitted(self, "params_")
        rng = np.random.default_rng(_seed_from(random_state))
        return np.asarray(dist.draw(self.spec_, self.params_, n_samples, rng))


class ExponentialTails(BaseEstimator):
    """Exponential fits to the upper and lower tails beyond empirical quantiles.

    Attributes
    ----------
    tail_fit_ : TailFit
    upper_rate_, lower_rate_ : float
    upper_threshold_, lower_threshold_ : float
    """

    def __init__(self, upper_q=0.95, lower_q=0.05):
        self.upper_q = upper_q
        self.lower_q = lower_q

    def fit(self, X, y=None):
        values = check_rates(X)
        fit = diagnostics.fit_exponential_tails(values, self.upper_q, self.lower_q)
        self.tail_fit_ = fit
        self.upper_rate_ = fit.c_u
        self.lower_rate_ = fit.c_l
        self.upper_threshold_ = fit.g_m
        self.lower_threshold_ = fit.g_M
        return self

    def tent_profile(self, X):
        check_is_fitted(self, "tail_fit_")
        return diagnostics.tent_profile(check_rates(X), self.tail_fit_)


class LogGrowthTransformer(TransformerMixin, BaseEstimator):
    """Map ``(pop_start, pop_end)`` columns to a single log-growth-rate column.

    Stateless; ``fit`` only validates the input width.
    """

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != 2:
            raise ValueError(f"expected two population columns, got {X.shape[1]}")
        self.n_features_in_ = 2
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != 2:
            raise ValueError(f"expected two population columns, got {X.shape[1]}")
        if np.any(X <= 0):
            raise ValueError("populations must be positive")
        return (np.log(X[:, 1]) - np.log(X[:, 0]))[:, None]
