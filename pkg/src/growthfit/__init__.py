"""Maximum-likelihood fitting, model selection and tail diagnostics for log-growth rates."""

from .diagnostics import (
    TailFit,
    empirical_log_corank,
    empirical_log_rank,
    fit_exponential_tails,
    model_log_corank,
    model_log_rank,
    tent_profile,
)
from .distributions import (
    AdLnParams,
    ASubParams,
    ModelSpec,
    NormalParams,
    StudentTParams,
    TMixParams,
    cdf,
    draw,
    log_pdf,
    n_free_params,
    sf,
)
from .estimation import FitOptions, FitResult, fit_mle, neg_log_likelihood, standard_errors
from .estimators import ExponentialTails, GrowthRateDistribution, LogGrowthTransformer
from .samples import GrowthSample, PopulationPair, compute_log_growth, describe
from .selection import aic, bic, hqc, rank_models

__version__ = "0.1.0"
