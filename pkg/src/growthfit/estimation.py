"""Maximum-likelihood estimation for every supported family.

The likelihood is maximized with a multi-start Nelder-Mead search on an
unconstrained reparametrization (logs for positive parameters, additive
log-ratios for mixture weights). Standard errors come from the inverse of a
central-difference Hessian of the negative log-likelihood taken in the
original parameter coordinates.
"""

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from joblib import Parallel, delayed

from . import distributions as dist
from .distributions import Family, ModelSpec
from .exceptions import (
    DegenerateSampleError,
    EmptySampleError,
    EvaluationError,
    InvalidParameterError,
    SampleSizeError,
)
from .nelder_mead import nelder_mead

logger = logging.getLogger(__name__)

MAD_TO_SD = 1.4826
START_SPREAD = 0.2
START_DOF = 5.0
START_SHAPE = 1.5
TIE_TOL = 1e-9
SE_MIN_STEP = 1e-6
MAX_RESTARTS = 3


@dataclass(frozen=True)
class FitOptions:
    """Optimizer and standard-error settings."""

    n_starts: int = 8
    max_iters: int = 5000
    f_tol: float = 1e-10
    x_tol: float = 1e-8
    se_step: float = 1e-4
    seed: int = 0
    n_jobs: int = 1

    def __post_init__(self):
        if self.n_starts < 1:
            raise ValueError("n_starts must be at least 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        for name in ("f_tol", "x_tol", "se_step"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class FitResult:
    spec: ModelSpec
    params: object
    std_errors: dict | None
    log_lik: float
    n_obs: int
    converged: bool
    n_starts_used: int
    best_start_index: int
    se_status: str = "not_computed"
    start_values: tuple = field(default=(), repr=False)
    n_fev: int = 0

    @property
    def k(self):
        return dist.n_free_params(self.spec)

    @property
    def label(self):
        return self.spec.label


def _values(sample):
    values = np.asarray(sample, dtype=float).ravel()
    if values.size == 0:
        raise EmptySampleError("sample is empty")
    return values


def neg_log_likelihood(spec, params, sample):
    """``-sum(log_pdf(g_i))`` over the sample."""
    return -float(np.sum(dist.log_pdf(spec, params, _values(sample))))


# -- reparametrization -------------------------------------------------------

def to_unconstrained(spec, params):
    """Map parameters to an unconstrained real vector."""
    dist.check_params(spec, params)
    if spec.family is Family.NORMAL:
        return np.array([params.mu, math.log(params.sigma)])
    if spec.family is Family.STUDENT_T:
        return np.array([params.mu, math.log(params.sigma), math.log(params.nu)])
    if spec.family is Family.ADLN:
        return np.array([math.log(params.alpha), math.log(params.beta), params.mu, math.log(params.sigma)])
    if spec.family is Family.ASUB:
        return np.array([math.log(params.a_l), math.log(params.a_r),
                         math.log(params.b_l), math.log(params.b_r), params.mu])
    vec = []
    for mu, sigma, _ in params.components:
        vec += [mu, math.log(sigma)]
    weights = params.all_weights
    with np.errstate(divide="ignore"):
        alr = np.log(weights[:-1]) - np.log(weights[-1])
    return np.array(vec + list(alr))


def from_unconstrained(spec, vec):
    """Inverse of :func:`to_unconstrained`."""
    u = np.asarray(vec, dtype=float).ravel()
    if u.size != dist.n_free_params(spec):
        raise InvalidParameterError(f"{spec.label} expects {dist.n_free_params(spec)} values, got {u.size}")
    with np.errstate(over="ignore"):
        if spec.family is Family.NORMAL:
            return dist.NormalParams(u[0], math.exp(u[1]))
        if spec.family is Family.STUDENT_T:
            return dist.StudentTParams(u[0], math.exp(u[1]), math.exp(u[2]))
        if spec.family is Family.ADLN:
            return dist.AdLnParams(math.exp(u[0]), math.exp(u[1]), u[2], math.exp(u[3]))
        if spec.family is Family.ASUB:
            return dist.ASubParams(math.exp(u[0]), math.exp(u[1]), math.exp(u[2]), math.exp(u[3]), u[4])
        m = spec.n_components
        comps = tuple((u[2 * j], math.exp(u[2 * j + 1]), spec.fixed_dofs[j]) for j in range(m))
        alr = u[2 * m:]
        # softmax with the last category as reference
        z = np.concatenate([alr, [0.0]])
        z -= z.max()
        w = np.exp(z)
        w /= w.sum()
        return dist.TMixParams(comps, tuple(w[:-1]))


# -- starting values ---------------------------------------------------------

def _robust_scale(values):
    scale = MAD_TO_SD * float(np.median(np.abs(values - np.median(values))))
    if not scale > 0:
        scale = float(np.std(values))
    return scale


def moment_start(spec, sample):
    """Moment-based starting parameters."""
    values = _values(sample)
    med = float(np.median(values))
    scale = _robust_scale(values)
    sd = float(np.std(values, ddof=1)) if values.size > 1 else scale
    if not (scale > 0 and sd > 0):
        raise DegenerateSampleError("sample has zero variance")
    if spec.family is Family.NORMAL:
        return dist.NormalParams(med, scale)
    if spec.family is Family.STUDENT_T:
        return dist.StudentTParams(med, scale, START_DOF)
    if spec.family is Family.ADLN:
        return dist.AdLnParams(1.0 / sd, 1.0 / sd, med, scale)
    if spec.family is Family.ASUB:
        return dist.ASubParams(scale, scale, START_SHAPE, START_SHAPE, med)
    m = spec.n_components
    factors = np.linspace(1.5, 0.5, m)
    comps = tuple((med, scale * f, nu) for f, nu in zip(factors, spec.fixed_dofs))
    return dist.TMixParams(comps, tuple([1.0 / m] * (m - 1)))


def _location_mask(spec):
    names = dist.param_names(spec)
    return np.array([n == "mu" or n.startswith("mu_") for n in names])


def default_starts(spec, sample, n_starts, seed=0):
    """Unconstrained starting vectors: the moment start, then seeded jitters of it.

    Log-scale and log-ratio coordinates get additive normal noise with
    standard deviation 0.2; location coordinates get noise with standard
    deviation 0.2 times the robust sample scale.
    """
    values = _values(sample)
    base = to_unconstrained(spec, moment_start(spec, values))
    starts = [base]
    if n_starts > 1:
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        spread = np.where(_location_mask(spec), START_SPREAD * _robust_scale(values), START_SPREAD)
        for _ in range(n_starts - 1):
            starts.append(base + spread * rng.standard_normal(base.size))
    return starts


# -- fitting -----------------------------------------------------------------

def _objective(spec, values):
    def f(u):
        try:
            params = from_unconstrained(spec, u)
            return -float(np.sum(dist.log_pdf(spec, params, values)))
        except (InvalidParameterError, EvaluationError, OverflowError, ValueError):
            return np.inf
    return f


def _run_start(spec, values, x0, opts):
    objective = _objective(spec, values)
    result = nelder_mead(objective, x0, f_tol=opts.f_tol, x_tol=opts.x_tol, max_iters=opts.max_iters)
    n_fev = result.n_fev
    # restart from the optimum with a fresh simplex to guard against collapse
    for _ in range(MAX_RESTARTS):
        again = nelder_mead(objective, result.x, f_tol=opts.f_tol, x_tol=opts.x_tol, max_iters=opts.max_iters)
        n_fev += again.n_fev
        improved = result.fun - again.fun
        result = again if again.fun <= result.fun else result
        if improved <= opts.f_tol:
            break
    return result.x, result.fun, result.converged, n_fev


def _check_sample(spec, values):
    k = dist.n_free_params(spec)
    if values.size < k + 1:
        raise SampleSizeError(f"{spec.label} needs at least {k + 1} observations, got {values.size}")
    if np.ptp(values) == 0:
        raise DegenerateSampleError("sample has zero variance")


def fit_mle(spec, sample, opts=None):
    """Fit ``spec`` to ``sample`` by maximum likelihood.

    Parameters
    ----------
    spec : ModelSpec
    sample : GrowthSample or array_like
    opts : FitOptions, optional

    Returns
    -------
    FitResult
        ``converged`` refers to the winning start. Standard errors are
        attached when the observed information is positive definite.
    """
    opts = opts or FitOptions()
    values = _values(sample)
    _check_sample(spec, values)

    if spec.family is Family.NORMAL:
        # closed-form maximum
        params = dist.NormalParams(float(np.mean(values)), float(np.std(values)))
        starts, runs = [to_unconstrained(spec, params)], None
        best, converged, n_fev = 0, True, 0
    else:
        starts = default_starts(spec, values, opts.n_starts, opts.seed)
        if opts.n_jobs == 1:
            runs = [_run_start(spec, values, x0, opts) for x0 in starts]
        else:
            runs = Parallel(n_jobs=opts.n_jobs)(delayed(_run_start)(spec, values, x0, opts) for x0 in starts)
        funs = np.array([r[1] for r in runs])
        if not np.any(np.isfinite(funs)):
            raise EvaluationError(f"{spec.label}: objective not finite at any start")
        best = int(np.flatnonzero(funs <= funs.min() + TIE_TOL)[0])
        params = from_unconstrained(spec, runs[best][0])
        converged = bool(runs[best][2])
        n_fev = int(sum(r[3] for r in runs))

    log_lik = -neg_log_likelihood(spec, params, values)
    result = FitResult(
        spec=spec,
        params=params,
        std_errors=None,
        log_lik=log_lik,
        n_obs=int(values.size),
        converged=converged,
        n_starts_used=len(starts),
        best_start_index=best,
        start_values=tuple(tuple(float(v) for v in x) for x in starts),
        n_fev=n_fev,
    )
    if not converged:
        logger.warning("%s: optimizer hit the iteration cap", spec.label)
        return result
    se, status = standard_errors(result, values, opts)
    return replace(result, std_errors=se, se_status=status)


def numerical_hessian(func, theta, rel_step=1e-4, min_step=SE_MIN_STEP):
    """Central-difference Hessian with per-coordinate step ``max(rel_step*|theta_i|, min_step)``."""
    theta = np.asarray(theta, dtype=float)
    n = theta.size
    h = np.maximum(rel_step * np.abs(theta), min_step)
    f0 = func(theta)
    hess = np.empty((n, n))
    eye = np.eye(n)
    for i in range(n):
        ei = eye[i] * h[i]
        hess[i, i] = (func(theta + ei) - 2.0 * f0 + func(theta - ei)) / (h[i] * h[i])
        for j in range(i + 1, n):
            ej = eye[j] * h[j]
            value = (func(theta + ei + ej) - func(theta + ei - ej)
                     - func(theta - ei + ej) + func(theta - ei - ej)) / (4.0 * h[i] * h[j])
            hess[i, j] = hess[j, i] = value
    return 0.5 * (hess + hess.T)


def standard_errors(result, sample, opts=None):
    """Observed-information standard errors in the original coordinates.

    Returns
    -------
    se : dict or None
        Parameter name -> standard error; None when the information matrix
        is not positive definite or could not be evaluated.
    status : str
        ``"ok"``, ``"not_positive_definite"`` or ``"not_finite"``.
    """
    opts = opts or FitOptions()
    values = _values(sample)
    spec = result.spec
    theta = dist.params_to_vector(result.params)

    def nll(vec):
        try:
            return -float(np.sum(dist.log_pdf(spec, dist.params_from_vector(spec, vec), values)))
        except (InvalidParameterError, EvaluationError):
            return np.nan

    info = numerical_hessian(nll, theta, rel_step=opts.se_step)
    if not np.all(np.isfinite(info)):
        return None, "not_finite"
    try:
        np.linalg.cholesky(info)
    except np.linalg.LinAlgError:
        return None, "not_positive_definite"
    cov = np.linalg.inv(info)
    se = np.sqrt(np.diag(cov))
    return dict(zip(dist.param_names(spec), (float(v) for v in se))), "ok"
