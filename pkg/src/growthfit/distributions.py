"""Parametric families for log-growth rates.

Five families are supported: the normal, the non-standardized Student's t,
the asymmetric double Laplace-normal (adLn), the asymmetric Subbotin (aSub)
and finite Student's t mixtures whose degrees of freedom are fixed in
advance. Every family exposes a log-density, a distribution function, a
survival function and a sampler. All evaluation functions are vectorized
over ``g``.
"""

import functools
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import specfun
from .exceptions import EvaluationError, InvalidParameterError
from .quadrature import integrate_intervals
from .samples import GrowthSample

__all__ = [
    "Family",
    "ModelSpec",
    "NormalParams",
    "StudentTParams",
    "AdLnParams",
    "ASubParams",
    "TMixParams",
    "MODEL_LABELS",
    "log_pdf",
    "pdf",
    "cdf",
    "sf",
    "draw",
    "n_free_params",
    "param_names",
    "params_from_vector",
    "params_from_dict",
]

_LN_2PI = math.log(2.0 * math.pi)
_SQRT2 = math.sqrt(2.0)

# How many scales past the location the adLn quadrature reaches before the
# exponential tail closure takes over.
ADLN_TAIL_CUT = 12.0
QUAD_TOL = 1e-10
QUAD_MAX_LEVELS = 60


class Family(str, Enum):
    NORMAL = "normal"
    STUDENT_T = "student_t"
    ADLN = "adln"
    ASUB = "asub"
    TMIX = "tmix"


PRESET_DOFS = {
    "2st12": (4.0, 12.0),
    "2st39": (4.0, 39.0),
    "3st": (4.0, 12.0, 39.0),
}

MODEL_LABELS = ("normal", "student_t", "adln", "asub", "2st12", "2st39", "3st")


@dataclass(frozen=True)
class ModelSpec:
    """A family identifier, plus the pinned degrees of freedom for mixtures."""

    family: Family
    fixed_dofs: tuple[float, ...] | None = None

    def __post_init__(self):
        family = Family(self.family)
        object.__setattr__(self, "family", family)
        if family is Family.TMIX:
            if not self.fixed_dofs or len(self.fixed_dofs) < 2:
                raise InvalidParameterError("a t mixture needs at least two fixed dofs")
            dofs = tuple(float(v) for v in self.fixed_dofs)
            if any(not (math.isfinite(v) and v > 0) for v in dofs):
                raise InvalidParameterError("fixed dofs must be positive")
            if any(b <= a for a, b in zip(dofs, dofs[1:])):
                raise InvalidParameterError("fixed dofs must be strictly increasing")
            object.__setattr__(self, "fixed_dofs", dofs)
        elif self.fixed_dofs is not None:
            raise InvalidParameterError("fixed_dofs only applies to t mixtures")

    @classmethod
    def from_label(cls, label):
        key = label.strip().lower()
        if key in PRESET_DOFS:
            return cls(Family.TMIX, PRESET_DOFS[key])
        try:
            return cls(Family(key))
        except ValueError:
            raise InvalidParameterError(
                f"unknown model {label!r}; expected one of {', '.join(MODEL_LABELS)}"
            ) from None

    @property
    def label(self):
        if self.family is not Family.TMIX:
            return self.family.value
        for key, dofs in PRESET_DOFS.items():
            if dofs == self.fixed_dofs:
                return key
        return "tmix[" + ",".join(f"{v:g}" for v in self.fixed_dofs) + "]"

    @property
    def n_components(self):
        return len(self.fixed_dofs) if self.family is Family.TMIX else 1


def _check_positive(**values):
    for name, value in values.items():
        if not (math.isfinite(value) and value > 0):
            raise InvalidParameterError(f"{name} must be positive and finite, got {value!r}")


def _check_real(**values):
    for name, value in values.items():
        if not math.isfinite(value):
            raise InvalidParameterError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class NormalParams:
    mu: float
    sigma: float

    def __post_init__(self):
        _check_real(mu=self.mu)
        _check_positive(sigma=self.sigma)


@dataclass(frozen=True)
class StudentTParams:
    mu: float
    sigma: float
    nu: float

    def __post_init__(self):
        _check_real(mu=self.mu)
        _check_positive(sigma=self.sigma, nu=self.nu)


@dataclass(frozen=True)
class AdLnParams:
    """Asymmetric double Laplace-normal: upper-tail rate ``alpha``, lower-tail rate ``beta``."""

    alpha: float
    beta: float
    mu: float
    sigma: float

    def __post_init__(self):
        _check_real(mu=self.mu)
        _check_positive(alpha=self.alpha, beta=self.beta, sigma=self.sigma)


@dataclass(frozen=True)
class ASubParams:
    """Asymmetric Subbotin with left/right scales ``a_*`` and shapes ``b_*``."""

    a_l: float
    a_r: float
    b_l: float
    b_r: float
    mu: float

    def __post_init__(self):
        _check_real(mu=self.mu)
        _check_positive(a_l=self.a_l, a_r=self.a_r, b_l=self.b_l, b_r=self.b_r)

    @property
    def side_masses(self):
        """Unnormalized left and right masses; they sum to the normalizer ``d``."""
        left = self.a_l * self.b_l ** (1.0 / self.b_l) * math.gamma(1.0 + 1.0 / self.b_l)
        right = self.a_r * self.b_r ** (1.0 / self.b_r) * math.gamma(1.0 + 1.0 / self.b_r)
        return left, right

    @property
    def d(self):
        left, right = self.side_masses
        return left + right

    @property
    def log_d(self):
        # log-space version of d, safe for very small shapes
        terms = []
        for a, b in ((self.a_l, self.b_l), (self.a_r, self.b_r)):
            terms.append(math.log(a) + math.log(b) / b + math.lgamma(1.0 + 1.0 / b))
        return float(np.logaddexp(*terms))


@dataclass(frozen=True)
class TMixParams:
    """Mixture of Student's t components with fixed degrees of freedom.

    ``components`` holds ``(mu_j, sigma_j, nu_j)`` triples ordered by
    increasing ``nu_j``; ``weights`` holds the first ``m - 1`` mixing
    probabilities, the last one being implied.
    """

    components: tuple[tuple[float, float, float], ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        comps = tuple(tuple(float(v) for v in c) for c in self.components)
        weights = tuple(float(w) for w in self.weights)
        if len(comps) < 2:
            raise InvalidParameterError("a t mixture needs at least two components")
        if any(len(c) != 3 for c in comps):
            raise InvalidParameterError("each component is a (mu, sigma, nu) triple")
        if len(weights) != len(comps) - 1:
            raise InvalidParameterError(f"expected {len(comps) - 1} weights, got {len(weights)}")
        for j, (mu, sigma, nu) in enumerate(comps, start=1):
            _check_real(**{f"mu_{j}": mu})
            _check_positive(**{f"sigma_{j}": sigma, f"nu_{j}": nu})
        if any(b[2] <= a[2] for a, b in zip(comps, comps[1:])):
            raise InvalidParameterError("components must be ordered by increasing nu")
        if any(not (math.isfinite(w) and w >= 0) for w in weights) or sum(weights) > 1 + 1e-12:
            raise InvalidParameterError("weights must be nonnegative and sum to at most 1")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "weights", weights)

    @property
    def all_weights(self):
        return np.array(self.weights + (max(0.0, 1.0 - sum(self.weights)),))

    @property
    def dofs(self):
        return tuple(c[2] for c in self.components)


_PARAM_TYPES = {
    Family.NORMAL: NormalParams,
    Family.STUDENT_T: StudentTParams,
    Family.ADLN: AdLnParams,
    Family.ASUB: ASubParams,
    Family.TMIX: TMixParams,
}

_FIELD_NAMES = {
    Family.NORMAL: ("mu", "sigma"),
    Family.STUDENT_T: ("mu", "sigma", "nu"),
    Family.ADLN: ("alpha", "beta", "mu", "sigma"),
    Family.ASUB: ("a_l", "a_r", "b_l", "b_r", "mu"),
}


def n_free_params(spec):
    """Number of estimated parameters ``k`` used by the information criteria."""
    if spec.family is Family.TMIX:
        return 3 * spec.n_components - 1
    return len(_FIELD_NAMES[spec.family])


def param_names(spec):
    """Names of the free parameters, in vector order."""
    if spec.family is Family.TMIX:
        names = []
        for j in range(1, spec.n_components + 1):
            names += [f"mu_{j}", f"sigma_{j}"]
        return tuple(names + [f"p_{j}" for j in range(1, spec.n_components)])
    return _FIELD_NAMES[spec.family]


def params_to_vector(params):
    """Free parameters in natural (constrained) coordinates."""
    if isinstance(params, TMixParams):
        vec = []
        for mu, sigma, _ in params.components:
            vec += [mu, sigma]
        return np.array(vec + list(params.weights))
    return np.array([getattr(params, name) for name in _FIELD_NAMES[_family_of(params)]], dtype=float)


def params_from_vector(spec, vec):
    vec = [float(v) for v in np.asarray(vec, dtype=float).ravel()]
    if len(vec) != n_free_params(spec):
        raise InvalidParameterError(f"{spec.label} expects {n_free_params(spec)} values, got {len(vec)}")
    if spec.family is Family.TMIX:
        m = spec.n_components
        comps = tuple((vec[2 * j], vec[2 * j + 1], spec.fixed_dofs[j]) for j in range(m))
        return TMixParams(comps, tuple(vec[2 * m:]))
    return _PARAM_TYPES[spec.family](*vec)


def params_as_dict(params):
    """Flat name -> value mapping, including the fixed mixture dofs."""
    if isinstance(params, TMixParams):
        out = {}
        for j, (mu, sigma, nu) in enumerate(params.components, start=1):
            out[f"mu_{j}"] = mu
            out[f"sigma_{j}"] = sigma
            out[f"nu_{j}"] = nu
        for j, w in enumerate(params.weights, start=1):
            out[f"p_{j}"] = w
        return out
    return {name: getattr(params, name) for name in _FIELD_NAMES[_family_of(params)]}


def params_from_dict(spec, mapping):
    """Build parameters from a name -> value mapping; fixed dofs may be omitted."""
    names = param_names(spec)
    missing = [n for n in names if n not in mapping]
    if missing:
        raise InvalidParameterError(f"{spec.label}: missing parameter(s) {', '.join(missing)}")
    allowed = set(names)
    if spec.family is Family.TMIX:
        for j, nu in enumerate(spec.fixed_dofs, start=1):
            key = f"nu_{j}"
            allowed.add(key)
            if key in mapping and float(mapping[key]) != nu:
                raise InvalidParameterError(f"{key} is fixed at {nu:g} for {spec.label}")
    extra = sorted(set(mapping) - allowed)
    if extra:
        raise InvalidParameterError(f"{spec.label}: unknown parameter(s) {', '.join(extra)}")
    return params_from_vector(spec, [float(mapping[n]) for n in names])


def _family_of(params):
    for family, kind in _PARAM_TYPES.items():
        if isinstance(params, kind):
            return family
    raise InvalidParameterError(f"not a parameter set: {params!r}")


def check_params(spec, params):
    family = _family_of(params)
    if family is not spec.family:
        raise InvalidParameterError(f"{type(params).__name__} does not belong to {spec.label}")
    if family is Family.TMIX and params.dofs != spec.fixed_dofs:
        raise InvalidParameterError(f"mixture dofs {params.dofs} differ from {spec.fixed_dofs}")


# -- log densities -----------------------------------------------------------

def _normal_logpdf(g, mu, sigma):
    z = (g - mu) / sigma
    return -0.5 * _LN_2PI - math.log(sigma) - 0.5 * z * z


def _t_lognorm(sigma, nu):
    return float(specfun.ln_gamma_half_ratio(0.5 * nu)) - 0.5 * math.log(math.pi * nu) - math.log(sigma)


def _t_logpdf(g, mu, sigma, nu):
    z = (g - mu) / sigma
    return _t_lognorm(sigma, nu) - 0.5 * (nu + 1.0) * np.log1p(z * z / nu)


def _adln_terms(g, p):
    """Log magnitudes of the two (positive) adLn terms."""
    a, b, mu, s = p.alpha, p.beta, p.mu, p.sigma
    log_c = math.log(a * b / (2.0 * (a + b)))
    v = (g - mu - a * s * s) / (_SQRT2 * s)
    w = (g - mu + b * s * s) / (_SQRT2 * s)
    # 1 + erf(v) = erfc(-v) and 1 - erf(w) = erfc(w)
    upper = log_c - a * (g - mu) + 0.5 * a * a * s * s + specfun.ln_erfc(-v)
    lower = log_c + b * (g - mu) + 0.5 * b * b * s * s + specfun.ln_erfc(w)
    return upper, lower


def _adln_logpdf(g, p):
    upper, lower = _adln_terms(g, p)
    out = np.logaddexp(upper, lower)
    if not np.all(np.isfinite(out)):
        raise EvaluationError("adLn density evaluated to a non-positive or non-finite value")
    return out


def _asub_logpdf(g, p):
    y = g - p.mu
    left = y <= 0
    a = np.where(left, p.a_l, p.a_r)
    b = np.where(left, p.b_l, p.b_r)
    return -np.abs(y / a) ** b / b - p.log_d


def _tmix_logpdf(g, p):
    weights = p.all_weights
    with np.errstate(divide="ignore"):
        logw = np.log(weights)
    parts = [lw + _t_logpdf(g, mu, s, nu) for lw, (mu, s, nu) in zip(logw, p.components) if lw > -np.inf]
    top = functools.reduce(np.maximum, parts)
    total = sum(np.exp(part - top) for part in parts)
    return top + np.log(total)


def _dispatch(params):
    if isinstance(params, NormalParams):
        return lambda g: _normal_logpdf(g, params.mu, params.sigma)
    if isinstance(params, StudentTParams):
        return lambda g: _t_logpdf(g, params.mu, params.sigma, params.nu)
    if isinstance(params, AdLnParams):
        return lambda g: _adln_logpdf(g, params)
    if isinstance(params, ASubParams):
        return lambda g: _asub_logpdf(g, params)
    if isinstance(params, TMixParams):
        return lambda g: _tmix_logpdf(g, params)
    raise InvalidParameterError(f"not a parameter set: {params!r}")


def _as_array(g):
    arr = np.asarray(g, dtype=float)
    return arr, arr.ndim == 0


def log_pdf(spec, params, g):
    """Natural log of the density at ``g`` (scalar or array)."""
    check_params(spec, params)
    arr, scalar = _as_array(g)
    out = np.asarray(_dispatch(params)(np.atleast_1d(arr)), dtype=float).reshape(arr.shape)
    return float(out) if scalar else out


def pdf(spec, params, g):
    return np.exp(log_pdf(spec, params, g))


# -- distribution and survival functions -----------------------------------

def _normal_cdf_sf(g, mu, sigma):
    u = (g - mu) / (sigma * _SQRT2)
    return 0.5 * specfun.erfc(-u), 0.5 * specfun.erfc(u)


def _t_cdf_sf(g, mu, sigma, nu):
    z = (g - mu) / sigma
    x = nu / (nu + z * z)
    tail = 0.5 * specfun.reg_inc_beta(x, 0.5 * nu, 0.5)
    # for tiny |z| the complement is more accurate through I_{1-x}(1/2, nu/2)
    body = 0.5 * specfun.reg_inc_beta(z * z / (nu + z * z), 0.5, 0.5 * nu)
    near = 0.5 - body
    far_side = np.where(np.abs(z) < 1.0, near, tail)
    near_side = 1.0 - far_side
    cdf = np.where(z < 0, far_side, near_side)
    sf = np.where(z < 0, near_side, far_side)
    return cdf, sf


def _asub_cdf_sf(g, p):
    left_mass, right_mass = p.side_masses
    d = left_mass + right_mass
    wl, wr = left_mass / d, right_mass / d
    y = g - p.mu
    left = y <= 0
    ul = np.abs(np.where(left, y, 0.0) / p.a_l) ** p.b_l / p.b_l
    ur = np.abs(np.where(left, 0.0, y) / p.a_r) ** p.b_r / p.b_r
    ql = specfun.reg_inc_gamma_upper(1.0 / p.b_l, ul)
    pl = specfun.reg_inc_gamma_lower(1.0 / p.b_l, ul)
    qr = specfun.reg_inc_gamma_upper(1.0 / p.b_r, ur)
    pr = specfun.reg_inc_gamma_lower(1.0 / p.b_r, ur)
    cdf = np.where(left, wl * ql, wl + wr * pr)
    sf = np.where(left, wr + wl * pl, wr * qr)
    return cdf, sf


def _tmix_cdf_sf(g, p):
    cdf = np.zeros_like(g)
    sf = np.zeros_like(g)
    for w, (mu, s, nu) in zip(p.all_weights, p.components):
        c, s_ = _t_cdf_sf(g, mu, s, nu)
        cdf += w * c
        sf += w * s_
    return cdf, sf


def adln_cut_points(p):
    """Quadrature limits beyond which the adLn tails are closed analytically."""
    s2 = p.sigma * p.sigma
    lower = p.mu - ADLN_TAIL_CUT * p.sigma - p.beta * s2
    upper = p.mu + ADLN_TAIL_CUT * p.sigma + p.alpha * s2
    return lower, upper


def _adln_cdf_sf(g, p):
    density = lambda x: np.exp(_adln_logpdf(x, p))
    lo, hi = adln_cut_points(p)
    flat = g.ravel()
    order = np.argsort(flat, kind="stable")
    xs = np.clip(flat[order], lo, hi)
    knots = np.concatenate([[lo], xs, [hi]])
    pieces, _ = integrate_intervals(density, knots[:-1], knots[1:], tol=QUAD_TOL, max_levels=QUAD_MAX_LEVELS)
    # exponential closure: beyond the cuts the density is c*exp(-+rate*g)
    left_tail = density(np.array([lo]))[0] / p.beta
    right_tail = density(np.array([hi]))[0] / p.alpha
    cum = np.cumsum(pieces)
    cdf_sorted = left_tail + cum[:-1]
    sf_sorted = right_tail + (cum[-1] - cum[:-1])
    raw = flat[order]
    below, above = raw < lo, raw > hi
    if below.any():
        cdf_sorted[below] = density(raw[below]) / p.beta
        sf_sorted[below] = 1.0 - cdf_sorted[below]
    if above.any():
        sf_sorted[above] = density(raw[above]) / p.alpha
        cdf_sorted[above] = 1.0 - sf_sorted[above]
    cdf = np.empty_like(flat)
    sf = np.empty_like(flat)
    cdf[order] = cdf_sorted
    sf[order] = sf_sorted
    return np.clip(cdf, 0.0, 1.0).reshape(g.shape), np.clip(sf, 0.0, 1.0).reshape(g.shape)


def cdf_sf(spec, params, g):
    """Return ``(cdf(g), 1 - cdf(g))`` with each side computed directly."""
    check_params(spec, params)
    arr, scalar = _as_array(g)
    x = np.atleast_1d(arr).astype(float).ravel()
    if np.isnan(x).any():
        raise EvaluationError("cdf is undefined at NaN")
    finite = np.isfinite(x)
    c = np.where(x > 0, 1.0, 0.0)
    s = 1.0 - c
    if finite.any():
        xf = x[finite]
        if isinstance(params, NormalParams):
            cf, sf_ = _normal_cdf_sf(xf, params.mu, params.sigma)
        elif isinstance(params, StudentTParams):
            cf, sf_ = _t_cdf_sf(xf, params.mu, params.sigma, params.nu)
        elif isinstance(params, AdLnParams):
            cf, sf_ = _adln_cdf_sf(xf, params)
        elif isinstance(params, ASubParams):
            cf, sf_ = _asub_cdf_sf(xf, params)
        else:
            cf, sf_ = _tmix_cdf_sf(xf, params)
        c[finite] = cf
        s[finite] = sf_
    c = c.reshape(arr.shape)
    s = s.reshape(arr.shape)
    if scalar:
        return float(c), float(s)
    return c, s


def cdf(spec, params, g):
    """Cumulative distribution function."""
    return cdf_sf(spec, params, g)[0]


def sf(spec, params, g):
    """Survival function ``1 - cdf``, accurate far in the upper tail."""
    return cdf_sf(spec, params, g)[1]


# -- sampling ----------------------------------------------------------------

def _t_draw(rng, n, mu, sigma, nu):
    z = rng.standard_normal(n)
    v = rng.chisquare(nu, n)
    return mu + sigma * z * np.sqrt(nu / v)


def draw(spec, params, n, rng=None, label=None):
    """Draw ``n`` i.i.d. log-growth rates.

    Parameters
    ----------
    spec : ModelSpec
    params : family parameters
    n : int
        Number of draws, at least 1.
    rng : numpy.random.Generator or int or None
        Generator state; integers are used as seeds.
    label : str, optional
        Label for the returned sample.

    Returns
    -------
    GrowthSample
    """
    check_params(spec, params)
    n = int(n)
    if n < 1:
        raise InvalidParameterError("n must be at least 1")
    rng = np.random.default_rng(rng)
    if isinstance(params, NormalParams):
        g = params.mu + params.sigma * rng.standard_normal(n)
    elif isinstance(params, StudentTParams):
        g = _t_draw(rng, n, params.mu, params.sigma, params.nu)
    elif isinstance(params, AdLnParams):
        a, b = params.alpha, params.beta
        right = rng.random(n) < b / (a + b)
        e = rng.standard_exponential(n)
        laplace = np.where(right, e / a, -e / b)
        g = laplace + params.mu + params.sigma * rng.standard_normal(n)
    elif isinstance(params, ASubParams):
        left_mass, right_mass = params.side_masses
        right = rng.random(n) < right_mass / (left_mass + right_mass)
        a = np.where(right, params.a_r, params.a_l)
        b = np.where(right, params.b_r, params.b_l)
        x = rng.standard_gamma(1.0 / b)
        g = params.mu + np.where(right, 1.0, -1.0) * a * (b * x) ** (1.0 / b)
    else:
        comp = rng.choice(len(params.components), size=n, p=params.all_weights / params.all_weights.sum())
        g = np.empty(n)
        for j, (mu, sigma, nu) in enumerate(params.components):
            mask = comp == j
            g[mask] = _t_draw(rng, int(mask.sum()), mu, sigma, nu)
    return GrowthSample(g, label=label or f"simulated-{spec.label}", source_meta=f"draw:{spec.label}")
