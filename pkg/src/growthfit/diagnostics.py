"""Log-rank / log-corank series and exponential tail fits.

An exponential upper tail ``c_u exp(-c_u (g - g_m))`` above ``g_m`` shows up
as the straight line ``ln(n_u) - c_u (g - g_m)`` in a log-rank plot, and an
exponential lower tail below ``g_M`` as ``ln(n_l) + c_l (g - g_M)`` in a
log-corank plot. Curvature in the empirical series therefore signals
non-exponential tails.

Ranks start at 1 from the extreme observation, so the empirical upper
series is ``ln(i)`` against the ``i``-th largest value; the model series is
``ln(n (1 - F(g)))``. The two agree up to the usual off-by-one between
``i`` and ``n (1 - F_n(g))``.
"""

import csv
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from . import distributions as dist
from .exceptions import EmptySampleError, TailDataError

LOG_UNDERFLOW = -745.0
MIN_TAIL_OBS = 20


class SeriesKind(str, Enum):
    EMPIRICAL_UPPER = "EmpiricalUpper"
    EMPIRICAL_LOWER = "EmpiricalLower"
    MODEL_UPPER = "ModelUpper"
    MODEL_LOWER = "ModelLower"
    LINE_UPPER = "LineUpper"
    LINE_LOWER = "LineLower"

    @property
    def is_upper(self):
        return self.value.endswith("Upper")


@dataclass(frozen=True)
class RankSeries:
    g: np.ndarray
    log_rank: np.ndarray
    kind: SeriesKind
    n_ref: int
    n_omitted: int = 0

    @property
    def points(self):
        return list(zip(self.g.tolist(), self.log_rank.tolist()))

    def __len__(self):
        return self.g.size


@dataclass(frozen=True)
class TailFit:
    c_u: float
    c_l: float
    g_m: float
    g_M: float
    n_u: int
    n_l: int

    def upper_line(self, g):
        return np.log(self.n_u) - self.c_u * (np.asarray(g, dtype=float) - self.g_m)

    def lower_line(self, g):
        return np.log(self.n_l) + self.c_l * (np.asarray(g, dtype=float) - self.g_M)


@dataclass(frozen=True)
class TentProfile:
    upper: RankSeries
    lower: RankSeries
    upper_line: RankSeries
    lower_line: RankSeries
    upper_residual: float
    lower_residual: float


def _values(sample, minimum=1):
    values = np.asarray(sample, dtype=float).ravel()
    if values.size < minimum:
        raise EmptySampleError(f"need at least {minimum} observation(s), got {values.size}")
    return values


def empirical_log_rank(sample):
    """Upper series: the ``i``-th largest value paired with ``ln(i)``."""
    values = _values(sample)
    g = np.sort(values, kind="stable")[::-1]
    ranks = np.arange(1, g.size + 1)
    return RankSeries(g, np.log(ranks), SeriesKind.EMPIRICAL_UPPER, g.size)


def empirical_log_corank(sample):
    """Lower series: the ``i``-th smallest value paired with ``ln(i)``."""
    values = _values(sample)
    g = np.sort(values, kind="stable")
    ranks = np.arange(1, g.size + 1)
    return RankSeries(g, np.log(ranks), SeriesKind.EMPIRICAL_LOWER, g.size)


def _model_series(values, kind, g_grid, n):
    g = np.asarray(g_grid, dtype=float).ravel()
    if n < 1:
        raise ValueError("n must be at least 1")
    with np.errstate(divide="ignore"):
        log_rank = np.log(n) + np.log(values)
    keep = np.isfinite(log_rank) & (log_rank - np.log(n) > LOG_UNDERFLOW)
    return RankSeries(g[keep], log_rank[keep], kind, int(n), int((~keep).sum()))


def model_log_rank(spec, params, g_grid, n):
    """Model upper series ``ln(n (1 - F(g)))``; underflowing points are dropped and counted."""
    survival = dist.sf(spec, params, np.asarray(g_grid, dtype=float).ravel())
    return _model_series(survival, SeriesKind.MODEL_UPPER, g_grid, n)


def model_log_corank(spec, params, g_grid, n):
    """Model lower series ``ln(n F(g))``."""
    cumulative = dist.cdf(spec, params, np.asarray(g_grid, dtype=float).ravel())
    return _model_series(cumulative, SeriesKind.MODEL_LOWER, g_grid, n)


def fit_exponential_tails(sample, upper_q=0.95, lower_q=0.05):
    """Exponential maximum-likelihood fits to both tails.

    The thresholds are the empirical ``upper_q`` and ``lower_q`` quantiles;
    each rate is the reciprocal mean excess beyond its threshold.
    """
    if not 0 < lower_q < upper_q < 1:
        raise ValueError("need 0 < lower_q < upper_q < 1")
    values = _values(sample, minimum=2)
    g_m = float(np.quantile(values, upper_q))
    g_M = float(np.quantile(values, lower_q))
    upper = values[values >= g_m] - g_m
    lower = g_M - values[values <= g_M]
    for name, excess in (("upper", upper), ("lower", lower)):
        if excess.size < MIN_TAIL_OBS:
            raise TailDataError(f"{name} tail has {excess.size} observations, need {MIN_TAIL_OBS}")
        if not excess.mean() > 0:
            raise TailDataError(f"{name} tail has zero mean excess")
    return TailFit(
        c_u=float(1.0 / upper.mean()),
        c_l=float(1.0 / lower.mean()),
        g_m=g_m,
        g_M=g_M,
        n_u=int(upper.size),
        n_l=int(lower.size),
    )


def tent_profile(sample, tail_fit):
    """Empirical series with the two fitted tail lines and their mean absolute residuals.

    Residuals are taken over the empirical points beyond each threshold.
    """
    upper = empirical_log_rank(sample)
    lower = empirical_log_corank(sample)
    up_mask = upper.g >= tail_fit.g_m
    lo_mask = lower.g <= tail_fit.g_M
    up_line = tail_fit.upper_line(upper.g[up_mask])
    lo_line = tail_fit.lower_line(lower.g[lo_mask])
    return TentProfile(
        upper=upper,
        lower=lower,
        upper_line=RankSeries(upper.g[up_mask], up_line, SeriesKind.LINE_UPPER, tail_fit.n_u),
        lower_line=RankSeries(lower.g[lo_mask], lo_line, SeriesKind.LINE_LOWER, tail_fit.n_l),
        upper_residual=float(np.mean(np.abs(upper.log_rank[up_mask] - up_line))),
        lower_residual=float(np.mean(np.abs(lower.log_rank[lo_mask] - lo_line))),
    )


def model_grid(sample, n_points=200, pad=0.0):
    """Evenly spaced grid over the sample range, used for model series."""
    values = _values(sample)
    lo, hi = float(values.min()), float(values.max())
    span = hi - lo
    return np.linspace(lo - pad * span, hi + pad * span, n_points)


def write_series_csv(series, path):
    """Write one or more series to a ``kind,g,log_rank`` CSV."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["kind", "g", "log_rank"])
        for s in series:
            for g, r in zip(s.g, s.log_rank):
                writer.writerow([s.kind.value, repr(float(g)), repr(float(r))])
    return path
