"""Information criteria and cross-model ranking."""

import math
from dataclasses import dataclass

from .exceptions import CriterionDomainError, MismatchedSampleError

CRITERIA = ("aic", "bic", "hqc")
TIE_TOL = 1e-9


def aic(k, log_lik):
    """Akaike information criterion ``2k - 2 lnL``."""
    if k < 0:
        raise CriterionDomainError("k must be nonnegative")
    return 2.0 * k - 2.0 * log_lik


def bic(k, n, log_lik):
    """Schwarz information criterion ``k ln(n) - 2 lnL``."""
    if n < 1:
        raise CriterionDomainError("n must be at least 1")
    return k * math.log(n) - 2.0 * log_lik


def hqc(k, n, log_lik):
    """Hannan-Quinn criterion ``2k ln(ln(n)) - 2 lnL``; needs ``n >= 3``."""
    if n < 3:
        raise CriterionDomainError("HQC needs n >= 3 so that ln(ln(n)) > 0")
    return 2.0 * k * math.log(math.log(n)) - 2.0 * log_lik


@dataclass(frozen=True)
class CriteriaRow:
    model_label: str
    k: int
    n: int
    log_lik: float
    aic: float
    bic: float
    hqc: float
    converged: bool = True

    @classmethod
    def from_values(cls, model_label, k, n, log_lik, converged=True):
        return cls(model_label, int(k), int(n), float(log_lik),
                   aic(k, log_lik), bic(k, n, log_lik), hqc(k, n, log_lik), bool(converged))

    @classmethod
    def from_fit(cls, fit):
        return cls.from_values(fit.label, fit.k, fit.n_obs, fit.log_lik, fit.converged)


@dataclass(frozen=True)
class RankingTable:
    """Criteria for competing models on one sample.

    ``winners`` maps each criterion to the label attaining the strict
    minimum, or None when the minimum is tied; ``ties`` lists the tied
    labels. Non-converged rows never win.
    """

    rows: tuple[CriteriaRow, ...]
    winners: dict
    ties: dict

    @property
    def winner_aic(self):
        return self.winners["aic"]

    @property
    def winner_bic(self):
        return self.winners["bic"]

    @property
    def winner_hqc(self):
        return self.winners["hqc"]

    def is_winner(self, label, criterion):
        return self.winners[criterion] == label


def rank_rows(rows):
    rows = list(rows)
    if not rows:
        raise ValueError("nothing to rank")
    sizes = {r.n for r in rows}
    if len(sizes) > 1:
        raise MismatchedSampleError(f"fits were made on samples of different sizes: {sorted(sizes)}")
    eligible = [r for r in rows if r.converged]
    if not eligible:
        raise ValueError("no converged fit to rank")
    winners, ties = {}, {}
    for crit in CRITERIA:
        best = min(getattr(r, crit) for r in eligible)
        tied = sorted(r.model_label for r in eligible if getattr(r, crit) - best <= TIE_TOL)
        if len(tied) == 1:
            winners[crit] = tied[0]
        else:
            winners[crit] = None
            ties[crit] = tuple(tied)
    ordered = tuple(sorted(rows, key=lambda r: (r.aic, r.model_label)))
    return RankingTable(ordered, winners, ties)


def rank_models(fits):
    """Rank fit results on a common sample by AIC, BIC and HQC."""
    return rank_rows(CriteriaRow.from_fit(f) for f in fits)
