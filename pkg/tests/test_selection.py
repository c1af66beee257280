import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from growthfit import distributions as dist
from growthfit.distributions import ModelSpec, StudentTParams
from growthfit.estimation import FitOptions, fit_mle
from growthfit.exceptions import CriterionDomainError, MismatchedSampleError
from growthfit.selection import CriteriaRow, aic, bic, hqc, rank_models, rank_rows

from reference_values import CRITERIA_ROWS

REFERENCE_SIZES = (2987, 3088, 3291, 8074, 8081, 12309, 19048, 24685, 30201, 36643)


class TestCriteria:
    def test_aic(self):
        assert aic(0, 0.0) == 0.0
        assert aic(2, 17477) == -34950
        assert aic(3, 20122) == -40238

    def test_bic(self):
        assert bic(4, 1, 0.0) == 0.0
        assert bic(2, 36643, 17477) == pytest.approx(-34932.98, abs=5e-3)
        assert bic(5, 19048, 3466) == pytest.approx(-6882.7, abs=5e-2)

    def test_hqc(self):
        assert hqc(2, 36643, 17477) == pytest.approx(-34944.6, abs=5e-2)
        assert hqc(0, 10, 100.0) == -200.0
        assert hqc(5, 36643, 20000) == pytest.approx(-39976.5, abs=5e-2)

    @pytest.mark.parametrize("row", sorted(CRITERIA_ROWS))  # every internally consistent published row
    def test_table_rows_within_rounding(self, row):
        k, n, log_lik, a, b, h = CRITERIA_ROWS[row]
        assert abs(aic(k, log_lik) - a) <= 2
        assert abs(bic(k, n, log_lik) - b) <= 2
        assert abs(hqc(k, n, log_lik) - h) <= 2

    @pytest.mark.parametrize("n", [0, 1, 2])
    def test_hqc_domain(self, n):
        with pytest.raises(CriterionDomainError):
            hqc(1, n, 0.0)

    def test_bic_domain(self):
        with pytest.raises(CriterionDomainError):
            bic(1, 0, 0.0)

    def test_row_is_exact(self):
        r = CriteriaRow.from_values("m", 3, 1000, 123.456)
        assert r.aic == 2 * 3 - 2 * 123.456
        assert r.bic == 3 * math.log(1000) - 2 * 123.456
        assert r.hqc == 2 * 3 * math.log(math.log(1000)) - 2 * 123.456

    @given(st.integers(0, 20), st.integers(3, 10**7), st.floats(-1e6, 1e6), st.floats(1e-3, 1e3))
    def test_strictly_decreasing_in_log_lik(self, k, n, log_lik, delta):
        assert aic(k, log_lik + delta) < aic(k, log_lik)
        assert bic(k, n, log_lik + delta) < bic(k, n, log_lik)
        assert hqc(k, n, log_lik + delta) < hqc(k, n, log_lik)

    def test_penalty_ordering(self):
        # ln(n) > 2 ln(ln(n)) for every n > 1 and 2 ln(ln(n)) >= 2 once n >= e^e
        for n in list(range(16, 20_000)) + list(REFERENCE_SIZES):
            assert math.log(n) > 2 * math.log(math.log(n)) >= 2


def rows(values, n=100, converged=None):
    converged = converged or [True] * len(values)
    return [CriteriaRow.from_values(f"m{i}", k, n, ll, c) for i, ((k, ll), c) in enumerate(zip(values, converged))]


class TestRanking:
    def test_single(self):
        t = rank_rows(rows([(2, 10.0)]))
        assert t.winner_aic == t.winner_bic == t.winner_hqc == "m0"
        assert t.ties == {}

    def test_sorted_by_aic(self):
        t = rank_rows(rows([(2, 10.0), (3, 30.0), (5, 20.0)]))
        assert [r.model_label for r in t.rows] == ["m1", "m2", "m0"]
        assert [r.aic for r in t.rows] == sorted(r.aic for r in t.rows)

    def test_identical_fits_tie(self):
        t = rank_rows([CriteriaRow.from_values("a", 3, 500, 42.0), CriteriaRow.from_values("b", 3, 500, 42.0)])
        for crit in ("aic", "bic", "hqc"):
            assert t.winners[crit] is None
            assert t.ties[crit] == ("a", "b")

    def test_criteria_can_disagree(self):
        # 1 extra parameter buys 1.5 log-likelihood units: enough for AIC, not for BIC at n = 10^4
        t = rank_rows(rows([(2, 0.0), (3, 1.5)], n=10_000))
        assert t.winner_aic == "m1" and t.winner_bic == "m0"

    def test_non_converged_never_wins(self):
        t = rank_rows(rows([(2, 0.0), (3, 100.0)], converged=[True, False]))
        assert t.winner_aic == t.winner_bic == t.winner_hqc == "m0"
        assert len(t.rows) == 2 and not t.rows[0].converged

    def test_all_non_converged(self):
        with pytest.raises(ValueError):
            rank_rows(rows([(2, 0.0)], converged=[False]))

    def test_mismatched_n(self):
        with pytest.raises(MismatchedSampleError):
            rank_rows([CriteriaRow.from_values("a", 2, 100, 0.0), CriteriaRow.from_values("b", 2, 101, 0.0)])

    @given(st.lists(st.tuples(st.integers(1, 8), st.floats(-1e4, 1e4)), min_size=1, max_size=6),
           st.floats(-1e4, 1e4))
    def test_shift_invariance(self, values, c):
        base = rank_rows(rows(values))
        shifted = rank_rows(rows([(k, ll + c) for k, ll in values]))
        for a, b in zip(base.rows, shifted.rows):
            assert b.aic == pytest.approx(a.aic - 2 * c, abs=1e-6)
        if all(v is not None for v in base.winners.values()):
            gaps = []
            for crit in ("aic", "bic", "hqc"):
                col = sorted(getattr(r, crit) for r in base.rows)
                gaps.append(col[1] - col[0] if len(col) > 1 else np.inf)
            if min(gaps) > 1e-6:
                assert shifted.winners == base.winners

    def test_permutation_invariance(self):
        rs = rows([(2, 10.0), (3, 30.0), (5, 20.0), (4, 30.5)])
        ref = rank_rows(rs)
        for perm in itertools.permutations(rs):
            assert rank_rows(perm) == ref


def test_student_t_beats_normal_on_t_data():
    x = dist.draw(ModelSpec.from_label("student_t"), StudentTParams(0.092, 0.115, 5.236), 36643,
                  np.random.default_rng(12))
    fits = [fit_mle(ModelSpec.from_label(m), x, FitOptions(n_starts=2)) for m in ("normal", "student_t")]
    table = rank_models(fits)
    assert table.winner_aic == table.winner_bic == table.winner_hqc == "student_t"
