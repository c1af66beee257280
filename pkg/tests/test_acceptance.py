"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS`` / ``FAIL`` line with the measured
quantities, then asserts the criterion at its stated tolerance.
"""

import filecmp
import math
import time

import numpy as np
import pytest
from scipy import integrate, stats

from growthfit import distributions as dist
from growthfit import records
from growthfit.cli import main
from growthfit.diagnostics import fit_exponential_tails, tent_profile
from growthfit.distributions import ModelSpec, StudentTParams, TMixParams
from growthfit.estimation import FitOptions, fit_mle
from growthfit.quadrature import integrate as gk_integrate
from growthfit.samples import write_rates_csv
from growthfit.selection import aic, bic, hqc

from reference_values import ADLN, ST12, STUDENT_T, STUDENT_T_SE, CRITERIA_ROWS, CRITERIA_NAMED, all_cases

pytestmark = pytest.mark.acceptance

FRANCE_T = STUDENT_T["France"]
FRANCE_N = 36_643


@pytest.fixture
def report(capsys):
    def emit(number, passed, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if passed else 'FAIL'} criterion {number}: {detail}")
        return passed
    return emit


def _locations_and_scale(params):
    if isinstance(params, TMixParams):
        return [c[0] for c in params.components], max(c[1] for c in params.components)
    if isinstance(params, dist.ASubParams):
        return [params.mu], max(params.a_l, params.a_r)
    return [params.mu], params.sigma


def test_criterion_1_normalization(report):
    t0 = time.time()
    worst_own = worst_scipy = 0.0
    for _, spec, params in all_cases():
        locs, scale = _locations_and_scale(params)
        lo, hi = min(locs) - 60 * scale, max(locs) + 60 * scale
        f = lambda x: dist.pdf(spec, params, x)
        # adaptive Gauss-Kronrod over the body, closed-form tail masses beyond it
        body = gk_integrate(f, lo, hi, tol=1e-10)
        own = body + dist.cdf(spec, params, lo) + dist.sf(spec, params, hi)
        # independent check with QUADPACK over the whole line
        g = lambda x: float(f(x))
        ref = (integrate.quad(g, -np.inf, lo)[0]
               + integrate.quad(g, lo, hi, points=sorted(set(locs)), limit=1000, epsabs=1e-13)[0]
               + integrate.quad(g, hi, np.inf)[0])
        worst_own = max(worst_own, abs(own - 1))
        worst_scipy = max(worst_scipy, abs(ref - 1))
    elapsed = time.time() - t0
    ok = worst_own < 1e-6 and worst_scipy < 1e-6 and elapsed < 60
    report(1, ok, f"{len(all_cases())} published parameter sets; max |mass-1| = {worst_own:.2e} (GK15), "
                  f"{worst_scipy:.2e} (QUADPACK); {elapsed:.1f} s")
    assert ok


def test_criterion_2_reductions(report):
    asub = ModelSpec.from_label("asub")
    g = np.linspace(-2.0, 2.0, 100)
    # aSub with b = 1 against the asymmetric Laplace density
    p = dist.ASubParams(0.3, 0.7, 1.0, 1.0, 0.1)
    scale = np.where(g < p.mu, p.a_l, p.a_r)
    laplace = np.exp(-np.abs(g - p.mu) / scale) / (p.a_l + p.a_r)
    err_laplace = float(np.max(np.abs(dist.pdf(asub, p, g) - laplace)))
    # aSub with b = 2 and equal scales against the normal density
    a = 0.4
    err_normal = float(np.max(np.abs(dist.pdf(asub, dist.ASubParams(a, a, 2.0, 2.0, 0.1), g)
                                     - stats.norm.pdf(g, 0.1, a))))
    # Student t with nu = 1e6 against the normal on |z| <= 6
    z = np.linspace(-6, 6, 100)
    err_t = float(np.max(np.abs(dist.pdf(ModelSpec.from_label("student_t"), StudentTParams(0.0, 1.0, 1e6), z)
                                - stats.norm.pdf(z))))
    ok = err_laplace <= 1e-12 and err_normal <= 1e-12 and err_t < 1e-5
    report(2, ok, f"aSub~Laplace {err_laplace:.1e}, aSub~Normal {err_normal:.1e} (tol 1e-12); "
                  f"t(1e6)~Normal {err_t:.1e} (tol 1e-5)")
    assert ok


def test_criterion_3_adln_tail_rates(report):
    spec, p = ModelSpec.from_label("adln"), ADLN["Germany"]
    lp = lambda g: dist.log_pdf(spec, p, g)
    upper = lp(3.0) - lp(2.0)
    lower = lp(-2.0) - lp(-3.0)
    rel_u = abs(upper + p.alpha) / p.alpha
    rel_l = abs(lower - p.beta) / p.beta
    ok = rel_u < 0.01 and rel_l < 0.01
    report(3, ok, f"upper slope {upper:.4f} vs -alpha {-p.alpha} (rel {rel_u:.1e}); "
                  f"lower slope {lower:.4f} vs beta {p.beta} (rel {rel_l:.1e})")
    assert ok


@pytest.fixture(scope="module")
def france_refits():
    """Twenty seeded refits of the Student t model to n = 36,643 draws at the France estimates."""
    spec = ModelSpec.from_label("student_t")
    fits = []
    for rep in range(20):
        x = dist.draw(spec, FRANCE_T, FRANCE_N, np.random.default_rng([4, rep]))
        fits.append(fit_mle(spec, x, FitOptions(seed=rep)))
    return fits


def test_criterion_4_simulate_and_refit(report, france_refits):
    se = STUDENT_T_SE["France"]
    bounds = {name: 3 * se[name] for name in ("mu", "sigma", "nu")}
    truth = dist.params_as_dict(FRANCE_T)
    target = 20122 / FRANCE_N
    hits = 0
    for fit in france_refits:
        est = dist.params_as_dict(fit.params)
        hits += all(abs(est[k] - truth[k]) <= bounds[k] for k in bounds) and fit.converged
    per_obs = [fit.log_lik / FRANCE_N for fit in france_refits]
    mean_ll = float(np.mean(per_obs))
    within = sum(abs(v - target) <= 0.01 for v in per_obs)
    ok = hits >= 19 and abs(mean_ll - target) <= 0.01
    report(4, ok, f"all three parameters within 3 SE in {hits}/20 replications (need 19); "
                  f"mean lnL/n {mean_ll:.4f} vs {target:.4f} (tol 0.01; {within}/20 replications individually within)")
    assert ok


def test_criterion_5_criteria_arithmetic(report):
    def gap(row):
        k, n, log_lik, a, b, h = CRITERIA_ROWS[row]
        return max(abs(aic(k, log_lik) - a), abs(bic(k, n, log_lik) - b), abs(hqc(k, n, log_lik) - h))

    named = max(gap(row) for row in CRITERIA_NAMED)
    everything = max(gap(row) for row in CRITERIA_ROWS)
    ok = named <= 2 and everything <= 2
    report(5, ok, f"named rows max |criterion - published| = {named:.2f}; all {len(CRITERIA_ROWS)} consistent rows "
                  f"max {everything:.2f} (tol 2)")
    assert ok


def test_criterion_6_selection_power(report, tmp_path):
    spec = ModelSpec.from_label("2st12")
    wins, normal_wins = 0, 0
    for rep in range(10):
        sim = tmp_path / f"sim{rep}"
        x = dist.draw(spec, ST12["USA Ip"], 10_000, np.random.default_rng([6, rep]))
        sim.mkdir()
        dist_csv = write_rates_csv(x, sim / "rates.csv")
        out = tmp_path / f"cmp{rep}"
        assert main(["compare", "--input", str(dist_csv), "--families", "normal,student_t,2st12",
                     "--seed", str(rep), "--out", str(out)]) == 0
        ranking = {r["family"]: r for r in records.read_jsonl(out / "ranking.jsonl")}
        wins += ranking["2st12"]["best_aic"]
        normal_wins += ranking["normal"]["best_aic"]
    ok = wins >= 9 and normal_wins == 0
    report(6, ok, f"2st12 selected by AIC in {wins}/10 (need 9); normal selected {normal_wins} times (need 0)")
    assert ok


def test_criterion_7_sampler_cdf_agreement(report):
    n = 100_000
    crit = 1.63 / math.sqrt(n)
    worst, worst_id = 0.0, None
    for case_id, spec, params in all_cases():
        x = np.asarray(dist.draw(spec, params, n, np.random.default_rng(7)))
        d = stats.kstest(x, lambda g: dist.cdf(spec, params, g)).statistic
        if d > worst:
            worst, worst_id = d, case_id
    ok = worst < crit
    report(7, ok, f"{len(all_cases())} parameter sets, max KS {worst:.5f} ({worst_id}) vs 1.63/sqrt(n) = {crit:.5f}")
    assert ok


def test_criterion_8_standard_errors(report, france_refits):
    x = np.random.default_rng(8).normal(0.099, 0.150, FRANCE_N)
    nf = fit_mle(ModelSpec.from_label("normal"), x)
    s = nf.params.sigma
    rel_mu = abs(nf.std_errors["mu"] / (s / math.sqrt(FRANCE_N)) - 1)
    rel_sigma = abs(nf.std_errors["sigma"] / (s / math.sqrt(2 * FRANCE_N)) - 1)
    # typical (median) SE over the seeded refits; single draws scatter with the estimated nu
    published = STUDENT_T_SE["France"]
    per_rep = {k: np.array([f.std_errors[k] / v for f in france_refits]) for k, v in published.items()}
    ratios = {k: float(np.median(r)) for k, r in per_rep.items()}
    inside = sum(all(1 / 1.5 <= per_rep[k][i] <= 1.5 for k in per_rep) for i in range(len(france_refits)))
    ok = rel_mu <= 1e-3 and rel_sigma <= 1e-3 and all(1 / 1.5 <= r <= 1.5 for r in ratios.values())
    report(8, ok, f"normal SE rel. errors {rel_mu:.1e}, {rel_sigma:.1e} (tol 1e-3); median t SE / published: "
                  + ", ".join(f"{k} {r:.2f}" for k, r in ratios.items())
                  + f" (need within [0.67, 1.5]; {inside}/{len(france_refits)} replications individually within)")
    assert ok


def test_criterion_9_tail_diagnostics(report):
    n = 100_000
    lap = np.random.default_rng(9).laplace(0.0, 0.1, n)
    lfit = fit_exponential_tails(lap)
    lprof = tent_profile(lap, lfit)
    laplace_ok = (9.5 <= lfit.c_u <= 10.5 and 9.5 <= lfit.c_l <= 10.5
                  and lprof.upper_residual < 0.1 and lprof.lower_residual < 0.1)
    nor = np.random.default_rng(99).normal(0.0, 1.0, n)
    nprof = tent_profile(nor, fit_exponential_tails(nor))
    normal_ok = nprof.upper_residual > 0.1
    ok = laplace_ok and normal_ok
    report(9, ok, f"Laplace: c_u {lfit.c_u:.3f}, c_l {lfit.c_l:.3f}, residuals {lprof.upper_residual:.4f}, "
                  f"{lprof.lower_residual:.4f} -> {'ok' if laplace_ok else 'not ok'}; "
                  f"Normal upper residual {nprof.upper_residual:.4f} (need > 0.1) -> {'ok' if normal_ok else 'not ok'}")
    assert ok


def test_criterion_10_determinism(report, tmp_path):
    def pipeline(root):
        sim = root / "sim"
        assert main(["simulate", "--family", "3st", "--param", "mu_1=0.175", "--param", "sigma_1=0.12",
                     "--param", "mu_2=0.046", "--param", "sigma_2=0.091", "--param", "mu_3=0.047",
                     "--param", "sigma_3=0.012", "--param", "p_1=0.408", "--param", "p_2=0.588",
                     "--n", "3000", "--seed", "10", "--out", str(sim)]) == 0
        data = str(sim / "simulated.csv")
        assert main(["stats", "--input", data, "--out", str(root / "stats")]) == 0
        assert main(["compare", "--input", data, "--families", ",".join(dist.MODEL_LABELS),
                     "--seed", "10", "--starts", "3", "--out", str(root / "cmp")]) == 0
        assert main(["diagnose", "--input", data, "--families", "student_t", "--seed", "10",
                     "--starts", "3", "--out", str(root / "diag")]) == 0
        return sorted(p.relative_to(root) for p in root.rglob("*") if p.is_file())

    a, b = pipeline(tmp_path / "a"), pipeline(tmp_path / "b")
    machine = [p for p in a if p.suffix in (".jsonl", ".csv", ".json")]
    same = a == b and all(filecmp.cmp(tmp_path / "a" / p, tmp_path / "b" / p, shallow=False) for p in a)
    report(10, same, f"{len(a)} artifacts ({len(machine)} machine-readable) byte-identical across two runs: {same}")
    assert same
