"""Acceptance criteria; each test prints one PASS/FAIL line with its measured numbers."""

import math
import os
import time

import numpy as np
import pytest
from scipy import special, stats

from ctrm.cli import main
from ctrm.experiment import draw_rescaled, run_convergence
from ctrm.govern import laplace_domain_check, residual_study
from ctrm.limits import (
    LimitCdfRequest,
    coupled_ctrm_cdf,
    coupled_octrm_cdf,
    limit_cdf_grid,
    limit_cdf_via_inversion,
    prelimit_cdf_exact,
    prelimit_cdf_via_inversion,
    uncoupled_cdf,
)
from ctrm.model import CoupledProductFrechet, ExponentialIndependent, IndependentStableFrechet
from ctrm.rng import SeededStream, sample_pair, sample_stable_subordinator

GRID = np.logspace(-1, 1, 5)
# Pilot-calibrated convergence fixture: KS 0.0553, 0.0172, 0.00477.
AC5_SEED = 20240601
AC5_CS = (1e2, 1e3, 1e4)
AC5_N = 100_000
FIXTURE_SEED = 20240601
KOLMOGOROV_99 = 1.6276
WORKERS = min(4, os.cpu_count() or 1)


@pytest.fixture
def report(capsys):
    def emit(name, ok, detail):
        with capsys.disabled():
            print(f"\n{name}: {'PASS' if ok else 'FAIL'} {detail}")

    return emit


def test_ac1_uncoupled_triple_agreement(report):
    t0 = time.perf_counter()
    model = IndependentStableFrechet(0.5, 1.0)
    mix = np.array([[uncoupled_cdf(0.5, 1.0, t, x, "Mixture") for x in GRID] for t in GRID])
    ser = np.array([[uncoupled_cdf(0.5, 1.0, t, x, "Series") for x in GRID] for t in GRID])
    inv = limit_cdf_grid(model, "CTRM", "Inversion", GRID, GRID)
    gap = max(np.max(np.abs(mix - ser)), np.max(np.abs(mix - inv)), np.max(np.abs(ser - inv)))
    at_one = abs(uncoupled_cdf(0.5, 1.0, 1.0, 1.0, "Series") - math.e * math.erfc(1.0))
    elapsed = time.perf_counter() - t0
    ok = gap < 1e-4 and at_one < 1e-6 and elapsed < 10
    report("AC-1", ok, f"max pairwise gap {gap:.2e} (<1e-4), |G(1,1)-e erfc(1)| {at_one:.1e} (<1e-6), {elapsed:.1f}s (<10s)")
    assert ok


def test_ac2_coupled_closed_form_vs_inversion(report):
    t0 = time.perf_counter()
    worst = 0.0
    for beta in (0.3, 0.5, 0.7):
        for gamma in (0.5, 1.0, 2.0):
            model = CoupledProductFrechet(beta, gamma)
            g = np.array([[coupled_ctrm_cdf(beta, gamma, t, x) for x in GRID] for t in GRID])
            f = np.array([[coupled_octrm_cdf(beta, gamma, t, x) for x in GRID] for t in GRID])
            worst = max(worst, np.max(np.abs(g - limit_cdf_grid(model, "CTRM", "Inversion", GRID, GRID))))
            worst = max(worst, np.max(np.abs(f - limit_cdf_grid(model, "OCTRM", "Inversion", GRID, GRID))))
    oracle = math.exp(-0.5) * special.i0(0.5)
    point = abs(coupled_ctrm_cdf(0.5, 1.0, 1.0, 1.0) - oracle)
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-4 and point < 1e-6 and elapsed < 60
    report("AC-2", ok, f"max |closed form - inversion| {worst:.2e} (<1e-4), |G(1,1) - e^-1/2 I0(1/2)| {point:.1e} (<1e-6), {elapsed:.1f}s (<60s)")
    assert ok


def test_ac3_domination_dichotomy(report):
    t0 = time.perf_counter()
    ind = IndependentStableFrechet(0.5, 1.0)
    cp = CoupledProductFrechet(0.5, 1.0)
    gi = limit_cdf_grid(ind, "CTRM", "Inversion", GRID, GRID)
    fi = limit_cdf_grid(ind, "OCTRM", "Inversion", GRID, GRID)
    gc = limit_cdf_grid(cp, "CTRM", "ClosedForm", GRID, GRID)
    fc = limit_cdf_grid(cp, "OCTRM", "ClosedForm", GRID, GRID)
    gap_ind, gap_cp = float(np.max(gi - fi)), float(np.max(gc - fc))
    dominated = bool(np.all(fi <= gi + 1e-12) and np.all(fc <= gc))
    elapsed = time.perf_counter() - t0
    ok = gap_ind < 1e-4 and gap_cp > 0.01 and dominated and elapsed < 30
    report("AC-3", ok, f"independent max(G-F) {gap_ind:.1e} (<1e-4), coupled max(G-F) {gap_cp:.3f} (>0.01), F<=G {dominated}, {elapsed:.1f}s (<30s)")
    assert ok


def test_ac4_exponential_prelimit_oracle(report):
    t0 = time.perf_counter()
    model = ExponentialIndependent(1.0)
    n = 100_000
    v, u = draw_rescaled(model, 1.0, 1.0, n, FIXTURE_SEED, WORKERS)
    parts, ok = [], True
    for which, samples, exact in (("CTRM", v, math.exp(-0.5)), ("OCTRM", u, 0.5 * math.exp(-0.5))):
        inv_err = abs(prelimit_cdf_via_inversion(model, which, 1.0, 2.0) - exact)
        assert prelimit_cdf_exact(model, which, 1.0, 2.0) == pytest.approx(exact, rel=1e-14)
        p = float(np.mean(samples <= 2.0))
        z = abs(p - exact) / math.sqrt(exact * (1 - exact) / n)
        ok &= inv_err < 1e-5 and z < 3
        parts.append(f"{which} inversion err {inv_err:.1e} (<1e-5), MC {p:.5f} vs {exact:.5f} at {z:.2f} SE (<3)")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 30
    report("AC-4", ok, "; ".join(parts) + f", {elapsed:.1f}s (<30s)")
    assert ok


def test_ac5_convergence_fixture(report):
    t0 = time.perf_counter()
    rep = run_convergence(CoupledProductFrechet(0.5, 1.0), "CTRM", 1.0, AC5_CS, AC5_N, AC5_SEED, WORKERS)
    ks = rep.ks_column
    elapsed = time.perf_counter() - t0
    ok = rep.strictly_decreasing and ks[-1] < 0.05 and elapsed < 300
    report("AC-5", ok, f"seed {AC5_SEED}, KS {', '.join(f'{k:.5f}' for k in ks)} strictly decreasing {rep.strictly_decreasing}, KS(1e4) < 0.05, {elapsed:.1f}s (<300s)")
    assert ok


def test_ac6_governing_equations(report):
    t0 = time.perf_counter()
    cp = CoupledProductFrechet(0.5, 1.0)
    lap = max(
        c.rel_error
        for which in ("CTRM", "OCTRM")
        for c in laplace_domain_check(cp, which, [0.5, 1.0, 2.0], [0.5, 1.0, 2.0])
    )
    ratios = []
    for model, which in ((IndependentStableFrechet(0.5, 1.0), "CTRM"), (cp, "CTRM"), (cp, "OCTRM")):
        for x in (0.5, 1.0, 2.0):
            study = residual_study(model, which, x, [2e-3, 1e-3, 5e-4])
            ratios += [b[1] / a[1] for a, b in zip(study, study[1:])]
    elapsed = time.perf_counter() - t0
    ok = lap < 1e-3 and all(0.4 <= r <= 0.6 for r in ratios) and elapsed < 120
    report("AC-6", ok, f"Laplace-domain max rel err {lap:.1e} (<1e-3), GL halving ratios in [{min(ratios):.3f}, {max(ratios):.3f}] (within [0.4, 0.6]), {elapsed:.1f}s (<120s)")
    assert ok


def test_ac7_sampler_correctness(report):
    t0 = time.perf_counter()
    n = 100_000
    w = sample_stable_subordinator(0.5, SeededStream(FIXTURE_SEED, 0), n)
    d_stable = stats.kstest(w, lambda t: special.erfc(0.5 / np.sqrt(t))).statistic
    _, j = sample_pair(CoupledProductFrechet(0.5, 1.0), SeededStream(FIXTURE_SEED, 1), n)
    d_jump = stats.kstest(j, lambda x: np.exp(-(x**-0.5))).statistic
    crit = KOLMOGOROV_99 / math.sqrt(n)
    elapsed = time.perf_counter() - t0
    ok = d_stable < crit and d_jump < crit and elapsed < 10
    report("AC-7", ok, f"KS stable {d_stable:.5f}, coupled jump {d_jump:.5f} (< 99% critical {crit:.5f}), {elapsed:.1f}s (<10s)")
    assert ok


AC8_RUNS = [
    ("simulate", ["--n-samples", "3000", "--chunk-size", "1000", "--c", "10,1000", "--seed", "11"]),
    ("simulate", ["--format", "json", "--n-samples", "500", "--which", "OCTRM", "--model", "independent", "--beta", "0.7", "--alpha", "2"]),
    ("cdf", ["--methods", "Series,Inversion", "--which", "OCTRM"]),
    ("cdf", ["--format", "json", "--model", "exponential", "--rate", "2", "--methods", "Inversion,ClosedForm", "--x-min", "1.5"]),
    ("invert", ["--x-count", "3"]),
    ("converge", ["--n-samples", "4000", "--chunk-size", "1000", "--c", "100,10000", "--seed", "5"]),
    ("govern-check", ["--x-count", "2", "--h", "0.004,0.002", "--xi", "0.5,2"]),
]


def test_ac8_cli_reproducibility(report, tmp_path):
    failures = []
    for i, (command, argv) in enumerate(AC8_RUNS):
        first, second = tmp_path / f"{i}_a.out", tmp_path / f"{i}_b.out"
        assert main([command, *argv, "--workers", "1", "--out", str(first)]) == 0
        assert main([command, "--config", str(first), "--workers", "4", "--out", str(second)]) == 0
        if first.read_bytes() != second.read_bytes():
            failures.append(command)
    ok = not failures
    report("AC-8", ok, f"{len(AC8_RUNS) - len(failures)}/{len(AC8_RUNS)} outputs replayed byte-identical from embedded config with workers 1 -> 4")
    assert ok
