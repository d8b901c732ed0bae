"""Acceptance criteria 1-11.

Each test records a one-line pass/fail summary (printed at the end of the
run) before asserting.  Criteria 7-9 share session-scoped regret runs over
the full permutation grids at 2,000 replications; on one core these take
roughly 45 minutes in total.
"""

import json
import logging
import math
import os
import time

import numpy as np
import pytest

from oracles import criterion, direct_recursion, loo_cv
from tsselect.cli import load_config, main
from tsselect.criteria import cross_validation, information_criterion
from tsselect.critical_values import default_table
from tsselect.dgp import DgpParams, enumerate_permutations, permutation_counts, simulate, simulate_batch
from tsselect.evaluate import IC_STRATEGIES, STRATEGIES, TEST_STRATEGIES, regret_matrix, run_cell, run_cells
from tsselect.hyptest import TestingEngine as Engine
from tsselect.hyptest import _adf_set, _level_t
from tsselect.regress import least_squares

SEED = 20240611
REGRET_REPS = 2000
WORKERS = os.cpu_count() or 1
PRESETS = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "presets")


# 1. permutation counts

def test_c01_permutation_counts(criterion_report):
    expected = {"all": 1090, "no_trend": 259, "trend": 286}
    start = time.perf_counter()
    got = {s: len(enumerate_permutations(s)) for s in expected}
    elapsed = (time.perf_counter() - start) / 3
    per_model = permutation_counts("all")
    detail = (f"got {got}, expected {expected}; {elapsed:.3f}s per scenario; per model: "
              + " ".join(f"{m}={n}" for m, n in sorted(per_model.items(), key=lambda kv: float(kv[0]))))
    ok = got == expected and elapsed < 1.0
    criterion_report(1, ok, detail)
    assert ok, detail


# 2. information criterion formulas

def test_c02_formula_oracles(criterion_report):
    rng = np.random.default_rng(2)
    t = rng.integers(10, 500, 1000)
    c = np.array([rng.integers(0, ti - 3) for ti in t])
    rss = np.exp(rng.uniform(-5, 8, 1000))
    worst = 0.0
    for kind in ("AIC", "AICc", "AICu", "SIC", "FPEu"):
        for r, ti, ci in zip(rss, t, c):
            got = information_criterion(kind, float(r), int(ti), int(ci))
            ref = criterion(kind, float(r), int(ti), int(ci))
            worst = max(worst, abs(got - ref) / max(abs(ref), 1e-300))
    ok = worst <= 1e-10
    criterion_report(2, ok, f"max relative error {worst:.2e} over 5 x 1000 triples")
    assert ok


# 3. cross-validation identity

def test_c03_cv_identity(criterion_report):
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(100):
        T = int(rng.integers(8, 31))
        k = int(rng.integers(1, 6))
        X = rng.standard_normal((T, k))
        y = X @ rng.standard_normal(k) + rng.standard_normal(T)
        ref = loo_cv(X, y)
        worst = max(worst, abs(cross_validation(least_squares(X, y)) - ref) / ref)
    ok = worst <= 1e-8
    criterion_report(3, ok, f"max relative gap to leave-one-out refits {worst:.2e} over 100 instances")
    assert ok


# 4. DGP equivalence

def test_c04_dgp_equivalence(criterion_report):
    start = time.perf_counter()
    worst = 0.0
    perms = enumerate_permutations("all")
    for i, (theta, _) in enumerate(perms):
        for s in range(3):
            u, e = np.random.default_rng([i, s]).standard_normal((2, 150))
            sim = simulate(theta, 0, shocks=(u, e))
            y, z = direct_recursion(theta, u, e)
            worst = max(worst, np.max(np.abs(sim.y - y)) / max(1.0, np.abs(y).max()),
                        np.max(np.abs(sim.z - z)) / max(1.0, np.abs(z).max()))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed < 60
    criterion_report(4, ok, f"max scaled gap {worst:.1e} over {len(perms)} permutations x 3 seeds in {elapsed:.1f}s")
    assert ok


# 5. test sizes at T = 50

def _size_rates():
    T, reps = 50, 10_000
    tab = default_table()
    rates = {}
    walks = simulate_batch(DgpParams(), 51, range(reps), T=T, presample=3)
    for det in ("c", "ct"):
        tau = _level_t(_adf_set(walks.y, 3, T, det).fits[0])
        rates[f"ADF-{det}"] = {a: np.mean(tau < tab.lookup("adf", det, a, T)) for a in (0.01, 0.05, 0.10)}
    pairs = simulate_batch(DgpParams(), 52, range(reps), T=T, presample=3)
    tstat = Engine(pairs, "no_trend").eg_stage()["tstat"]
    rates["EG"] = {a: np.mean(tstat < tab.lookup("eg", "c", a, T)) for a in (0.01, 0.05, 0.10)}
    _, trace, _ = Engine(pairs, "no_trend").jo_select(np.zeros(reps, bool))
    rates["Jo-rc"] = {a: np.mean(trace > tab.lookup("johansen_trace", "rc", a)) for a in (0.01, 0.05, 0.10)}
    drifting = simulate_batch(DgpParams(b1=0.5, m1=0.5), 53, range(reps), T=T, presample=3)
    _, trace, _ = Engine(drifting, "all").jo_select(np.ones(reps, bool))
    rates["Jo-uc"] = {a: np.mean(trace > tab.lookup("johansen_trace", "uc", a)) for a in (0.01, 0.05, 0.10)}
    return rates


def test_c05_test_sizes(criterion_report):
    # judged at the 5% nominal level; other levels are reported
    rates = _size_rates()
    ok = True
    for name, r in rates.items():
        lo, hi = (0.03, 0.09) if name.startswith("Jo") else (0.03, 0.07)
        ok &= lo <= r[0.05] <= hi
    detail = "; ".join(f"{n} " + "/".join(f"{100 * r[a]:.2f}" for a in (0.01, 0.05, 0.10))
                       for n, r in rates.items())
    criterion_report(5, ok, f"rejection % at 1/5/10% nominal: {detail}")
    assert ok


# 6. Figure 3a shape

def test_c06_figure_3a(tmp_path, criterion_report):
    out = tmp_path / "fig3a.csv"
    assert main(["sweep", "--config", os.path.join(PRESETS, "fig3a.toml"), "--workers", str(WORKERS),
                 "--out", str(out)]) == 0
    import csv

    rows = list(csv.DictReader(out.read_text().splitlines()[1:]))
    freq = {(float(r["b6"]), r["strategy"]): float(r["freq_model"]) for r in rows}
    assert {int(r["replications"]) for r in rows} == {1000}
    rising = [s for s in STRATEGIES if freq[(1.0, s)] > freq[(0.1, s)]]
    rivals = ("AIC", "CV", "Jo-5%", "Jo-10%")
    sic_best = []
    for b6 in (0.6, 0.7, 0.8, 0.9, 1.0):
        sic_best.append(freq[(b6, "SIC")] >= max(freq[(b6, r)] for r in rivals) - 0.02)
    ok = len(rising) == len(STRATEGIES) and all(sic_best)
    detail = (f"rising {len(rising)}/{len(STRATEGIES)}; SIC best at b6>=0.6: {sic_best}; at b6=1.0 "
              + " ".join(f"{s}={freq[(1.0, s)]:.3f}" for s in ("SIC",) + rivals))
    criterion_report(6, ok, detail)
    assert ok


# 7-9. regret tables

_runs = {}


@pytest.fixture(scope="session")
def regret_cells():
    def get(scenario):
        if scenario not in _runs:
            perms = enumerate_permutations(scenario)
            _runs[scenario] = run_cells([p[0] for p in perms], STRATEGIES, REGRET_REPS, SEED, scenario,
                                        workers=WORKERS)
        return _runs[scenario]

    return get


def test_c07_table3_model_frequency(regret_cells, criterion_report):
    table = regret_matrix(regret_cells("no_trend"), "model_freq")
    spot = table.regret("EG-5%", "AIC")
    ok = table.pairwise_minimax("SIC") and abs(spot - 0.94) <= 0.05
    criterion_report(7, ok, f"SIC pairwise minimax: {table.pairwise_minimax('SIC')} "
                            f"(winner {table.minimax_winner()}); regret(EG-5%, AIC) = {spot:.4f}")
    assert ok


def test_c08_table4_relation_frequency(regret_cells, criterion_report):
    table = regret_matrix(regret_cells("no_trend"), "relation_freq")
    ok = table.pairwise_minimax("AIC")
    lost = [o for o in STRATEGIES if o != "AIC" and not table.beats("AIC", o)]
    criterion_report(8, ok, f"AIC pairwise minimax: {ok} (winner {table.minimax_winner()}); not beaten: {lost}")
    assert ok


class _Collect(logging.Handler):
    def __init__(self):
        super().__init__(logging.INFO)
        self.messages = []

    def emit(self, record):
        self.messages.append(record.getMessage())


def test_c09_tables5to7_ln_l2(regret_cells, criterion_report):
    logger = logging.getLogger("tsselect")
    handler = _Collect()
    old_level = logger.level
    logger.addHandler(handler)
    logger.setLevel(logging.INFO)
    parts, ok = [], True
    try:
        for scenario in ("no_trend", "trend", "all"):
            handler.messages.clear()
            cells = regret_cells(scenario)
            table = regret_matrix(cells, "neg_ln_l2")
            worst = table.max_regret.max(axis=1)
            idx = {s: i for i, s in enumerate(table.strategies)}
            ic_max = max(worst[idx[s]] for s in IC_STRATEGIES)
            ht_min = min(worst[idx[s]] for s in TEST_STRATEGIES)
            excluded = sorted({str(cells[c].true_model) for c, _, _ in table.exclusions})
            logged = any("excluded" in m for m in handler.messages) or not table.exclusions
            sic = table.pairwise_minimax("SIC")
            ok &= sic and ht_min > ic_max and logged
            parts.append(f"{scenario}: SIC minimax {sic}, max regret IC <= {ic_max:.3f} < HT >= {ht_min:.3f}, "
                         f"{len(table.exclusions)} exclusions (true models {','.join(excluded) or '-'}) "
                         f"logged {logged}")
    finally:
        logger.removeHandler(handler)
        logger.setLevel(old_level)
    criterion_report(9, ok, "; ".join(parts))
    assert ok


# 10. full-size runs are supported

def test_c10_ten_thousand_reps(tmp_path, criterion_report):
    cfg = load_config(os.path.join(PRESETS, "table3.toml"), "regret")
    cfg.reps = 10_000
    cfg.validate()
    cell = run_cell(DgpParams(b1=1, b3=-1, b6=1, m1=1, m3=0.5), STRATEGIES, 10_000, SEED, "no_trend")
    ok = cell.replications == 10_000 and all(
        sum(n for _, n in cell.scores[s].chosen_counts) == 10_000 for s in STRATEGIES)
    criterion_report(10, ok, f"10,000-rep configuration validates; one cell run at 10,000 reps "
                             f"(SIC model frequency {cell.scores['SIC'].freq_correct_model:.4f})")
    assert ok


# 11. evidence weights

def test_c11_evidence_weights(tmp_path, criterion_report):
    perms = enumerate_permutations("all")
    worst_sum, mismatches, runs = 0.0, 0, 0
    for i in range(0, len(perms), 45):
        theta = perms[i][0]
        s = simulate(theta, SEED, cell=i)
        data = tmp_path / f"d{i}.csv"
        data.write_text("y,z\n" + "\n".join(f"{float(a)!r},{float(b)!r}"
                                            for a, b in zip(s.y[-53:], s.z[-53:])) + "\n")
        out = tmp_path / f"r{i}.json"
        assert main(["select", "--input", str(data), "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        for crit, entries in report["weights"].items():
            runs += 1
            worst_sum = max(worst_sum, abs(math.fsum(e["weight"] for e in entries) - 1.0))
            best_w = max(e["weight"] for e in entries)
            best_ic = min(e["ic"] for e in entries)
            argmax_w = {e["model"] for e in entries if e["weight"] == best_w}
            argmin_ic = {e["model"] for e in entries if e["ic"] == best_ic}
            mismatches += argmax_w != argmin_ic
    ok = worst_sum <= 1e-12 and mismatches == 0
    criterion_report(11, ok, f"{runs} weight tables: max |sum w - 1| = {worst_sum:.1e}, argmax/argmin mismatches {mismatches}")
    assert ok
