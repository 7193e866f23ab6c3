"""End-to-end acceptance checks at their stated tolerances.

Each test prints one ACCEPTANCE line so the gate can be read off a plain
pytest -s run.
"""
import json
import math
import time

import numpy as np
import pytest
from click.testing import CliRunner

from factorial_hpo import (
    ConfigError,
    FactorDef,
    ObjectiveSpec,
    SearchSpace,
    StudyConfig,
    analyze,
    collapse,
    construct_oa,
    construct_olh,
    default_hyper_hyperparams,
    evaluate_batch,
    run_study,
)
from factorial_hpo.cli import cli
from factorial_hpo import star_discrepancy
from factorial_hpo.objectives import branin, rosenbrock, sphere
from factorial_hpo.persistence import read_trials, replay_analysis
from factorial_hpo.sampler import max_columns, sample_lhs

from conftest import assert_latin, assert_strength_two

PRIMES_OLH = (2, 3, 5, 7, 11)
PRIMES_OA = (2, 3, 5, 7)


def _report(name):
    print(f"ACCEPTANCE PASS: {name}")


def test_01_design_validity_suite():
    start = time.monotonic()
    for n in PRIMES_OLH:
        for d in range(1, max_columns(n) + 1):
            design = construct_olh(n, d, seed=n * 100 + d)
            assert_latin(design.cells)
            if d >= 2:
                corr = np.corrcoef(design.cells, rowvar=False)
                np.fill_diagonal(corr, 0.0)
                assert np.abs(corr).max() <= 1e-12, (n, d)
            table = collapse(design, np.zeros(n * n), n)
            assert_strength_two(table.levels, n)
    elapsed = time.monotonic() - start
    assert elapsed < 10.0
    _report(f"design validity suite ({elapsed:.1f}s)")


def test_02_oa_pair_frequency_oracle():
    start = time.monotonic()
    for n in PRIMES_OA:
        for k in range(2, n + 2):
            assert_strength_two(construct_oa(n, k).cells, n)
    elapsed = time.monotonic() - start
    assert elapsed < 5.0
    _report(f"orthogonal-array pair-frequency oracle ({elapsed:.1f}s)")


def test_03_analyzer_fidelity_worked_example():
    # additive level effects on a strength-2 layout with marginal-mean
    # variances engineered to the 0.55 / 0.37 / 0.08 split, the third
    # factor peaking in its middle range
    oa = construct_oa(3, 3)
    s1 = math.sqrt(0.55 * 3 / 2)
    s2 = math.sqrt(0.37 * 3 / 2)
    effects = [(s1, 0.0, -s1), (s2, 0.0, -s2), (-0.2, 0.4, -0.2)]
    perf = np.zeros(9)
    for f, eff in enumerate(effects):
        perf += np.asarray(eff)[oa.cells[:, f]]
    design = (oa.cells + 0.5) / 3  # level midpoints in [0,1]
    table = collapse(design, perf, 3)
    outcome = analyze(table, ("lr", "lam", "units"), beta=0.1)
    assert outcome.importance == pytest.approx((0.55, 0.37, 0.08), abs=0.01)
    assert outcome.frozen == (("units", 0.5),)
    _report("analyzer fidelity: freezes only the least important factor at 0.5")


def test_04_discrepancy_ordering():
    # 81 rows would need 9 levels (not prime); 121 = 11^2 is the nearest
    # feasible size for the orthogonal construction
    start = time.monotonic()
    n_seeds, d, n_runs = 100, 4, 121
    olh_vals, iid_vals = [], []
    for s in range(n_seeds):
        design = construct_olh(11, d, seed=s)
        olh_vals.append(star_discrepancy(design, seed=10_000 + s).value)
        pts = np.random.default_rng(20_000 + s).uniform(size=(n_runs, d))
        iid_vals.append(star_discrepancy(pts, seed=30_000 + s).value)
    mean_olh, mean_iid = np.mean(olh_vals), np.mean(iid_vals)
    elapsed = time.monotonic() - start
    assert elapsed < 60.0
    assert mean_olh < 0.8 * mean_iid, (mean_olh, mean_iid)
    _report(
        f"discrepancy ordering: OLH {mean_olh:.4f} < 0.8 x iid {mean_iid:.4f} "
        f"({elapsed:.1f}s)"
    )


def test_05_variance_ordering():
    start = time.monotonic()
    n_seeds, n_runs, d = 1000, 25, 4

    def f(cells):
        return cells.sum(axis=1) + cells[:, 0] * cells[:, 1]

    olh_means, lhs_means, iid_means = [], [], []
    for s in range(n_seeds):
        olh_means.append(f(construct_olh(5, d, seed=s).cells).mean())
        lhs_means.append(f(sample_lhs(n_runs, d, "random", seed=s).cells).mean())
        iid_means.append(
            f(np.random.default_rng(50_000 + s).uniform(size=(n_runs, d))).mean()
        )
    var_olh = np.var(olh_means)
    var_lhs = np.var(lhs_means)
    var_iid = np.var(iid_means)
    elapsed = time.monotonic() - start
    assert elapsed < 60.0
    assert var_olh <= 1.05 * var_lhs, (var_olh, var_lhs)
    assert var_lhs <= 1.05 * var_iid, (var_lhs, var_iid)
    _report(
        f"variance ordering: {var_olh:.2e} <= {var_lhs:.2e} <= {var_iid:.2e} "
        f"({elapsed:.1f}s)"
    )


def _embedded_branin(x):
    return branin(x[:2])  # dimensions 3 and 4 are inert padding


OPT_CASES = (
    (
        "branin+padding",
        _embedded_branin,
        ((-5.0, 10.0), (0.0, 15.0), (0.0, 1.0), (0.0, 1.0)),
    ),
    ("sphere", sphere, ((-5.0, 5.0),) * 3),
    ("rosenbrock", rosenbrock, ((-2.0, 2.0),) * 2),
)


def test_06_optimizer_beats_random_search():
    start = time.monotonic()
    n_seeds, budget = 50, 27
    losses = []
    for name, func, bounds in OPT_CASES:
        spec = ObjectiveSpec(kind="builtin", name=name, direction="minimize",
                             func=func)
        space = SearchSpace(tuple(
            FactorDef(f"x{i + 1}", "continuous", lo, hi)
            for i, (lo, hi) in enumerate(bounds)
        ))
        opt_best, rnd_best = [], []
        for s in range(n_seeds):
            config = StudyConfig(
                space=space, objective=spec, max_iterations=3,
                samples_per_iteration_min=9, total_budget=budget,
                workers=1, seed=s, final_strategy="greedy",
            )
            opt_best.append(run_study(config).best_objective_value)
            rng = np.random.default_rng(90_000 + s)
            lo = np.array([b[0] for b in bounds])
            hi = np.array([b[1] for b in bounds])
            pts = lo + rng.uniform(size=(budget, len(bounds))) * (hi - lo)
            rnd_best.append(min(func(p) for p in pts))
        med_opt = float(np.median(opt_best))
        med_rnd = float(np.median(rnd_best))
        verdict = "beats" if med_opt < med_rnd else "LOSES TO"
        print(f"  {name}: optimizer median {med_opt:.4g} {verdict} "
              f"random {med_rnd:.4g}")
        if med_opt >= med_rnd:
            losses.append((name, med_opt, med_rnd))
    elapsed = time.monotonic() - start
    assert elapsed < 300.0
    if losses:
        print("ACCEPTANCE FAIL: optimizer beats random search "
              f"(losing cases: {losses})")
        raise AssertionError(losses)
    _report(f"optimizer beats random search on all objectives ({elapsed:.1f}s)")


def test_07_parallel_schedule_bound():
    delay = 0.1
    spec = ObjectiveSpec(kind="builtin", name="sleepy", direction="maximize",
                         func=lambda x: time.sleep(delay) or 0.0)
    configs = [{"x": float(i)} for i in range(9)]
    start = time.monotonic()
    records = evaluate_batch(configs, spec, workers=3)
    elapsed = time.monotonic() - start
    assert all(r.ok for r in records)
    bound = 1.5 * delay * math.ceil(9 / 3)
    assert elapsed <= bound, elapsed
    _report(f"parallel schedule: 9 x 100ms on 3 workers in {elapsed * 1000:.0f}ms <= 450ms")


STUDY_TOML = """
[study]
name = "det"
seed = 13
max_iterations = 3

[objective]
kind = "builtin"
name = "sphere"

[[space]]
name = "x1"
kind = "continuous"
lower = -5.0
upper = 5.0

[[space]]
name = "x2"
kind = "continuous"
lower = -5.0
upper = 5.0

[[space]]
name = "x3"
kind = "continuous"
lower = -5.0
upper = 5.0
"""


def test_08_worker_count_determinism(tmp_path):
    (tmp_path / "det.toml").write_text(STUDY_TOML)
    runner = CliRunner()
    outs = {}
    for workers in (1, 8):
        out = tmp_path / f"w{workers}"
        result = runner.invoke(cli, [
            "run", str(tmp_path / "det.toml"),
            "--workers", str(workers), "--out-dir", str(out),
        ])
        assert result.exit_code == 0, result.output
        outs[workers] = out
    r1 = json.loads((outs[1] / "det.result.json").read_text())
    r8 = json.loads((outs[8] / "det.result.json").read_text())
    assert r1["best_config"] == r8["best_config"]
    t1 = read_trials(outs[1] / "det.trials.jsonl")
    t8 = read_trials(outs[8] / "det.trials.jsonl")
    assert [t.value for t in t1] == [t.value for t in t8]
    _report("worker-count determinism: identical best_config and trial values")


def test_09_hyper_hyperparameter_defaults():
    r, beta = default_hyper_hyperparams(81, 3)
    assert r == 9
    assert beta < 1 / 9
    with pytest.raises(ConfigError):
        collapse(np.full((9, 1), 0.5), np.zeros(9), 4)  # 4 > floor(sqrt(9))
    _report("hyper-hyperparameter defaults: R=9, beta < 1/9, range cap enforced")


def test_10_replay_equivalence(tmp_path):
    (tmp_path / "det.toml").write_text(STUDY_TOML)
    runner = CliRunner()
    result = runner.invoke(cli, [
        "run", str(tmp_path / "det.toml"), "--out-dir", str(tmp_path),
    ])
    assert result.exit_code == 0, result.output
    stored = json.loads((tmp_path / "det.analysis.json").read_text())
    records = read_trials(tmp_path / "det.trials.jsonl")
    assert stored
    for report in stored:
        outcome = replay_analysis(
            records, report["range_count"], report["outcome"]["beta"],
            iteration=report["iteration"],
        )
        replayed = json.dumps(outcome.to_dict(), indent=2).encode()
        original = json.dumps(report["outcome"], indent=2).encode()
        assert replayed == original
    _report("replay equivalence: stored log reproduces analysis byte-identically")
