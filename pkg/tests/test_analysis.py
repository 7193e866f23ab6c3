import math

import numpy as np
import pytest

from factorial_hpo import (
    AnalysisError,
    CollapsedTable,
    ConfigError,
    FactorDef,
    SearchSpace,
    analyze,
    construct_oa,
    importance_analysis,
    performance_analysis,
)


def oa_table(perf, n=3, k=3):
    """Collapsed table backed by a real strength-2 OA layout."""
    oa = construct_oa(n, k)
    levels = oa.cells + 1
    counts = np.full((k, n), n, dtype=int)
    return CollapsedTable(levels=levels, perf=np.asarray(perf, float),
                         range_count=n, counts=counts)


def effects_perf(effects, n=3):
    """perf = additive per-factor level effects on the OA(n^2, len(effects)) layout."""
    oa = construct_oa(n, len(effects))
    perf = np.zeros(n * n)
    for f, eff in enumerate(effects):
        perf += np.asarray(eff)[oa.cells[:, f]]
    return perf


class TestPerformanceAnalysis:
    def test_constant_perf_ties_to_lowest(self):
        table = oa_table(np.full(9, 0.5))
        means, best = performance_analysis(table)
        assert (means == 0.5).all()
        assert best == (1, 1, 1)

    def test_perf_equal_to_factor_level(self):
        # perf is factor 1's range index: its means are (1, 2, 3); the
        # other factors see a flat 2.0 by orthogonality
        table = oa_table(oa_table(np.zeros(9)).levels[:, 0].astype(float))
        means, best = performance_analysis(table)
        assert means[0].tolist() == [1.0, 2.0, 3.0]
        assert best[0] == 3
        for f in (1, 2):
            assert means[f].tolist() == [2.0, 2.0, 2.0]

    def test_failed_trials_excluded(self):
        perf = np.ones(9)
        perf[0] = math.nan
        table = oa_table(perf)
        means, _ = performance_analysis(table)
        assert np.isfinite(means).all()

    def test_empty_cell_raises(self):
        perf = np.ones(9)
        table = oa_table(perf)
        # fail every trial with level 1 in factor 0
        perf[table.levels[:, 0] == 1] = math.nan
        table = oa_table(perf)
        with pytest.raises(AnalysisError):
            performance_analysis(table)

    def test_best_range_marginal_mean_example(self):
        # factor 0's range 1 carries the best mean (0.819)
        eff = [(0.819 - 0.5, 0.0 - 0.5, 0.681 - 0.5), (0.0, 0.0, 0.0), (0.0, 0.0, 0.0)]
        table = oa_table(effects_perf(eff) + 0.5)
        means, best = performance_analysis(table)
        assert means[0][0] == pytest.approx(0.819)
        assert best[0] == 1


class TestImportanceAnalysis:
    def test_constant_perf_all_zero(self):
        table = oa_table(np.full(9, 2.0))
        means, _ = performance_analysis(table)
        assert importance_analysis(table, means) == (0.0, 0.0, 0.0)

    def test_single_active_factor(self):
        eff = [(-1.0, 0.0, 1.0), (0.0, 0.0, 0.0), (0.0, 0.0, 0.0)]
        table = oa_table(effects_perf(eff))
        means, _ = performance_analysis(table)
        importance = importance_analysis(table, means)
        assert importance == pytest.approx((1.0, 0.0, 0.0))

    def test_sums_to_one(self):
        rng = np.random.default_rng(3)
        table = oa_table(rng.uniform(size=9))
        means, _ = performance_analysis(table)
        importance = importance_analysis(table, means)
        assert sum(importance) == pytest.approx(1.0)
        assert all(v >= 0 for v in importance)


def worked_example_table():
    """Importances engineered to (0.55, 0.37, 0.08), third factor best in range 2."""
    s1 = math.sqrt(0.55 * 3 / 2)
    s2 = math.sqrt(0.37 * 3 / 2)
    eff = [(s1, 0.0, -s1), (s2, 0.0, -s2), (-0.2, 0.4, -0.2)]
    return oa_table(effects_perf(eff))


class TestAnalyze:
    def test_worked_freeze_example(self):
        space = SearchSpace((
            FactorDef("lr", "continuous", 0.0005, 0.01),
            FactorDef("lam", "continuous", 0.0005, 0.01),
            FactorDef("units", "integer", 64, 1024),
        ))
        outcome = analyze(worked_example_table(), space, beta=0.1)
        assert outcome.importance == pytest.approx((0.55, 0.37, 0.08))
        assert outcome.frozen == (("units", 0.5),)
        assert outcome.best_range[2] == 2

    def test_small_beta_freezes_nothing(self):
        space = SearchSpace((
            FactorDef("a", "continuous", 0, 1),
            FactorDef("b", "continuous", 0, 1),
            FactorDef("c", "continuous", 0, 1),
        ))
        outcome = analyze(worked_example_table(), space, beta=0.01)
        assert outcome.frozen == ()

    def test_constant_perf_freezes_everything(self):
        names = ("a", "b", "c")
        outcome = analyze(oa_table(np.full(9, 1.0)), names, beta=0.1)
        assert len(outcome.frozen) == 3
        # best range defaults to 1, frozen at its median
        assert all(u == pytest.approx(0.5 / 3) for _, u in outcome.frozen)

    def test_beta_must_be_positive(self):
        with pytest.raises(ConfigError):
            analyze(worked_example_table(), ("a", "b", "c"), beta=0.0)

    def test_shift_scale_invariance(self):
        table = worked_example_table()
        scaled = CollapsedTable(levels=table.levels, perf=3.0 * table.perf + 11.0,
                                range_count=table.range_count, counts=table.counts)
        a = analyze(table, ("a", "b", "c"), beta=0.1)
        b = analyze(scaled, ("a", "b", "c"), beta=0.1)
        assert a.best_range == b.best_range
        assert a.importance == pytest.approx(b.importance)
        assert a.frozen == b.frozen

    def test_freeze_monotone_in_beta(self):
        table = worked_example_table()
        names = ("a", "b", "c")
        frozen_sets = []
        for beta in (0.05, 0.1, 0.4, 0.6):
            outcome = analyze(table, names, beta=beta)
            frozen_sets.append({n for n, _ in outcome.frozen})
        for small, big in zip(frozen_sets, frozen_sets[1:]):
            assert small <= big

    def test_name_count_mismatch(self):
        with pytest.raises(AnalysisError):
            analyze(worked_example_table(), ("a", "b"), beta=0.1)
