"""The iterative study loop: sample, evaluate, collapse, analyze, reshape.

Each iteration draws an orthogonal Latin hypercube over the active factors,
evaluates it in parallel, collapses it into a factorial table, picks the
best range per factor and freezes unimportant factors, then narrows the
search space accordingly.  The loop stops on a quality target, an exhausted
trial budget, all factors frozen, or the iteration cap.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .analysis import AnalysisOutcome, analyze
from .errors import BatchAbortError, ConfigError, SelectionError
from .evaluator import ObjectiveSpec, TrialRecord, evaluate_batch
from .sampler import choose_olh_size, construct_olh
from .space import SearchSpace, denormalize, freeze, shrink_to_range
from .transform import collapse

log = logging.getLogger(__name__)

STRATEGIES = ("greedy", "mean", "combined")

# role tags for deriving named sub-seeds from the study seed
SEED_ROLES = {"sampler": 101, "estimator": 202, "noise": 303}


def sub_seed(seed: int, role: str, index: int = 0) -> int:
    """Stable per-role, per-iteration seed derived from the study seed."""
    ss = np.random.SeedSequence([seed, SEED_ROLES[role], index])
    return int(ss.generate_state(1)[0])


@dataclass(frozen=True)
class StudyConfig:
    space: SearchSpace
    objective: ObjectiveSpec
    max_iterations: int = 3
    samples_per_iteration_min: int = 9
    range_count: int | None = None
    beta: float | None = None
    quality_target: float | None = None
    total_budget: int | None = None
    workers: int = 1
    seed: int = 0
    final_strategy: str = "greedy"
    q_small: int = 1  # divisor in the default range-count rule
    p_small: int = 3  # divisor in the default importance-threshold bound

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise ConfigError("max_iterations must be >= 1")
        if self.final_strategy not in STRATEGIES:
            raise ConfigError(f"unknown final_strategy {self.final_strategy!r}")
        if self.total_budget is not None and self.total_budget < 1:
            raise ConfigError("total_budget must be positive")
        if self.beta is not None and not 0 < self.beta < 1:
            raise ConfigError("beta must lie in (0, 1)")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")


@dataclass(frozen=True)
class IterationReport:
    """Bookkeeping for one iteration, for logs and offline replay."""

    iteration: int
    n_levels: int
    runs: int
    range_count: int
    beta: float
    outcome: AnalysisOutcome
    space_before: SearchSpace = field(repr=False, default=None)
    space_after: SearchSpace = field(repr=False, default=None)


@dataclass(frozen=True)
class StudyResult:
    best_config: dict[str, float]
    best_value: float  # maximize-normalized
    history: tuple[TrialRecord, ...]
    per_iteration: tuple[IterationReport, ...]
    stop_reason: str  # quality_reached | budget_exhausted | all_frozen | max_iterations
    final_space: SearchSpace
    seed: int = 0
    direction: str = "minimize"

    @property
    def best_objective_value(self) -> float:
        """Best value in the objective's own direction."""
        return self.best_value if self.direction == "maximize" else -self.best_value


def default_hyper_hyperparams(
    runs: int, n_factors: int, q_small: int = 1, p_small: int = 3
) -> tuple[int, float]:
    """Default range count and importance threshold for a given design size.

    The range count balances per-range occupancy against resolution:
    R = floor(sqrt(N / Q)).  The threshold must stay strictly below
    1 / (P * F); 0.999 of the bound is used.
    """
    if runs < 4 or n_factors < 1:
        raise ConfigError("need runs >= 4 and at least one factor")
    range_count = math.isqrt(runs // q_small)
    beta = 0.999 / (p_small * n_factors)
    return range_count, beta


def _greedy_best(history) -> TrialRecord:
    ok = [r for r in history if r.ok]
    if not ok:
        raise SelectionError("no successful trial in history")
    return max(ok, key=lambda r: r.value)


def _mean_strategy_config(report: IterationReport) -> dict[str, float]:
    """Median of the best range per still-active factor, in raw units."""
    outcome = report.outcome
    units = [
        (outcome.best_range[i] - 0.5) / report.range_count
        for i in range(len(outcome.factor_names))
    ]
    return denormalize(report.space_before, units)


def select_final(
    history,
    per_iteration,
    strategy: str,
    objective: ObjectiveSpec,
    workers: int = 1,
):
    """Pick the final configuration; returns (config, value, extra_records).

    greedy: best observed trial.  mean: median level of the last best
    ranges, evaluated once.  combined: the better of the two (the mean
    configuration costs one extra evaluation, which is returned so the
    caller can charge it to the budget).
    """
    if strategy not in STRATEGIES:
        raise ConfigError(f"unknown final_strategy {strategy!r}")
    greedy = _greedy_best(history)
    if strategy == "greedy":
        return dict(greedy.raw_params), greedy.value, []
    if not per_iteration:
        raise SelectionError("no completed iteration for the mean strategy")
    mean_cfg = _mean_strategy_config(per_iteration[-1])
    extra = evaluate_batch(
        [mean_cfg],
        objective,
        workers=workers,
        iteration=per_iteration[-1].iteration,
        first_trial_id=history[-1].trial_id + 1 if history else 0,
        abort_fraction=1.0,
    )
    mean_rec = extra[0]
    if strategy == "mean":
        return mean_cfg, mean_rec.value, extra
    if mean_rec.ok and mean_rec.value > greedy.value:
        return mean_cfg, mean_rec.value, extra
    return dict(greedy.raw_params), greedy.value, extra


def run_study(config: StudyConfig) -> StudyResult:
    """Run the full iterative study and return its result.

    On a batch abort the partial history is attached to the raised
    BatchAbortError.
    """
    space = config.space
    if space.d_active < 1:
        raise ConfigError("need at least one active factor")

    history: list[TrialRecord] = []
    reports: list[IterationReport] = []
    stop_reason = "max_iterations"
    trials_done = 0

    for e in range(1, config.max_iterations + 1):
        d = space.d_active
        if d == 0:
            stop_reason = "all_frozen"
            break
        n = choose_olh_size(d, config.samples_per_iteration_min)
        runs = n * n
        if config.total_budget is not None and trials_done + runs > config.total_budget:
            stop_reason = "budget_exhausted"
            break

        default_r, default_beta = default_hyper_hyperparams(
            runs, d, config.q_small, config.p_small
        )
        range_count = config.range_count if config.range_count is not None else default_r
        cap = math.isqrt(runs)
        if range_count > cap:
            log.warning(
                "range count %d exceeds floor(sqrt(%d)); clamping to %d",
                range_count, runs, cap,
            )
            range_count = cap
        beta = config.beta if config.beta is not None else default_beta

        design = construct_olh(n, d, seed=sub_seed(config.seed, "sampler", e))
        configs = [denormalize(space, row) for row in design.cells]
        try:
            records = evaluate_batch(
                configs,
                config.objective,
                workers=config.workers,
                iteration=e,
                first_trial_id=trials_done,
                unit_params=design.cells,
            )
        except BatchAbortError as err:
            err.records = history + list(err.records)
            raise
        history.extend(records)
        trials_done += runs

        perf = np.array([r.value for r in records])
        table = collapse(design, perf, range_count)
        outcome = analyze(table, space, beta)

        new_space = space
        frozen_names = set()
        for name, unit_value in outcome.frozen:
            f = new_space.factor(name)
            new_space = freeze(new_space, name, f.from_unit(unit_value))
            frozen_names.add(name)
        for i, name in enumerate(outcome.factor_names):
            if name in frozen_names or not new_space.factor(name).active:
                continue
            new_space = shrink_to_range(
                new_space, name, outcome.best_range[i], range_count
            )
        reports.append(
            IterationReport(
                iteration=e,
                n_levels=n,
                runs=runs,
                range_count=range_count,
                beta=beta,
                outcome=outcome,
                space_before=space,
                space_after=new_space,
            )
        )
        space = new_space

        best_so_far = max((r.value for r in history if r.ok), default=-math.inf)
        if config.quality_target is not None and best_so_far >= config.quality_target:
            stop_reason = "quality_reached"
            break
        if space.d_active == 0:
            stop_reason = "all_frozen"
            break

    best_config, best_value, extra = select_final(
        history, reports, config.final_strategy, config.objective, config.workers
    )
    history.extend(extra)
    return StudyResult(
        best_config=best_config,
        best_value=best_value,
        history=tuple(history),
        per_iteration=tuple(reports),
        stop_reason=stop_reason,
        final_space=space,
        seed=config.seed,
        direction=config.objective.direction,
    )
