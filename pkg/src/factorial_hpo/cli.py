"""Command-line interface: run studies, sample designs, analyze logs."""
from __future__ import annotations

import csv
import json
import math
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import metrics as metrics_mod
from .analysis import AnalysisOutcome
from .errors import BatchAbortError, FactorialHpoError
from .optimizer import SEED_ROLES, run_study
from .persistence import (
    read_trials,
    replay_analysis,
    report_to_dict,
    result_to_dict,
    write_trials,
)
from .sampler import CRITERIA, sample_lhs
from .studyfile import parse_study_file

ENV_WORKERS = "FACTORIAL_HPO_WORKERS"


def _default_workers() -> int | None:
    raw = os.environ.get(ENV_WORKERS)
    return int(raw) if raw else None


@click.group()
def cli() -> None:
    """Model-free hyperparameter optimization via orthogonal factorial designs."""


@cli.command()
@click.argument("study_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--workers", type=int, default=None, help="Parallel evaluation workers.")
@click.option("--seed", type=int, default=None)
@click.option("--max-iterations", type=int, default=None)
@click.option("--budget", type=int, default=None, help="Total trial budget.")
@click.option("--final-strategy", type=click.Choice(["greedy", "mean", "combined"]), default=None)
@click.option("--range-count", type=int, default=None)
@click.option("--beta", type=float, default=None)
@click.option("--out-dir", type=click.Path(file_okay=False), default=".")
def run(study_file, workers, seed, max_iterations, budget, final_strategy,
        range_count, beta, out_dir):
    """Execute a study described by STUDY_FILE."""
    overrides = {
        "workers": workers if workers is not None else _default_workers(),
        "seed": seed,
        "max_iterations": max_iterations,
        "budget": budget,
        "final_strategy": final_strategy,
        "range_count": range_count,
        "beta": beta,
    }
    try:
        name, config = parse_study_file(study_file, overrides)
    except FactorialHpoError as err:
        raise click.ClickException(str(err))

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    trials_path = out / f"{name}.trials.jsonl"
    try:
        result = run_study(config)
    except BatchAbortError as err:
        write_trials(trials_path, err.records)
        click.echo(f"aborted: {err}", err=True)
        click.echo(f"partial trial log: {trials_path}", err=True)
        sys.exit(2)
    except FactorialHpoError as err:
        raise click.ClickException(str(err))

    write_trials(trials_path, result.history)
    sub_seeds = {role: tag for role, tag in SEED_ROLES.items()}
    (out / f"{name}.result.json").write_text(
        json.dumps(result_to_dict(name, result, sub_seeds), indent=2) + "\n"
    )
    (out / f"{name}.analysis.json").write_text(
        json.dumps([report_to_dict(r) for r in result.per_iteration], indent=2) + "\n"
    )

    best_so_far = -math.inf
    for report in result.per_iteration:
        values = [r.value for r in result.history
                  if r.iteration == report.iteration and r.ok]
        if values:
            best_so_far = max(best_so_far, max(values))
        frozen = [name_ for name_, _ in report.outcome.frozen]
        bounds = ", ".join(
            f"{f.name}=[{f.lower:.6g}, {f.upper:.6g}]"
            for f in report.space_after.factors if f.active
        )
        click.echo(
            f"iteration {report.iteration}: N={report.runs} R={report.range_count} "
            f"best-so-far={best_so_far:.6g} frozen={frozen or '[]'} roi: {bounds or '(none)'}"
        )
    click.echo(f"stop_reason: {result.stop_reason}")
    click.echo(f"best_value: {result.best_objective_value:.6g}")
    click.echo(f"best_config: {json.dumps(result.best_config)}")


def _write_design(design, out, fmt):
    header = [f"f{j + 1}" for j in range(design.factors)]
    if fmt == "json":
        doc = {
            "runs": design.runs,
            "factors": design.factors,
            "provenance": design.provenance,
            "seed": design.seed,
            "cells": design.cells.tolist(),
        }
        text = json.dumps(doc, indent=2) + "\n"
        if out:
            Path(out).write_text(text)
        else:
            click.echo(text, nl=False)
        return
    rows = [",".join(header)] + [
        ",".join(f"{v:.17g}" for v in row) for row in design.cells
    ]
    text = "\n".join(rows) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


@cli.command()
@click.option("--criterion", type=click.Choice(CRITERIA), default="orthogonality")
@click.option("--runs", type=int, default=None, help="Number of design rows.")
@click.option("--levels", type=int, default=None,
              help="Prime level count (orthogonality; rows = levels^2).")
@click.option("--factors", type=int, required=True)
@click.option("--seed", type=int, default=0)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
def sample(criterion, runs, levels, factors, seed, out, fmt):
    """Emit a design matrix as CSV or JSON."""
    if runs is None and levels is None:
        raise click.ClickException("provide --runs or --levels")
    if runs is None:
        runs = levels * levels
    try:
        design = sample_lhs(runs, factors, criterion, seed=seed)
    except FactorialHpoError as err:
        raise click.ClickException(str(err))
    _write_design(design, out, fmt)


def _format_outcome(outcome: AnalysisOutcome, range_count: int) -> str:
    lines = []
    width = max((len(n) for n in outcome.factor_names), default=6)
    header = " ".join(f"range{r + 1:<2}" for r in range(range_count))
    lines.append("marginal mean performance:")
    lines.append(f"  {'factor':<{width}} {header} best")
    for i, name in enumerate(outcome.factor_names):
        means = " ".join(f"{m:7.4f}" for m in outcome.marginal_means[i])
        lines.append(f"  {name:<{width}} {means} {outcome.best_range[i]}")
    lines.append("factor importance:")
    for i, name in enumerate(outcome.factor_names):
        mark = " (frozen)" if any(n == name for n, _ in outcome.frozen) else ""
        lines.append(f"  {name:<{width}} {outcome.importance[i]:.4f}{mark}")
    for name, unit in outcome.frozen:
        lines.append(f"freeze {name} at unit value {unit:.4f}")
    return "\n".join(lines)


@cli.command()
@click.argument("trial_log", type=click.Path(exists=True, dir_okay=False))
@click.option("--range-count", "-r", type=int, required=True)
@click.option("--beta", type=float, required=True)
@click.option("--iteration", type=int, default=None, help="Defaults to the last one.")
@click.option("--json-out", type=click.Path(dir_okay=False), default=None)
def analyze(trial_log, range_count, beta, iteration, json_out):
    """Replay collapse + factorial analysis on a stored trial log."""
    if not 0 < beta < 1:
        raise click.ClickException("beta must lie strictly between 0 and 1")
    try:
        records = read_trials(trial_log)
        outcome = replay_analysis(records, range_count, beta, iteration)
    except FactorialHpoError as err:
        raise click.ClickException(str(err))
    click.echo(_format_outcome(outcome, range_count))
    doc = json.dumps(outcome.to_dict(), indent=2) + "\n"
    if json_out:
        Path(json_out).write_text(doc)
    else:
        click.echo(doc, nl=False)


def _read_csv_points(path) -> np.ndarray:
    with open(path) as fh:
        rows = list(csv.reader(fh))
    if rows and any(not _is_float(c) for c in rows[0]):
        rows = rows[1:]  # header
    return np.array([[float(c) for c in row] for row in rows if row])


def _is_float(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


@cli.group()
def metrics() -> None:
    """Uniformity and orthogonality diagnostics."""


@metrics.command()
@click.argument("csv_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", type=int, default=0)
def discrepancy(csv_file, seed):
    """Star discrepancy of a unit-cube point set stored as CSV."""
    points = _read_csv_points(csv_file)
    try:
        report = metrics_mod.star_discrepancy(points, seed=seed)
    except FactorialHpoError as err:
        raise click.ClickException(str(err))
    click.echo(json.dumps(report.__dict__, indent=2))


@metrics.command()
@click.argument("csv_file", type=click.Path(exists=True, dir_okay=False))
def correlation(csv_file):
    """Maximum absolute pairwise column correlation of a CSV design."""
    points = _read_csv_points(csv_file)
    try:
        value = metrics_mod.max_column_correlation(points)
    except FactorialHpoError as err:
        raise click.ClickException(str(err))
    click.echo(f"{value:.6g}")


@metrics.command()
@click.option("--objective", default="branin")
@click.option("--runs", type=int, default=81)
@click.option("--factors", type=int, default=3)
@click.option("--reps", type=int, default=5)
@click.option("--seed", type=int, default=0)
@click.option("--criteria", multiple=True, type=click.Choice(CRITERIA))
@click.option("--projections-out", type=click.Path(dir_okay=False), default=None,
              help="CSV of per-dimension projections of each criterion's design.")
def compare(objective, runs, factors, reps, seed, criteria, projections_out):
    """Pick-the-best comparison across sampling criteria."""
    chosen = list(criteria) if criteria else list(CRITERIA)
    try:
        rows = metrics_mod.compare_samplers(
            objective, chosen, runs=runs, n_factors=factors,
            repetitions=reps, seed=seed,
        )
    except FactorialHpoError as err:
        raise click.ClickException(str(err))
    click.echo(f"{'criterion':<18} {'mean_best':>12} {'discrepancy':>12} {'max_corr':>10}")
    for row in rows:
        if row.error:
            click.echo(f"{row.criterion:<18} error: {row.error}")
        else:
            click.echo(
                f"{row.criterion:<18} {row.mean_best:>12.6g} "
                f"{row.mean_discrepancy:>12.6g} {row.mean_max_correlation:>10.4g}"
            )
    click.echo(json.dumps([row.__dict__ for row in rows], indent=2))
    if projections_out:
        with open(projections_out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["criterion", "dimension", "value"])
            for crit in chosen:
                try:
                    design = sample_lhs(runs, factors, crit, seed=seed)
                except FactorialHpoError:
                    continue
                for j in range(design.factors):
                    for v in np.sort(design.cells[:, j]):
                        writer.writerow([crit, j, f"{v:.17g}"])


@cli.command()
@click.option("--seeds", type=int, default=10, help="Repetitions per comparison.")
@click.option("--workers", type=int, default=None)
def bench(seeds, workers):
    """Desk-scale benchmark: sampler comparison plus optimizer vs random search."""
    from .objectives import get_benchmark
    from .evaluator import builtin_objective
    from .optimizer import StudyConfig
    from .space import FactorDef, SearchSpace

    workers = workers or _default_workers() or 1
    click.echo("== sampler comparison (pick-the-best, branin) ==")
    rows = metrics_mod.compare_samplers("branin", CRITERIA, runs=81, n_factors=3,
                                        repetitions=seeds, seed=0)
    for row in rows:
        if row.error:
            click.echo(f"{row.criterion:<18} error: {row.error}")
        else:
            click.echo(f"{row.criterion:<18} mean_best={row.mean_best:.6g}")

    click.echo("== optimizer vs random search (equal budgets) ==")
    for bench_name, dims in (("branin", 2), ("sphere", 3), ("rosenbrock", 2)):
        spec = builtin_objective(bench_name)
        bounds = get_benchmark(bench_name).bounds
        factors = tuple(
            FactorDef(f"x{i + 1}", "continuous", lo, hi)
            for i, (lo, hi) in enumerate(bounds[:dims])
        )
        opt_best, rnd_best = [], []
        for s in range(seeds):
            config = StudyConfig(
                space=SearchSpace(factors), objective=spec, max_iterations=3,
                samples_per_iteration_min=9, total_budget=27, workers=workers,
                seed=s, final_strategy="greedy",
            )
            result = run_study(config)
            opt_best.append(result.best_objective_value)
            rng = np.random.default_rng(10_000 + s)
            lo = np.array([b[0] for b in bounds[:dims]])
            hi = np.array([b[1] for b in bounds[:dims]])
            pts = lo + rng.uniform(size=(27, dims)) * (hi - lo)
            func = get_benchmark(bench_name).func
            rnd_best.append(min(func(p) for p in pts))
        click.echo(
            f"{bench_name:<12} optimizer median={float(np.median(opt_best)):.6g} "
            f"random median={float(np.median(rnd_best)):.6g}"
        )


def main() -> None:
    cli(prog_name="factorial-hpo")


if __name__ == "__main__":
    main()
