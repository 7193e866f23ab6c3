"""Trial-log and result persistence, plus offline replay of stored logs.

The trial log is append-only JSON lines, one record per line, with exactly
the TrialRecord field names.  Non-finite objective values are stored as
null.  A stored log is sufficient to reproduce every analysis table.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .analysis import AnalysisOutcome, analyze
from .errors import ConfigError
from .evaluator import TrialRecord
from .optimizer import IterationReport, StudyResult
from .space import SearchSpace
from .transform import collapse


def record_to_dict(record: TrialRecord) -> dict:
    return {
        "trial_id": record.trial_id,
        "iteration": record.iteration,
        "raw_params": record.raw_params,
        "unit_params": list(record.unit_params),
        "value": record.value if math.isfinite(record.value) else None,
        "status": record.status,
        "duration_ms": record.duration_ms,
        "worker": record.worker,
    }


def record_from_dict(d: dict) -> TrialRecord:
    return TrialRecord(
        trial_id=int(d["trial_id"]),
        iteration=int(d["iteration"]),
        raw_params=dict(d["raw_params"]),
        unit_params=tuple(d["unit_params"]),
        value=float(d["value"]) if d["value"] is not None else math.nan,
        status=d["status"],
        duration_ms=int(d["duration_ms"]),
        worker=int(d["worker"]),
    )


def write_trials(path: str | Path, records: Iterable[TrialRecord]) -> None:
    with open(path, "w") as fh:
        for record in records:
            fh.write(json.dumps(record_to_dict(record)) + "\n")


def read_trials(path: str | Path) -> list[TrialRecord]:
    records = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(record_from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError) as err:
                raise ConfigError(f"{path}:{lineno}: bad trial record: {err}") from err
    return records


def _space_to_dict(space: SearchSpace) -> list[dict]:
    return [
        {
            "name": f.name,
            "kind": f.kind,
            "lower": f.lower,
            "upper": f.upper,
            "scale": f.scale,
            "frozen": f.frozen,
        }
        for f in space.factors
    ]


def report_to_dict(report: IterationReport) -> dict:
    return {
        "iteration": report.iteration,
        "n_levels": report.n_levels,
        "runs": report.runs,
        "range_count": report.range_count,
        "beta": report.beta,
        "outcome": report.outcome.to_dict(),
        "space_before": _space_to_dict(report.space_before),
        "space_after": _space_to_dict(report.space_after),
    }


def result_to_dict(name: str, result: StudyResult, sub_seeds: dict | None = None) -> dict:
    ok = [r for r in result.history if r.ok]
    return {
        "name": name,
        "seed": result.seed,
        "sub_seeds": sub_seeds or {},
        "direction": result.direction,
        "stop_reason": result.stop_reason,
        "best_config": result.best_config,
        "best_value": result.best_objective_value,
        "best_value_internal": result.best_value,
        "n_trials": len(result.history),
        "n_ok": len(ok),
        "iterations": len(result.per_iteration),
        "final_space": _space_to_dict(result.final_space),
    }


def replay_iteration(
    records: Sequence[TrialRecord], iteration: int | None = None
) -> tuple[tuple[str, ...], np.ndarray, np.ndarray]:
    """Reconstruct (active factor names, unit matrix, perf) from a trial log.

    Active factors are those whose raw value varies across the iteration;
    their order follows the first record's parameter order and must match
    the stored unit vectors.
    """
    if not records:
        raise ConfigError("trial log is empty")
    if iteration is None:
        iteration = max(r.iteration for r in records)
    batch = [r for r in records if r.iteration == iteration]
    if not batch:
        raise ConfigError(f"no records for iteration {iteration}")

    first = batch[0]
    names = []
    for key in first.raw_params:
        values = {r.raw_params[key] for r in batch}
        if len(values) > 1:
            names.append(key)
    if len(names) != len(first.unit_params):
        raise ConfigError(
            f"cannot infer active factors: {len(names)} varying parameters "
            f"vs {len(first.unit_params)} unit components"
        )
    units = np.array([r.unit_params for r in batch], dtype=float)
    perf = np.array([r.value for r in batch], dtype=float)
    return tuple(names), units, perf


def replay_analysis(
    records: Sequence[TrialRecord],
    range_count: int,
    beta: float,
    iteration: int | None = None,
) -> AnalysisOutcome:
    """Re-run collapse + factorial analysis on a stored iteration."""
    names, units, perf = replay_iteration(records, iteration)
    if not np.isfinite(perf).any():
        raise ConfigError("iteration contains no successful trial")
    table = collapse(units, perf, range_count)
    return analyze(table, names, beta)
