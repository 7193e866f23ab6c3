"""Parallel evaluation of configuration batches.

Configurations are independent, so a batch is fanned out over a thread pool
and the results are returned in submission order.  Objectives that minimize
are negated at this boundary: everything downstream maximizes.

External objectives follow a subprocess protocol: the command receives one
JSON object (factor name -> raw value) on stdin and must print the objective
value as the last whitespace-trimmed line of stdout, exiting 0.
"""
from __future__ import annotations

import json
import math
import subprocess
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .errors import BatchAbortError, SchemaError
from .objectives import get_benchmark


@dataclass(frozen=True)
class TrialRecord:
    """One evaluated configuration.

    ``value`` is maximize-normalized: minimize-direction objectives are
    stored negated.  ``status`` is "ok" iff ``value`` is finite.
    """

    trial_id: int
    iteration: int
    raw_params: dict[str, float]
    unit_params: tuple[float, ...]
    value: float
    status: str  # ok | failed | timeout
    duration_ms: int
    worker: int

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass(frozen=True)
class ObjectiveSpec:
    """What to evaluate and how to interpret the result."""

    kind: str  # builtin | external
    name: str = ""
    command: str = ""
    direction: str = "minimize"
    timeout_s: float = 3600.0
    noise_seed: int | None = None
    func: Callable[[Sequence[float]], float] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.kind not in ("builtin", "external"):
            raise SchemaError(f"unknown objective kind {self.kind!r}")
        if self.direction not in ("minimize", "maximize"):
            raise SchemaError(f"unknown direction {self.direction!r}")
        if self.timeout_s <= 0:
            raise SchemaError("timeout_s must be positive")

    @property
    def sign(self) -> float:
        """Multiplier turning a raw objective value into the internal maximize scale."""
        return -1.0 if self.direction == "minimize" else 1.0


def builtin_objective(name: str, timeout_s: float = 3600.0) -> ObjectiveSpec:
    """Objective spec for a registered analytic benchmark."""
    bench = get_benchmark(name)
    return ObjectiveSpec(
        kind="builtin",
        name=name,
        direction=bench.direction,
        timeout_s=timeout_s,
        func=bench.func,
    )


def external_objective(
    command: str, timeout_s: float = 3600.0, direction: str = "minimize"
) -> ObjectiveSpec:
    """Objective spec wrapping an external command (JSON in, float out)."""
    if not command:
        raise SchemaError("external objective needs a non-empty command")
    return ObjectiveSpec(
        kind="external", command=command, direction=direction, timeout_s=timeout_s
    )


def _run_external(command: str, raw: Mapping[str, float], timeout_s: float) -> tuple[float, str]:
    payload = json.dumps(dict(raw))
    try:
        proc = subprocess.run(
            command,
            shell=True,
            input=payload,
            capture_output=True,
            text=True,
            timeout=timeout_s,
        )
    except subprocess.TimeoutExpired:
        return math.nan, "timeout"
    except OSError:
        return math.nan, "failed"
    if proc.returncode != 0:
        return math.nan, "failed"
    lines = [ln.strip() for ln in proc.stdout.strip().splitlines() if ln.strip()]
    if not lines:
        return math.nan, "failed"
    try:
        return float(lines[-1]), "ok"
    except ValueError:
        return math.nan, "failed"


def _evaluate_one(
    spec: ObjectiveSpec, raw: Mapping[str, float], deadline_s: float
) -> tuple[float, str]:
    if spec.kind == "external":
        return _run_external(spec.command, raw, deadline_s)
    func = spec.func if spec.func is not None else get_benchmark(spec.name).func
    start = time.monotonic()
    try:
        value = float(func(list(raw.values())))
    except Exception:
        return math.nan, "failed"
    if time.monotonic() - start > deadline_s:
        return math.nan, "timeout"
    if not math.isfinite(value):
        return math.nan, "failed"
    return value, "ok"


def evaluate_batch(
    configs: Sequence[Mapping[str, float]],
    objective: ObjectiveSpec,
    workers: int = 1,
    iteration: int = 0,
    first_trial_id: int = 0,
    unit_params: Sequence[Sequence[float]] | None = None,
    abort_fraction: float = 0.5,
) -> list[TrialRecord]:
    """Evaluate every configuration, fanning out over ``workers`` threads.

    Results come back in input order.  Individual failures are recorded, not
    raised; only when more than ``abort_fraction`` of the batch fails does
    the call raise BatchAbortError (with all records attached).
    """
    if not configs:
        raise SchemaError("empty batch")
    if workers < 1:
        raise SchemaError("workers must be >= 1")
    if unit_params is None:
        unit_params = [()] * len(configs)

    worker_ids: dict[int, int] = {}
    lock = threading.Lock()

    def worker_id() -> int:
        ident = threading.get_ident()
        with lock:
            return worker_ids.setdefault(ident, len(worker_ids))

    def task(idx: int) -> TrialRecord:
        raw = dict(configs[idx])
        start = time.monotonic()
        value, status = _evaluate_one(objective, raw, objective.timeout_s)
        duration_ms = int((time.monotonic() - start) * 1000)
        return TrialRecord(
            trial_id=first_trial_id + idx,
            iteration=iteration,
            raw_params=raw,
            unit_params=tuple(unit_params[idx]),
            value=objective.sign * value if status == "ok" else math.nan,
            status=status,
            duration_ms=duration_ms,
            worker=worker_id(),
        )

    with ThreadPoolExecutor(max_workers=workers) as pool:
        records = list(pool.map(task, range(len(configs))))

    n_bad = sum(1 for r in records if not r.ok)
    if n_bad / len(records) > abort_fraction:
        raise BatchAbortError(
            f"{n_bad}/{len(records)} trials failed; aborting iteration",
            records=records,
        )
    return records
