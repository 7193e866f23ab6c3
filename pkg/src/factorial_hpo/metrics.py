"""Uniformity and orthogonality diagnostics for point sets and designs.

Star discrepancy is computed exactly for up to three dimensions by grid
enumeration over the points' own coordinates; higher dimensions fall back to
a seeded lower-bound estimate over coordinate-snapped boxes.  A comparison
harness runs the pick-the-best protocol across sampling criteria.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BoundsError, ConstructionError, CorrelationError
from .objectives import get_benchmark
from .sampler import CRITERIA, DesignMatrix, sample_lhs

ESTIMATE_BOXES = 10_000


@dataclass(frozen=True)
class DiscrepancyReport:
    value: float
    method: str  # exact | estimate
    points: int
    dimension: int
    boxes_checked: int


def _cells(design) -> np.ndarray:
    if isinstance(design, DesignMatrix):
        return design.cells
    return np.asarray(design, dtype=float)


def _grids(points: np.ndarray) -> list[np.ndarray]:
    return [
        np.unique(np.concatenate([points[:, j], [1.0]]))
        for j in range(points.shape[1])
    ]


def _box_deviation(points: np.ndarray, corners: np.ndarray) -> np.ndarray:
    """max(|vol - open count/N|, |closed count/N - vol|) per corner row."""
    n = len(points)
    lt = np.all(points[None, :, :] < corners[:, None, :], axis=2).sum(axis=1)
    le = np.all(points[None, :, :] <= corners[:, None, :], axis=2).sum(axis=1)
    vol = np.prod(corners, axis=1)
    return np.maximum(vol - lt / n, le / n - vol)


def star_discrepancy(points, seed: int = 0) -> DiscrepancyReport:
    """Star discrepancy of a point set in the unit cube.

    Exact for d <= 3; for larger d the value is the maximum deviation over
    ``ESTIMATE_BOXES`` seeded random coordinate-snapped boxes, a lower bound
    on the true discrepancy.
    """
    points = _cells(points)
    if points.ndim == 1:
        points = points[:, None]
    if points.min() < 0.0 or points.max() > 1.0:
        raise BoundsError("all coordinates must lie in [0, 1]")
    n, d = points.shape
    grids = _grids(points)

    if d <= 3:
        shape = tuple(len(g) for g in grids)
        lt_mats = [points[:, j][:, None] < grids[j][None, :] for j in range(d)]
        le_mats = [points[:, j][:, None] <= grids[j][None, :] for j in range(d)]
        subs = "ni,nj,nk"[: 2 + 3 * (d - 1)]
        out = subs.replace("n", "").replace(",", "")
        lt = np.einsum(f"{subs}->{out}", *[m.astype(float) for m in lt_mats])
        le = np.einsum(f"{subs}->{out}", *[m.astype(float) for m in le_mats])
        vol = grids[0]
        for g in grids[1:]:
            vol = np.multiply.outer(vol, g)
        value = float(np.maximum(vol - lt / n, le / n - vol).max())
        return DiscrepancyReport(value, "exact", n, d, int(np.prod(shape)))

    rng = np.random.default_rng(seed)
    corners = np.column_stack(
        [rng.choice(grids[j], size=ESTIMATE_BOXES) for j in range(d)]
    )
    value = float(_box_deviation(points, corners).max())
    return DiscrepancyReport(value, "estimate", n, d, ESTIMATE_BOXES)


def max_column_correlation(design) -> float:
    """Largest absolute Pearson correlation over all column pairs."""
    cells = _cells(design)
    n, d = cells.shape
    if d < 2 or n < 3:
        raise CorrelationError("need at least 2 columns and 3 rows")
    if np.any(cells.std(axis=0) == 0):
        raise CorrelationError("correlation undefined for a constant column")
    corr = np.corrcoef(cells, rowvar=False)
    np.fill_diagonal(corr, 0.0)
    return float(np.abs(corr).max())


@dataclass(frozen=True)
class ProjectionReport:
    """Latin-property check: one point per axis-aligned bin per column."""

    runs: int
    factors: int
    violations: tuple[tuple[int, int, int], ...]  # (column, bin, count)

    @property
    def ok(self) -> bool:
        return not self.violations


def projection_uniformity_check(design) -> ProjectionReport:
    cells = _cells(design)
    n, d = cells.shape
    violations = []
    for j in range(d):
        bins = np.clip(np.floor(cells[:, j] * n).astype(int), 0, n - 1)
        counts = np.bincount(bins, minlength=n)
        for b in range(n):
            if counts[b] != 1:
                violations.append((j, b, int(counts[b])))
    return ProjectionReport(runs=n, factors=d, violations=tuple(violations))


@dataclass(frozen=True)
class ComparisonRow:
    criterion: str
    mean_best: float = math.nan
    mean_discrepancy: float = math.nan
    mean_max_correlation: float = math.nan
    error: str = ""


def compare_samplers(
    objective_name: str,
    criteria: Sequence[str] = CRITERIA,
    runs: int = 81,
    n_factors: int = 3,
    repetitions: int = 5,
    seed: int = 0,
) -> list[ComparisonRow]:
    """Pick-the-best comparison of sampling criteria on a benchmark.

    Each criterion samples ``runs`` configurations, every point is
    evaluated, and the single best value is kept; results are averaged over
    ``repetitions`` seeded repeats.  Extra dimensions beyond the benchmark's
    arity act as inert padding.
    """
    bench = get_benchmark(objective_name)
    arity = len(bench.bounds)
    lo = np.array([b[0] for b in bench.bounds])
    hi = np.array([b[1] for b in bench.bounds])
    better = min if bench.direction == "minimize" else max

    rows = []
    for criterion in criteria:
        bests, discs, corrs = [], [], []
        try:
            for rep in range(repetitions):
                design = sample_lhs(runs, n_factors, criterion, seed=seed + rep)
                raw = lo + design.cells[:, :arity] * (hi - lo)
                values = [bench.func(x) for x in raw]
                bests.append(better(values))
                discs.append(star_discrepancy(design, seed=seed + rep).value)
                if n_factors >= 2:
                    corrs.append(max_column_correlation(design))
        except ConstructionError as err:
            rows.append(ComparisonRow(criterion=criterion, error=str(err)))
            continue
        rows.append(
            ComparisonRow(
                criterion=criterion,
                mean_best=float(np.mean(bests)),
                mean_discrepancy=float(np.mean(discs)),
                mean_max_correlation=float(np.mean(corrs)) if corrs else math.nan,
            )
        )
    return rows
