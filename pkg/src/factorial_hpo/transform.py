"""Range-collapsing of a continuous design into a discrete factorial table.

Each unit-interval column is split into R equal-width ranges; for the
midpoint-valued orthogonal Latin hypercube this coincides with equal-count
grouping, and collapsing with R equal to the level count reproduces a
strength-2 orthogonal array.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .sampler import DesignMatrix


@dataclass(frozen=True)
class CollapsedTable:
    """N x d table of range indices (1..R) with the performance column.

    ``perf`` is maximize-normalized; failed trials carry NaN and are
    excluded from all marginal statistics.
    """

    levels: np.ndarray = field(repr=False)  # int, values in 1..R
    perf: np.ndarray = field(repr=False)
    range_count: int = 1
    counts: np.ndarray = field(repr=False, default=None)

    @property
    def runs(self) -> int:
        return self.levels.shape[0]

    @property
    def factors(self) -> int:
        return self.levels.shape[1]


def collapse(design: DesignMatrix | np.ndarray, perf, range_count: int) -> CollapsedTable:
    """Group each design column into ``range_count`` ordered ranges.

    Accepts either a DesignMatrix or a bare N x d unit-interval array.
    ``range_count`` may not exceed floor(sqrt(N)), otherwise range groups
    are too thin for marginal analysis.
    """
    cells = design.cells if isinstance(design, DesignMatrix) else np.asarray(design, float)
    perf = np.asarray(perf, dtype=float)
    n_runs, n_factors = cells.shape
    if perf.shape != (n_runs,):
        raise ConfigError(
            f"performance vector length {perf.shape} does not match {n_runs} runs"
        )
    if range_count < 1:
        raise ConfigError("range count must be >= 1")
    cap = math.isqrt(n_runs)
    if range_count > cap:
        raise ConfigError(
            f"range count {range_count} exceeds floor(sqrt(N)) = {cap} for N = {n_runs}"
        )

    levels = np.floor(cells * range_count).astype(int) + 1
    np.clip(levels, 1, range_count, out=levels)  # u = 1.0 belongs to the top range

    counts = np.zeros((n_factors, range_count), dtype=int)
    for f in range(n_factors):
        counts[f] = np.bincount(levels[:, f] - 1, minlength=range_count)
    return CollapsedTable(levels=levels, perf=perf, range_count=range_count, counts=counts)
