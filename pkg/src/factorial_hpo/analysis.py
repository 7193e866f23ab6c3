"""Marginal performance and importance analysis of a collapsed table.

For each factor the mean performance per range is computed; the range with
the best mean wins.  A factor's importance is the population variance of its
marginal means, normalized over all active factors.  Factors whose
importance falls below the threshold are frozen at the unit-space median of
their best range.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import AnalysisError, ConfigError
from .space import SearchSpace
from .transform import CollapsedTable


@dataclass(frozen=True)
class AnalysisOutcome:
    """Per-factor marginal means, best ranges, importances and freezes."""

    factor_names: tuple[str, ...]
    marginal_means: np.ndarray = field(repr=False)  # d x R
    best_range: tuple[int, ...] = ()  # 1-based
    importance: tuple[float, ...] = ()
    frozen: tuple[tuple[str, float], ...] = ()  # (name, unit value in current bounds)
    beta: float = 0.0

    def to_dict(self) -> dict:
        return {
            "factor_names": list(self.factor_names),
            "marginal_means": [[float(v) for v in row] for row in self.marginal_means],
            "best_range": list(self.best_range),
            "importance": list(self.importance),
            "frozen": [[name, value] for name, value in self.frozen],
            "beta": self.beta,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnalysisOutcome":
        return cls(
            factor_names=tuple(d["factor_names"]),
            marginal_means=np.asarray(d["marginal_means"], dtype=float),
            best_range=tuple(int(v) for v in d["best_range"]),
            importance=tuple(float(v) for v in d["importance"]),
            frozen=tuple((name, float(v)) for name, v in d["frozen"]),
            beta=float(d["beta"]),
        )


def performance_analysis(table: CollapsedTable) -> tuple[np.ndarray, tuple[int, ...]]:
    """Marginal mean performance per (factor, range) and the best range per factor.

    Ties break to the lowest range index.  Every cell must contain at least
    one ok trial.
    """
    ok = np.isfinite(table.perf)
    means = np.empty((table.factors, table.range_count), dtype=float)
    for f in range(table.factors):
        for r in range(1, table.range_count + 1):
            mask = ok & (table.levels[:, f] == r)
            if not mask.any():
                raise AnalysisError(f"no ok trial in cell (factor {f}, range {r})")
            means[f, r - 1] = table.perf[mask].mean()
    best = tuple(int(np.argmax(row)) + 1 for row in means)
    return means, best


def importance_analysis(table: CollapsedTable, marginal_means: np.ndarray) -> tuple[float, ...]:
    """Normalized variance of each factor's marginal means.

    All-zero variances yield an all-zero vector, which downstream freezes
    every factor.
    """
    variances = marginal_means.var(axis=1)  # population variance over the R means
    total = variances.sum()
    if total == 0.0:
        return tuple(0.0 for _ in variances)
    return tuple(float(v / total) for v in variances)


def analyze(
    table: CollapsedTable,
    space: SearchSpace | Sequence[str],
    beta: float,
) -> AnalysisOutcome:
    """Full factorial analysis: performance, importance, freeze decisions.

    ``space`` supplies the active factor names (a plain name sequence is
    accepted for offline replay).  Frozen values are unit-space medians of
    the best range, relative to the factor's current bounds.
    """
    if beta <= 0:
        raise ConfigError("importance threshold must be > 0")
    if isinstance(space, SearchSpace):
        names = tuple(f.name for f in space.active_factors)
    else:
        names = tuple(space)
    if len(names) != table.factors:
        raise AnalysisError(
            f"{len(names)} factor names for a {table.factors}-column table"
        )

    means, best = performance_analysis(table)
    importance = importance_analysis(table, means)
    frozen = tuple(
        (names[f], (best[f] - 0.5) / table.range_count)
        for f in range(table.factors)
        if importance[f] < beta
    )
    return AnalysisOutcome(
        factor_names=names,
        marginal_means=means,
        best_range=best,
        importance=importance,
        frozen=frozen,
        beta=beta,
    )
