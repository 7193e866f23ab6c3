"""Search-space definitions and unit-hypercube (de)normalization.

Every hyperparameter ("factor") is mapped onto [0, 1] so that designs can be
constructed in a common coordinate system; log-scaled factors are mapped in
log space.  Spaces are immutable: narrowing and freezing return new objects.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from .errors import BoundsError, SchemaError, StateError

KINDS = ("continuous", "integer")
SCALES = ("linear", "log")


@dataclass(frozen=True)
class FactorDef:
    """One hyperparameter dimension with its current bounds.

    ``frozen`` holds the raw value the factor has been fixed at, or None
    while the factor is still being searched.
    """

    name: str
    kind: str
    lower: float
    upper: float
    scale: str = "linear"
    frozen: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise SchemaError(f"factor {self.name!r}: unknown kind {self.kind!r}")
        if self.scale not in SCALES:
            raise SchemaError(f"factor {self.name!r}: unknown scale {self.scale!r}")
        if self.frozen is None and not self.lower < self.upper:
            raise SchemaError(
                f"factor {self.name!r}: lower ({self.lower}) must be < upper ({self.upper})"
            )
        if self.scale == "log" and self.lower <= 0:
            raise SchemaError(f"factor {self.name!r}: log scale requires lower > 0")
        if self.kind == "integer" and self.frozen is None and self.upper - self.lower < 1:
            raise SchemaError(
                f"factor {self.name!r}: integer factor needs upper - lower >= 1"
            )

    @property
    def active(self) -> bool:
        return self.frozen is None

    def _to_transformed(self, x: float) -> float:
        return math.log(x) if self.scale == "log" else x

    def _from_transformed(self, t: float) -> float:
        return math.exp(t) if self.scale == "log" else t

    def to_unit(self, x: float) -> float:
        """Map a raw value within [lower, upper] to [0, 1]."""
        if not (self.lower <= x <= self.upper):
            raise BoundsError(
                f"factor {self.name!r}: value {x} outside [{self.lower}, {self.upper}]"
            )
        lo = self._to_transformed(self.lower)
        hi = self._to_transformed(self.upper)
        return (self._to_transformed(x) - lo) / (hi - lo)

    def from_unit(self, u: float) -> float:
        """Map u in [0, 1] back to the raw domain (integers round half-up)."""
        if not (0.0 <= u <= 1.0):
            raise BoundsError(f"factor {self.name!r}: unit value {u} outside [0, 1]")
        lo = self._to_transformed(self.lower)
        hi = self._to_transformed(self.upper)
        x = self._from_transformed(lo + u * (hi - lo))
        if self.kind == "integer":
            return float(_round_half_up_clamped(x, self.lower, self.upper))
        return x


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def _round_half_up_clamped(x: float, lower: float, upper: float) -> int:
    """Round half-up, then clamp into the integers admissible in [lower, upper]."""
    r = _round_half_up(x)
    lo_int, hi_int = math.ceil(lower), math.floor(upper)
    if lo_int <= hi_int:
        r = min(max(r, lo_int), hi_int)
    return r


@dataclass(frozen=True)
class SearchSpace:
    """An ordered collection of factors plus the iteration counter."""

    factors: tuple[FactorDef, ...]
    iteration: int = 0

    def __post_init__(self) -> None:
        names = [f.name for f in self.factors]
        if len(set(names)) != len(names):
            raise SchemaError("factor names must be unique")

    @property
    def active_factors(self) -> tuple[FactorDef, ...]:
        return tuple(f for f in self.factors if f.active)

    @property
    def d_active(self) -> int:
        return len(self.active_factors)

    def factor(self, name: str) -> FactorDef:
        for f in self.factors:
            if f.name == name:
                return f
        raise SchemaError(f"unknown factor {name!r}")

    def _replace_factor(self, name: str, new: FactorDef, bump: bool = False) -> "SearchSpace":
        factors = tuple(new if f.name == name else f for f in self.factors)
        return SearchSpace(factors, self.iteration + (1 if bump else 0))


def normalize(space: SearchSpace, raw: Mapping[str, float]) -> tuple[float, ...]:
    """Normalize a raw configuration to unit coordinates over active factors."""
    out = []
    for f in space.active_factors:
        if f.name not in raw:
            raise SchemaError(f"missing factor {f.name!r} in configuration")
        out.append(f.to_unit(raw[f.name]))
    return tuple(out)


def denormalize(space: SearchSpace, unit: Sequence[float]) -> dict[str, float]:
    """Map unit coordinates back to a full raw configuration.

    Frozen factors contribute their frozen value; the unit vector covers
    active factors only, in space order.
    """
    active = space.active_factors
    if len(unit) != len(active):
        raise SchemaError(
            f"expected {len(active)} unit components, got {len(unit)}"
        )
    raw: dict[str, float] = {}
    it = iter(unit)
    for f in space.factors:
        raw[f.name] = f.frozen if f.frozen is not None else f.from_unit(next(it))
    return raw


def shrink_to_range(space: SearchSpace, name: str, r: int, range_count: int) -> SearchSpace:
    """Narrow a factor to the r-th of ``range_count`` equal-width sub-intervals.

    The split happens in the factor's transformed coordinate, so log-scaled
    factors shrink geometrically.  An integer factor whose new interval
    admits exactly one integer is frozen at that integer.
    """
    f = space.factor(name)
    if not f.active:
        raise StateError(f"factor {name!r} is frozen")
    if not 1 <= r <= range_count:
        raise BoundsError(f"range index {r} outside 1..{range_count}")
    lo = f._to_transformed(f.lower)
    hi = f._to_transformed(f.upper)
    new_lo = f._from_transformed(lo + (hi - lo) * (r - 1) / range_count)
    new_hi = f._from_transformed(lo + (hi - lo) * r / range_count)
    if f.kind == "integer":
        lo_int, hi_int = math.ceil(new_lo), math.floor(new_hi)
        if lo_int == hi_int:
            return space._replace_factor(
                name, replace(f, frozen=float(lo_int)), bump=True
            )
        if lo_int > hi_int:
            # no admissible integer left: pin at the rounded midpoint
            mid = _round_half_up_clamped((new_lo + new_hi) / 2, f.lower, f.upper)
            return space._replace_factor(name, replace(f, frozen=float(mid)), bump=True)
    return space._replace_factor(
        name, replace(f, lower=new_lo, upper=new_hi), bump=True
    )


def freeze(space: SearchSpace, name: str, value: float) -> SearchSpace:
    """Fix a factor at ``value`` and exclude it from subsequent designs."""
    f = space.factor(name)
    if not f.active:
        raise StateError(f"factor {name!r} is already frozen")
    if not (f.lower <= value <= f.upper):
        raise BoundsError(
            f"freeze value {value} outside [{f.lower}, {f.upper}] for {name!r}"
        )
    if f.kind == "integer":
        value = float(_round_half_up_clamped(value, f.lower, f.upper))
    return space._replace_factor(name, replace(f, frozen=value))
