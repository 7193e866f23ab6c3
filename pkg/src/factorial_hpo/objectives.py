"""Built-in analytic benchmark objectives.

Each entry records the callable, its conventional search bounds, the known
optimum, and whether the function is minimized or maximized.  These stand in
for expensive training runs when exercising the optimizer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import SchemaError


@dataclass(frozen=True)
class BenchmarkFunction:
    name: str
    func: Callable[[Sequence[float]], float]
    bounds: tuple[tuple[float, float], ...]
    direction: str  # "minimize" or "maximize"
    optimum_value: float | None = None
    optimum_point: tuple[float, ...] | None = None

    def __call__(self, x: Sequence[float]) -> float:
        return self.func(x)


def sphere(x: Sequence[float]) -> float:
    return float(sum(v * v for v in x))


def rosenbrock(x: Sequence[float]) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))


def branin(x: Sequence[float]) -> float:
    x1, x2 = x[0], x[1]
    a = 1.0
    b = 5.1 / (4.0 * math.pi**2)
    c = 5.0 / math.pi
    r = 6.0
    s = 10.0
    t = 1.0 / (8.0 * math.pi)
    return float(
        a * (x2 - b * x1**2 + c * x1 - r) ** 2 + s * (1 - t) * math.cos(x1) + s
    )


_HARTMANN6_A = np.array(
    [
        [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
        [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
        [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
        [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
    ]
)
_HARTMANN6_P = 1e-4 * np.array(
    [
        [1312, 1696, 5569, 124, 8283, 5886],
        [2329, 4135, 8307, 3736, 1004, 9991],
        [2348, 1451, 3522, 2883, 3047, 6650],
        [4047, 8828, 8732, 5743, 1091, 381],
    ]
)
_HARTMANN6_ALPHA = np.array([1.0, 1.2, 3.0, 3.2])


def hartmann6(x: Sequence[float]) -> float:
    x = np.asarray(x, dtype=float)
    inner = np.sum(_HARTMANN6_A * (x[None, :] - _HARTMANN6_P) ** 2, axis=1)
    return float(-np.sum(_HARTMANN6_ALPHA * np.exp(-inner)))


def additive_plus_bilinear(x: Sequence[float], gamma: float = 1.0) -> float:
    """Sum of coordinates plus a single two-way interaction term."""
    x = np.asarray(x, dtype=float)
    out = float(x.sum())
    if len(x) >= 2:
        out += gamma * float(x[0] * x[1])
    return out


_REGISTRY: Mapping[str, BenchmarkFunction] = {
    "sphere": BenchmarkFunction(
        "sphere",
        sphere,
        bounds=((-5.0, 5.0),) * 3,
        direction="minimize",
        optimum_value=0.0,
        optimum_point=(0.0, 0.0, 0.0),
    ),
    "rosenbrock": BenchmarkFunction(
        "rosenbrock",
        rosenbrock,
        bounds=((-2.0, 2.0),) * 2,
        direction="minimize",
        optimum_value=0.0,
        optimum_point=(1.0, 1.0),
    ),
    "branin": BenchmarkFunction(
        "branin",
        branin,
        bounds=((-5.0, 10.0), (0.0, 15.0)),
        direction="minimize",
        optimum_value=0.39788735772973816,
        optimum_point=(math.pi, 2.275),
    ),
    "hartmann6": BenchmarkFunction(
        "hartmann6",
        hartmann6,
        bounds=((0.0, 1.0),) * 6,
        direction="minimize",
        optimum_value=-3.32237,
    ),
    "additive-plus-bilinear": BenchmarkFunction(
        "additive-plus-bilinear",
        additive_plus_bilinear,
        bounds=((0.0, 1.0),) * 4,
        direction="minimize",
    ),
}


def benchmark_names() -> tuple[str, ...]:
    return tuple(_REGISTRY)


def get_benchmark(name: str) -> BenchmarkFunction:
    if name not in _REGISTRY:
        raise SchemaError(
            f"unknown builtin objective {name!r}; known: {', '.join(_REGISTRY)}"
        )
    return _REGISTRY[name]
