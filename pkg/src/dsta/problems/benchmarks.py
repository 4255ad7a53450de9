"""Benchmark functions. All accept a state ``(n,)`` or a batch ``(k, n)``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import DimensionMismatch


def spherical(x):
    x = np.asarray(x, dtype=float)
    return np.sum(x**2, axis=-1)


def rastrigin(x):
    x = np.asarray(x, dtype=float)
    return np.sum(x**2 - 10.0 * np.cos(2 * np.pi * x) + 10.0, axis=-1)


def griewank(x):
    x = np.asarray(x, dtype=float)
    i = np.arange(1, x.shape[-1] + 1)
    return np.sum(x**2, axis=-1) / 4000.0 - np.prod(np.cos(x / np.sqrt(i)), axis=-1) + 1.0


def rosenbrock(x):
    x = np.asarray(x, dtype=float)
    head, tail = x[..., :-1], x[..., 1:]
    return np.sum(100.0 * (tail - head**2) ** 2 + (head - 1.0) ** 2, axis=-1)


def ackley(x):
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    return (-20.0 * np.exp(-0.2 * np.sqrt(np.sum(x**2, axis=-1) / n))
            - np.exp(np.sum(np.cos(2 * np.pi * x), axis=-1) / n)
            + 20.0 + np.e)


def rosenbrock_gradient(x):
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    head, tail = x[:-1], x[1:]
    inner = tail - head**2
    g[:-1] += -400.0 * head * inner + 2.0 * (head - 1.0)
    g[1:] += 200.0 * inner
    return g


def spherical_gradient(x):
    return 2.0 * np.asarray(x, dtype=float)


# name -> (function, initialization domain, minimizer value, analytic gradient)
_TABLE = {
    "spherical": (spherical, (0.0, 100.0), 0.0, spherical_gradient),
    "rastrigin": (rastrigin, (0.0, 5.12), 0.0, None),
    "griewank": (griewank, (0.0, 600.0), 0.0, None),
    "rosenbrock": (rosenbrock, (0.0, 30.0), 1.0, rosenbrock_gradient),
    "ackley": (ackley, (0.0, 32.0), 0.0, None),
}

BENCHMARK_NAMES = tuple(_TABLE)


@dataclass(frozen=True)
class BenchmarkSpec:
    """A named benchmark at a fixed dimension.

    Instances are objectives: ``spec(x)`` scores one state, ``spec.batch(X)``
    scores rows of ``X``.
    """

    name: str
    dimension: int

    def __post_init__(self):
        if self.name not in _TABLE:
            raise KeyError(f"unknown benchmark {self.name!r}; choose from {BENCHMARK_NAMES}")
        if self.dimension < 1 or (self.name == "rosenbrock" and self.dimension < 2):
            raise DimensionMismatch(f"{self.name} needs a larger dimension than {self.dimension}")

    @property
    def domain(self) -> tuple[float, float]:
        return _TABLE[self.name][1]

    @property
    def bounds(self) -> list[tuple[float, float]]:
        return [self.domain] * self.dimension

    @property
    def minimizer(self) -> np.ndarray:
        return np.full(self.dimension, _TABLE[self.name][2])

    @property
    def gradient(self):
        """Analytic gradient, or ``None`` when only numeric differences are available."""
        return _TABLE[self.name][3]

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dimension:
            raise DimensionMismatch(f"{self.name} expects {self.dimension} coordinates, got {x.shape[-1]}")
        return x

    def __call__(self, x) -> float:
        return float(_TABLE[self.name][0](self._check(x)))

    def batch(self, X) -> np.ndarray:
        return _TABLE[self.name][0](self._check(X))


def eval_benchmark(spec: BenchmarkSpec, x) -> float:
    return spec(x)
