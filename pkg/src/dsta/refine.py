"""Gradient-based polishing of a final state, and a finite-difference oracle."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .core import EvaluationError


def numeric_gradient(objective, x, h=None) -> np.ndarray:
    """Central differences ``(f(x + h e_i) - f(x - h e_i)) / 2h`` per coordinate.

    ``h`` may be a scalar or a per-coordinate array. By default it is
    ``1e-6 * max(1, |x_i|)``.
    """
    x = np.asarray(x, dtype=float)
    steps = 1e-6 * np.maximum(1.0, np.abs(x)) if h is None else np.broadcast_to(np.asarray(h, float), x.shape)
    g = np.empty_like(x)
    probe = x.copy()
    for i, hi in enumerate(steps):
        probe[i] = x[i] + hi
        fp = objective(probe)
        probe[i] = x[i] - hi
        fm = objective(probe)
        probe[i] = x[i]
        if not (np.isfinite(fp) and np.isfinite(fm)):
            raise EvaluationError(f"non-finite objective while probing coordinate {i}")
        g[i] = (fp - fm) / (2.0 * hi)
    return g


@dataclass(frozen=True)
class RefineSettings:
    gradient_tolerance: float = 1e-10
    max_steps: Optional[int] = None  # default 1000 * n
    initial_step: float = 1.0
    backtrack_ratio: float = 0.5
    sufficient_decrease: float = 1e-4

    def __post_init__(self):
        if not self.gradient_tolerance > 0 or not self.initial_step > 0:
            raise ValueError("tolerance and initial step must be positive")
        if self.max_steps is not None and self.max_steps < 1:
            raise ValueError("max_steps must be positive")
        for name in ("backtrack_ratio", "sufficient_decrease"):
            if not 0 < getattr(self, name) < 1:
                raise ValueError(f"{name} must lie strictly inside (0, 1)")


class RefineResult(NamedTuple):
    x: np.ndarray
    fitness: float
    steps: int
    status: str  # "converged" | "max_steps" | "stalled"

    @property
    def stalled(self) -> bool:
        return self.status == "stalled"


def refine(objective, gradient, x0, settings: RefineSettings = RefineSettings()) -> RefineResult:
    """Steepest descent with Armijo backtracking.

    ``gradient`` is a callable returning the gradient, or ``None`` to fall
    back on :func:`numeric_gradient`. The trial step of each line search
    starts from the previously accepted step enlarged by one backtracking
    factor (``initial_step`` for the first one).

    A line search that cannot find a decreasing step ends the run with
    status ``"stalled"``; the best iterate is still returned.
    """
    if gradient is None:
        def gradient(z):
            return numeric_gradient(objective, z)

    x = np.array(x0, dtype=float)
    fx = float(objective(x))
    max_steps = settings.max_steps or 1000 * x.size
    c, rho = settings.sufficient_decrease, settings.backtrack_ratio
    t = settings.initial_step * rho  # enlarged back to initial_step below

    for step in range(max_steps):
        g = np.asarray(gradient(x), dtype=float)
        if np.max(np.abs(g)) < settings.gradient_tolerance:
            return RefineResult(x, fx, step, "converged")
        gg = float(g @ g)
        t = t / rho
        while True:
            x_new = x - t * g
            f_new = float(objective(x_new))
            if np.isfinite(f_new) and f_new < fx and f_new <= fx - c * t * gg:
                break
            t *= rho
            if t * np.sqrt(gg) <= 1e-16 * max(1.0, float(np.linalg.norm(x))):
                return RefineResult(x, fx, step, "stalled")
        x, fx = x_new, f_new
    return RefineResult(x, fx, max_steps, "max_steps")
