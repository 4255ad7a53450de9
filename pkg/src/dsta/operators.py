"""State transformation operators.

Every operator takes the current state and an operator factor, draws fresh
randomness from the supplied stream and returns candidate state(s). With
``size=None`` one candidate of shape ``(n,)`` is returned, otherwise a
``(size, n)`` batch. Inputs are never mutated.
"""
from __future__ import annotations

import enum

import numpy as np

from .core import DEGENERATE_NORM, DegenerateState, RandomStream, ZeroDirection


class OperatorKind(enum.Enum):
    ROTATION = "rotation"
    FAST_ROTATION = "fast_rotation"
    TRANSLATION = "translation"
    EXPANSION = "expansion"
    AXESION = "axesion"


def _squeeze(batch: np.ndarray, size) -> np.ndarray:
    return batch[0] if size is None else batch


def rotate(x, alpha: float, rng: RandomStream, size=None) -> np.ndarray:
    """Rotation: ``x + alpha / (n ||x||) * R x`` with R uniform on [-1, 1]^(n x n).

    Each candidate lies in the ball of radius ``alpha`` around ``x``. Work is
    quadratic in ``n`` per candidate.

    Raises
    ------
    DegenerateState
        If ``||x|| < 1e-12``; use :func:`rotate_fast` instead.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    norm = np.linalg.norm(x)
    if norm < DEGENERATE_NORM:
        raise DegenerateState(f"rotation undefined for ||x|| = {norm:.3g}")
    k = 1 if size is None else size
    # One matrix at a time: a (k, n, n) block is too large for big n.
    steps = np.empty((k, n))
    for i in range(k):
        steps[i] = rng.uniform(-1.0, 1.0, (n, n)) @ x
    return _squeeze(x + (alpha / (n * norm)) * steps, size)


def rotate_fast(x, alpha: float, rng: RandomStream, size=None) -> np.ndarray:
    """Fast rotation: ``x + alpha * r * u / ||u||`` with scalar r and vector u uniform on [-1, 1].

    The step length is exactly ``alpha * |r|``; work is linear in ``n``.
    A direction with zero norm is redrawn.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    k = 1 if size is None else size
    r = rng.uniform(-1.0, 1.0, k)
    u = rng.uniform(-1.0, 1.0, (k, n))
    norms = np.linalg.norm(u, axis=1)
    while np.any(norms == 0.0):
        bad = norms == 0.0
        u[bad] = rng.uniform(-1.0, 1.0, (int(bad.sum()), n))
        norms = np.linalg.norm(u, axis=1)
    step = (alpha * r / norms)[:, None] * u
    return _squeeze(x + step, size)


def translate(x, x_prev, beta: float, rng: RandomStream, size=None) -> np.ndarray:
    """Translation along the ray from ``x_prev`` through ``x``, at most ``beta`` beyond ``x``.

    Raises
    ------
    ZeroDirection
        If ``||x - x_prev|| < 1e-12``.
    """
    x = np.asarray(x, dtype=float)
    d = x - np.asarray(x_prev, dtype=float)
    dist = np.linalg.norm(d)
    if dist < DEGENERATE_NORM:
        raise ZeroDirection(f"translation direction has norm {dist:.3g}")
    k = 1 if size is None else size
    t = rng.random(k)
    step = (beta * t)[:, None] * (d / dist)
    return _squeeze(x + step, size)


def expand(x, gamma: float, rng: RandomStream, size=None) -> np.ndarray:
    """Expansion: coordinate i becomes ``x_i * (1 + gamma * g_i)``, g standard Gaussian."""
    x = np.asarray(x, dtype=float)
    k = 1 if size is None else size
    g = rng.normal((k, x.shape[0]))
    return _squeeze(x + gamma * g * x, size)


def axesion(x, delta: float, rng: RandomStream, size=None) -> np.ndarray:
    """Axesion: scale a single, uniformly chosen coordinate by ``1 + delta * g``."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    k = 1 if size is None else size
    pos = rng.integers(n, k)
    g = rng.normal(k)
    out = np.tile(x, (k, 1))
    rows = np.arange(k)
    out[rows, pos] = x[pos] + delta * g * x[pos]
    return _squeeze(out, size)
