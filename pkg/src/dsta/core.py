"""Shared types, seeded randomness and configuration handling.

A state is represented as a 1-D ``float64`` numpy array. Every engine run
owns exactly one :class:`RandomStream`; nothing in the package touches the
global numpy random state.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np


class DstaError(Exception):
    """Base class for all errors raised by this package."""


class MalformedBounds(DstaError, ValueError):
    pass


class MalformedParameters(DstaError, ValueError):
    pass


class DimensionMismatch(DstaError, ValueError):
    pass


class DegenerateState(DstaError, ArithmeticError):
    """Rotation is undefined for a (numerically) zero state."""


class ZeroDirection(DstaError, ArithmeticError):
    """Translation needs two distinct states to define a direction."""


class EvaluationError(DstaError, ArithmeticError):
    """The objective returned a non-finite value."""


class ConfigError(DstaError, ValueError):
    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


# Norms below this are treated as zero by rotation and translation.
DEGENERATE_NORM = 1e-12


class RandomStream:
    """Seedable stream of uniform and Gaussian draws.

    Backed by numpy's PCG64 bit generator (128-bit state). Two streams built
    from the same seed yield identical sequences. A stream is single-owner:
    share it between concurrent tasks and reproducibility is gone.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def random(self, size=None):
        """Uniform draws on [0, 1)."""
        return self._gen.random(size)

    def uniform(self, low=-1.0, high=1.0, size=None):
        return self._gen.uniform(low, high, size)

    def normal(self, size=None):
        """Standard Gaussian draws."""
        return self._gen.standard_normal(size)

    def integers(self, high: int, size=None):
        return self._gen.integers(0, high, size)

    def bernoulli(self, p: float) -> bool:
        """True with probability ``p``.

        Degenerate probabilities (0 or 1) consume no draw, so a solver with
        p = 0 or p = 1 follows the same draw sequence as one without the
        probabilistic branch at all.
        """
        if p <= 0.0:
            return False
        if p >= 1.0:
            return True
        return bool(self._gen.random() < p)

    def __repr__(self):
        return f"RandomStream(seed={self.seed})"


@dataclass
class FactorSchedule:
    """Exponentially decaying operator factor with reset to its maximum."""

    max: float = 1.0
    min: float = 1e-8
    fc: float = 2.0
    current: float | None = None

    def __post_init__(self):
        if self.current is None:
            self.current = self.max

    def decay(self) -> float:
        self.current = self.current / self.fc
        if self.current < self.min:
            self.current = self.max
        return self.current

    def reset(self) -> None:
        self.current = self.max

    def period(self) -> int:
        """Number of decay steps between consecutive visits to ``max``."""
        k = 0
        value = self.max
        while True:
            value = value / self.fc
            k += 1
            if value < self.min:
                return k


def _schedule_violations(name: str, s: FactorSchedule) -> list[str]:
    out = []
    for label, value in (("max", s.max), ("min", s.min)):
        if not (math.isfinite(value) and value > 0):
            out.append(f"{name}.{label} must be a positive finite real")
    if not out and not s.min < s.max:
        out.append(f"{name}: min must be smaller than max")
    if not (math.isfinite(s.fc) and s.fc > 1):
        out.append(f"{name}: decay base must exceed 1")
    if s.current is not None and not out and not (s.min <= s.current <= s.max):
        out.append(f"{name}: current outside [min, max]")
    return out


@dataclass
class SolverConfig:
    """Parameters shared by the STA and DSTA engines.

    The defaults are the standard setting: all four factors decay from
    1 to 1e-8 with base 2, SE = 30, (p1, p2) = (0.9, 0.3), 1000 iterations.
    ``p1`` is the restoration probability and ``p2`` the risk probability.
    """

    initial_bounds: list[tuple[float, float]]
    alpha: FactorSchedule = field(default_factory=FactorSchedule)
    beta: FactorSchedule = field(default_factory=FactorSchedule)
    gamma: FactorSchedule = field(default_factory=FactorSchedule)
    delta: FactorSchedule = field(default_factory=FactorSchedule)
    se: int = 30
    p1: float = 0.9
    p2: float = 0.3
    max_outer_iterations: int = 1000

    @property
    def dimension(self) -> int:
        return len(self.initial_bounds)

    def schedules(self) -> dict[str, FactorSchedule]:
        return {"alpha": self.alpha, "beta": self.beta,
                "gamma": self.gamma, "delta": self.delta}

    def fresh_schedules(self) -> dict[str, FactorSchedule]:
        """Independent copies of the four schedules, each starting at max."""
        return {k: replace(s, current=s.max) for k, s in self.schedules().items()}

    def with_(self, **changes) -> "SolverConfig":
        return replace(self, **changes)

    @classmethod
    def uniform(cls, bounds, *, factor_max=1.0, factor_min=1e-8, fc=2.0, **kw) -> "SolverConfig":
        """Config whose four factors share one schedule."""
        def sched():
            return FactorSchedule(factor_max, factor_min, fc)
        return cls(initial_bounds=[tuple(map(float, b)) for b in bounds],
                   alpha=sched(), beta=sched(), gamma=sched(), delta=sched(), **kw)


class HistoryRow(NamedTuple):
    iteration: int
    best_fitness: float
    evaluations: int


@dataclass
class RunResult:
    best_state: np.ndarray
    best_fitness: float
    history: list[HistoryRow]
    evaluations: int


def validate_config(cfg: SolverConfig) -> list[str]:
    """Return every violation found in ``cfg``; an empty list means valid."""
    violations: list[str] = []
    for name, sched in cfg.schedules().items():
        violations.extend(_schedule_violations(name, sched))
    if not isinstance(cfg.se, (int, np.integer)) or cfg.se < 1:
        violations.append("se must be a positive integer")
    for name in ("p1", "p2"):
        p = getattr(cfg, name)
        if not (isinstance(p, (int, float)) and 0.0 <= p <= 1.0):
            violations.append(f"{name}: probability out of range [0, 1]")
    if not isinstance(cfg.max_outer_iterations, (int, np.integer)) or cfg.max_outer_iterations < 1:
        violations.append("max_outer_iterations must be a positive integer")
    violations.extend(_bounds_violations(cfg.initial_bounds))
    return violations


def _bounds_violations(bounds) -> list[str]:
    if bounds is None or len(bounds) == 0:
        return ["bounds must be non-empty"]
    out = []
    for i, b in enumerate(bounds):
        if len(b) != 2:
            out.append(f"bounds[{i}] must be a (low, high) pair")
            continue
        low, high = b
        if not (math.isfinite(low) and math.isfinite(high)):
            out.append(f"bounds[{i}] must be finite")
        elif not low < high:
            out.append(f"bounds[{i}]: low must be smaller than high")
    return out


def sample_initial(bounds, rng: RandomStream) -> np.ndarray:
    """Draw a state uniformly from the box ``bounds``."""
    problems = _bounds_violations(bounds)
    if problems:
        raise MalformedBounds("; ".join(problems))
    b = np.asarray(bounds, dtype=float)
    low, high = b[:, 0], b[:, 1]
    return low + (high - low) * rng.random(len(b))


def require_valid(cfg: SolverConfig) -> None:
    violations = validate_config(cfg)
    if violations:
        raise ConfigError(violations)


# Flat key-value file format -------------------------------------------------

_FACTORS = ("alpha", "beta", "gamma", "delta")


def config_to_dict(cfg: SolverConfig) -> dict:
    d = {
        "alpha_max": cfg.alpha.max,
        "alpha_min": cfg.alpha.min,
        "fc": cfg.alpha.fc,
        "se": int(cfg.se),
        "p1": cfg.p1,
        "p2": cfg.p2,
        "max_iter": int(cfg.max_outer_iterations),
        "bounds": [[float(lo), float(hi)] for lo, hi in cfg.initial_bounds],
    }
    # Extra keys only for factors that diverge from alpha's schedule.
    for name in _FACTORS[1:]:
        s = getattr(cfg, name)
        if (s.max, s.min, s.fc) != (cfg.alpha.max, cfg.alpha.min, cfg.alpha.fc):
            d[f"{name}_max"], d[f"{name}_min"], d[f"{name}_fc"] = s.max, s.min, s.fc
    return d


def config_from_dict(d: dict) -> SolverConfig:
    known = {"alpha_max", "alpha_min", "fc", "se", "p1", "p2", "max_iter", "bounds"}
    known |= {f"{n}_{k}" for n in _FACTORS[1:] for k in ("max", "min", "fc")}
    unknown = set(d) - known
    if unknown:
        raise ConfigError([f"unknown key {k!r}" for k in sorted(unknown)])
    if "bounds" not in d:
        raise ConfigError(["missing key 'bounds'"])
    amax = float(d.get("alpha_max", 1.0))
    amin = float(d.get("alpha_min", 1e-8))
    fc = float(d.get("fc", 2.0))
    scheds = {"alpha": FactorSchedule(amax, amin, fc)}
    for name in _FACTORS[1:]:
        scheds[name] = FactorSchedule(float(d.get(f"{name}_max", amax)),
                                      float(d.get(f"{name}_min", amin)),
                                      float(d.get(f"{name}_fc", fc)))
    return SolverConfig(
        initial_bounds=[tuple(map(float, b)) for b in d["bounds"]],
        se=int(d.get("se", 30)),
        p1=float(d.get("p1", 0.9)),
        p2=float(d.get("p2", 0.3)),
        max_outer_iterations=int(d.get("max_iter", 1000)),
        **scheds,
    )


def save_config(cfg: SolverConfig, path) -> None:
    Path(path).write_text(json.dumps(config_to_dict(cfg), indent=2) + "\n")


def load_config(path) -> SolverConfig:
    return config_from_dict(json.loads(Path(path).read_text()))
