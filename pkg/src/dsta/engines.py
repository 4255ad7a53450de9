"""STA and DSTA search loops."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Protocol

import numpy as np

from . import operators as ops
from .core import (
    DegenerateState,
    EvaluationError,
    FactorSchedule,
    HistoryRow,
    RandomStream,
    RunResult,
    SolverConfig,
    ZeroDirection,
    require_valid,
    sample_initial,
)
from .operators import OperatorKind


class Objective(Protocol):
    def __call__(self, x: np.ndarray) -> float: ...

    def batch(self, X: np.ndarray) -> np.ndarray: ...


class _ScalarObjective:
    def __init__(self, f):
        self.f = f

    def __call__(self, x):
        return float(self.f(x))

    def batch(self, X):
        return np.array([self.f(row) for row in X], dtype=float)


def as_objective(f) -> Objective:
    """Wrap a plain ``f(x) -> float`` so it can score candidate batches."""
    return f if hasattr(f, "batch") else _ScalarObjective(f)


def _evaluate(objective: Objective, X: np.ndarray) -> np.ndarray:
    values = np.asarray(objective.batch(X), dtype=float)
    if not np.all(np.isfinite(values)):
        raise EvaluationError("objective returned a non-finite value")
    return values


@dataclass(frozen=True)
class AcceptancePolicy:
    """Greedy when ``risk == 0``; otherwise also accepts a worse batch best with probability ``risk``."""

    risk: float = 0.0

    @classmethod
    def greedy(cls) -> "AcceptancePolicy":
        return cls(0.0)

    @classmethod
    def risk_in_probability(cls, p2: float) -> "AcceptancePolicy":
        return cls(float(p2))

    @property
    def is_greedy(self) -> bool:
        return self.risk == 0.0


GREEDY = AcceptancePolicy.greedy()


class SearchOutcome(NamedTuple):
    state: np.ndarray
    fitness: float
    improved: bool
    evaluations: int


_FACTOR_OF = {
    OperatorKind.ROTATION: "alpha",
    OperatorKind.FAST_ROTATION: "alpha",
    OperatorKind.EXPANSION: "gamma",
    OperatorKind.AXESION: "delta",
}


def _candidates(kind: OperatorKind, x, factor, se, rng):
    if kind is OperatorKind.FAST_ROTATION:
        return ops.rotate_fast(x, factor, rng, size=se)
    if kind is OperatorKind.ROTATION:
        try:
            return ops.rotate(x, factor, rng, size=se)
        except DegenerateState:
            return ops.rotate_fast(x, factor, rng, size=se)
    if kind is OperatorKind.EXPANSION:
        return ops.expand(x, factor, rng, size=se)
    return ops.axesion(x, factor, rng, size=se)


def _factor(factors, name):
    value = factors[name]
    return value.current if isinstance(value, FactorSchedule) else float(value)


def operator_search(
    objective,
    state: np.ndarray,
    fitness: float,
    kind: OperatorKind,
    factors: dict,
    se: int,
    policy: AcceptancePolicy,
    rng: RandomStream,
) -> SearchOutcome:
    """One inner search: SE candidates from ``kind``, then acceptance.

    The batch minimum replaces the incumbent when strictly better, after
    which a translation search along the improving direction runs with
    greedy acceptance. A batch minimum that is not better is still taken with
    probability ``policy.risk``.

    ``factors`` maps ``alpha/beta/gamma/delta`` to either numbers or
    :class:`FactorSchedule` objects (their current value is used).
    """
    if kind not in _FACTOR_OF:
        raise ValueError(f"{kind} cannot drive an operator search")
    objective = as_objective(objective)
    X = _candidates(kind, state, _factor(factors, _FACTOR_OF[kind]), se, rng)
    fx = _evaluate(objective, X)
    evaluations = se
    i = int(np.argmin(fx))
    new_state, new_fit = X[i], float(fx[i])

    if new_fit < fitness:
        previous = state
        state, fitness = new_state, new_fit
        try:
            T = ops.translate(state, previous, _factor(factors, "beta"), rng, size=se)
        except ZeroDirection:
            T = None
        if T is not None:
            ft = _evaluate(objective, T)
            evaluations += se
            j = int(np.argmin(ft))
            if ft[j] < fitness:
                state, fitness = T[j], float(ft[j])
        return SearchOutcome(state, fitness, True, evaluations)

    if not policy.is_greedy and rng.bernoulli(policy.risk):
        return SearchOutcome(new_state, new_fit, False, evaluations)
    return SearchOutcome(state, fitness, False, evaluations)


class PartialRun(EvaluationError):
    """Evaluation failure; ``result`` holds the history up to the failure."""

    def __init__(self, message, result: RunResult):
        super().__init__(message)
        self.result = result


Sink = Optional[Callable[[HistoryRow], None]]

_SEQUENCE = (OperatorKind.EXPANSION, None, OperatorKind.AXESION)


def _run(objective, cfg: SolverConfig, rng: RandomStream, policy: AcceptancePolicy,
         restore_p: float, sink: Sink, rotation: OperatorKind) -> RunResult:
    require_valid(cfg)
    objective = as_objective(objective)
    factors = cfg.fresh_schedules()
    sequence = [rotation if k is None else k for k in _SEQUENCE]

    best = sample_initial(cfg.initial_bounds, rng)
    f_best = float(_evaluate(objective, best[None, :])[0])
    evaluations = 0  # counts operator-search candidates only
    archive, f_archive = best, f_best
    history: list[HistoryRow] = []

    for it in range(1, cfg.max_outer_iterations + 1):
        for kind in sequence:
            try:
                out = operator_search(objective, best, f_best, kind, factors, cfg.se, policy, rng)
            except EvaluationError as exc:
                partial = RunResult(archive.copy(), f_archive, history, evaluations)
                raise PartialRun(f"iteration {it}, {kind.value}: {exc}", partial) from exc
            best, f_best = out.state, out.fitness
            evaluations += out.evaluations
            if f_best < f_archive:
                archive, f_archive = best, f_best
        if rng.bernoulli(restore_p):
            best, f_best = archive, f_archive
        for sched in factors.values():
            sched.decay()
        row = HistoryRow(it, f_archive, evaluations)
        history.append(row)
        if sink is not None:
            sink(row)

    return RunResult(archive.copy(), f_archive, history, evaluations)


def run_sta(objective, cfg: SolverConfig, rng: RandomStream, sink: Sink = None,
            rotation: OperatorKind = OperatorKind.FAST_ROTATION) -> RunResult:
    """State transition algorithm with greedy acceptance.

    Each outer iteration runs expansion, rotation and axesion searches in
    that order and then decays all four factors. ``cfg.p1``/``cfg.p2`` are
    ignored.
    """
    return _run(objective, cfg, rng, GREEDY, 0.0, sink, rotation)


def run_dsta(objective, cfg: SolverConfig, rng: RandomStream, sink: Sink = None,
             rotation: OperatorKind = OperatorKind.FAST_ROTATION) -> RunResult:
    """Dynamic STA: risk acceptance with probability ``cfg.p2`` inside each
    operator search, restoration of the archived best with probability
    ``cfg.p1`` after each outer iteration.

    The history tracks the archive, which never gets worse even when the
    incumbent does.
    """
    return _run(objective, cfg, rng, AcceptancePolicy.risk_in_probability(cfg.p2),
                cfg.p1, sink, rotation)


ENGINES = {"sta": run_sta, "dsta": run_dsta}
