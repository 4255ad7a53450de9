"""Seeded Monte-Carlo trials over STA/DSTA runs."""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from ..core import DstaError, HistoryRow, RandomStream, SolverConfig
from ..engines import ENGINES
from ..problems import BenchmarkSpec, generate_problem, illustrative_example, read_instance
from ..refine import RefineSettings, refine
from .stats import ComparisonVerdict, TrialStats

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProblemSelector:
    """Which objective to optimize.

    kind is one of ``benchmark`` (uses ``name``, ``dimension``), ``illustrative``,
    ``snl-file`` (``path``) or ``snl-generate`` (``sensors``, ``anchors``,
    ``radio_range``, ``noise``, ``instance_seed``).
    """

    kind: str
    name: str = ""
    dimension: int = 0
    path: str = ""
    sensors: int = 0
    anchors: int = 0
    radio_range: float = 0.3
    noise: float = 0.0
    instance_seed: int = 0

    @classmethod
    def benchmark(cls, name, dimension):
        return cls("benchmark", name=name, dimension=dimension)

    @classmethod
    def illustrative(cls):
        return cls("illustrative")

    @classmethod
    def snl_file(cls, path):
        return cls("snl-file", path=str(path))

    @classmethod
    def snl_generate(cls, sensors, anchors, radio_range, noise, instance_seed):
        return cls("snl-generate", sensors=sensors, anchors=anchors,
                   radio_range=radio_range, noise=noise, instance_seed=instance_seed)

    @property
    def is_snl(self) -> bool:
        return self.kind != "benchmark"

    @property
    def label(self) -> str:
        if self.kind == "benchmark":
            return f"{self.name}-{self.dimension}"
        if self.kind == "snl-file":
            return "snl-" + self.path.replace("\\", "/").rsplit("/", 1)[-1].rsplit(".", 1)[0]
        if self.kind == "snl-generate":
            return f"snl-n{self.sensors}-m{self.anchors}-s{self.instance_seed}"
        return "snl-illustrative"

    def build(self):
        """Return ``(objective, gradient, truth)``; truth is ``None`` unless known."""
        if self.kind == "benchmark":
            spec = BenchmarkSpec(self.name, self.dimension)
            return spec, spec.gradient, None
        if self.kind == "illustrative":
            problem, truth = illustrative_example()
        elif self.kind == "snl-file":
            problem, truth = read_instance(self.path)
        elif self.kind == "snl-generate":
            problem, truth = generate_problem(self.sensors, self.anchors, self.radio_range,
                                              self.noise, self.instance_seed)
        else:
            raise ValueError(f"unknown problem kind {self.kind!r}")
        return problem, problem.gradient, truth


@dataclass(frozen=True)
class ExperimentConfig:
    problem: ProblemSelector
    solver: str = "dsta"
    config: Optional[SolverConfig] = None  # bounds default to the problem's own
    trials: int = 20
    base_seed: int = 0
    refine: bool = False
    refine_settings: RefineSettings = field(default_factory=RefineSettings)
    jobs: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.solver not in ENGINES:
            raise ValueError(f"solver must be one of {sorted(ENGINES)}")

    def seed_of(self, trial: int) -> int:
        return self.base_seed + trial

    @property
    def label(self) -> str:
        tag = f"{self.problem.label}_{self.solver}"
        if self.solver == "dsta":
            cfg = self.config
            p1, p2 = (cfg.p1, cfg.p2) if cfg else (0.9, 0.3)
            tag += f"_p{p1:g}-{p2:g}"
        return tag


@dataclass
class TrialOutcome:
    trial: int
    seed: int
    final: Optional[float]
    history: list[HistoryRow]
    state: Optional[np.ndarray]
    error: str = ""


@dataclass
class ExperimentRecord:
    experiment: ExperimentConfig
    stats: TrialStats
    outcomes: list[TrialOutcome]
    truth: Optional[np.ndarray] = None
    verdict: Optional[ComparisonVerdict] = None

    @property
    def histories(self):
        return {o.trial: o.history for o in self.outcomes}


def resolve_config(exp: ExperimentConfig, objective) -> SolverConfig:
    bounds = objective.bounds
    if exp.config is None:
        return SolverConfig.uniform(bounds)
    if not exp.config.initial_bounds:
        return replace(exp.config, initial_bounds=list(bounds))
    return exp.config


def _run_one(exp: ExperimentConfig, trial: int) -> TrialOutcome:
    objective, gradient, _ = exp.problem.build()
    cfg = resolve_config(exp, objective)
    seed = exp.seed_of(trial)
    try:
        result = ENGINES[exp.solver](objective, cfg, RandomStream(seed))
        state, final = result.best_state, result.best_fitness
        if exp.refine:
            polished = refine(objective, gradient, state, exp.refine_settings)
            state, final = polished.x, polished.fitness
        return TrialOutcome(trial, seed, float(final), result.history, state)
    except DstaError as exc:
        log.warning("trial %d (seed %d) failed: %s", trial, seed, exc)
        partial = getattr(exc, "result", None)
        history = partial.history if partial is not None else []
        return TrialOutcome(trial, seed, None, history, None, str(exc))


def run_trials(exp: ExperimentConfig) -> ExperimentRecord:
    """Run ``exp.trials`` independent seeded runs; trial ``i`` uses seed ``base_seed + i``.

    Failed trials are kept in the record but excluded from the statistics.
    """
    if exp.jobs > 1:
        with ProcessPoolExecutor(max_workers=exp.jobs) as pool:
            outcomes = list(pool.map(_run_one, [exp] * exp.trials, range(exp.trials)))
    else:
        outcomes = [_run_one(exp, t) for t in range(exp.trials)]
    finals = [o.final for o in outcomes if o.final is not None]
    failed = [o.trial for o in outcomes if o.final is None]
    _, _, truth = exp.problem.build()
    return ExperimentRecord(exp, TrialStats.from_finals(finals, failed), outcomes, truth)
