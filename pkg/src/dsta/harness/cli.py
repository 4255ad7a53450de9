"""Command line entry point: ``dsta {bench,snl,gen,param-study,compare}``."""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from ..core import DstaError, SolverConfig, load_config, require_valid
from ..problems import BENCHMARK_NAMES, generate_problem, write_instance
from ..refine import RefineSettings
from .experiment import ExperimentConfig, ProblemSelector, run_trials
from .output import emit_outputs, format_verdict, read_summary
from .stats import wilcoxon_rank_sum

GRID = (0.1, 0.3, 0.5, 0.7, 0.9)


def _solver_flags(p: argparse.ArgumentParser, solver=True) -> None:
    g = p.add_argument_group("solver")
    if solver:
        g.add_argument("--solver", choices=("sta", "dsta"), default="dsta")
    g.add_argument("--config", type=Path, help="JSON config file; flags below override it")
    g.add_argument("--alpha-max", type=float)
    g.add_argument("--alpha-min", type=float)
    g.add_argument("--fc", type=float)
    g.add_argument("--se", type=int)
    g.add_argument("--p1", type=float, help="restoration probability")
    g.add_argument("--p2", type=float, help="risk probability")
    g.add_argument("--max-iter", type=int)
    r = p.add_argument_group("experiment")
    r.add_argument("--seed", type=int, default=0, help="base seed; trial i uses seed + i")
    r.add_argument("--trials", type=int, default=20)
    r.add_argument("--refine", action="store_true", help="polish each final state by gradient descent")
    r.add_argument("--jobs", type=int, default=1, help="worker processes for trials")
    r.add_argument("--out", type=Path, default=Path("results"))


def _solver_config(args, bounds) -> SolverConfig:
    if args.config:
        cfg = load_config(args.config)
    else:
        cfg = SolverConfig.uniform(bounds)
    if not args.config or len(cfg.initial_bounds) != len(bounds):
        cfg = replace(cfg, initial_bounds=list(bounds))
    sched = {}
    for name in ("alpha", "beta", "gamma", "delta"):
        s = getattr(cfg, name)
        s = replace(s, max=args.alpha_max if args.alpha_max is not None else s.max,
                    min=args.alpha_min if args.alpha_min is not None else s.min,
                    fc=args.fc if args.fc is not None else s.fc, current=None)
        sched[name] = s
    cfg = replace(cfg, **sched)
    for flag, attr in (("se", "se"), ("p1", "p1"), ("p2", "p2"), ("max_iter", "max_outer_iterations")):
        value = getattr(args, flag)
        if value is not None:
            cfg = replace(cfg, **{attr: value})
    require_valid(cfg)
    return cfg


def _experiment(args, problem: ProblemSelector, solver=None, cfg=None) -> ExperimentConfig:
    objective, _, _ = problem.build()
    cfg = cfg or _solver_config(args, objective.bounds)
    return ExperimentConfig(problem, solver or args.solver, cfg, trials=args.trials,
                            base_seed=args.seed, refine=args.refine,
                            refine_settings=RefineSettings(), jobs=args.jobs)


def _report(record) -> None:
    s = record.stats
    failed = f", {len(s.failed)} failed" if s.failed else ""
    print(f"{record.experiment.label}: best {s.best:.6g}  mean {s.mean:.6g}  std {s.std:.6g}"
          f"  ({len(s.finals)} trials{failed})")


def cmd_bench(args) -> int:
    record = run_trials(_experiment(args, ProblemSelector.benchmark(args.function, args.dim)))
    emit_outputs([record], args.out)
    _report(record)
    return 0


def cmd_snl(args) -> int:
    problem = ProblemSelector.snl_file(args.instance) if args.instance else ProblemSelector.illustrative()
    record = run_trials(_experiment(args, problem))
    emit_outputs([record], args.out)
    _report(record)
    return 0


def cmd_gen(args) -> int:
    problem, truth = generate_problem(args.sensors, args.anchors, args.radio_range, args.noise, args.seed)
    write_instance(problem, args.output, truth=truth)
    print(f"wrote {args.output}: {problem.sensor_count} sensors, {problem.anchor_count} anchors, "
          f"{len(problem.sensor_edges)} + {len(problem.anchor_edges)} edges")
    return 0


def cmd_param_study(args) -> int:
    problem = ProblemSelector.benchmark(args.function, args.dim)
    base = _experiment(args, problem, solver="sta")
    baseline = run_trials(base)
    records = [baseline]
    print(f"{'p1/p2':>6}" + "".join(f"{p2:>26}" for p2 in GRID))
    for p1 in GRID:
        cells = []
        for p2 in GRID:
            exp = replace(base, solver="dsta", config=replace(base.config, p1=p1, p2=p2))
            rec = run_trials(exp)
            rec.verdict = wilcoxon_rank_sum(rec.stats.finals, baseline.stats.finals, args.significance)
            records.append(rec)
            cells.append(f"{rec.stats.mean:.4g} ± {rec.stats.std:.4g} {rec.verdict}")
        print(f"{p1:>6}" + "".join(f"{c:>26}" for c in cells))
    s = baseline.stats
    print(f"{'STA':>6}  {s.mean:.4g} ± {s.std:.4g}")
    emit_outputs(records, args.out)
    return 0


def cmd_compare(args) -> int:
    a = read_summary(args.summary_a)[args.row_a]
    b = read_summary(args.summary_b)[args.row_b]
    if not a["finals"] or not b["finals"]:
        raise DstaError("selected summary rows carry no per-trial finals")
    v = wilcoxon_rank_sum(a["finals"], b["finals"], args.significance)
    print(f"{a['problem']}/{a['solver']} vs {b['problem']}/{b['solver']}: {format_verdict(v)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dsta", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bench", help="run a benchmark experiment")
    p.add_argument("--function", choices=BENCHMARK_NAMES, default="rosenbrock")
    p.add_argument("--dim", type=int, default=30)
    _solver_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("snl", help="solve an SNL instance file or the built-in illustrative instance")
    p.add_argument("--instance", type=Path, help="instance file (default: illustrative 8-sensor example)")
    _solver_flags(p)
    p.set_defaults(func=cmd_snl)

    p = sub.add_parser("gen", help="write a random SNL instance file")
    p.add_argument("--sensors", type=int, default=50)
    p.add_argument("--anchors", type=int, default=4)
    p.add_argument("--radio-range", type=float, default=0.3)
    p.add_argument("--noise", type=float, default=0.001)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("output", type=Path)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("param-study", help="grid over (p1, p2) against an STA baseline")
    p.add_argument("--function", choices=BENCHMARK_NAMES, default="rosenbrock")
    p.add_argument("--dim", type=int, default=30)
    p.add_argument("--significance", type=float, default=0.05)
    _solver_flags(p, solver=False)
    p.set_defaults(func=cmd_param_study)

    p = sub.add_parser("compare", help="Wilcoxon rank-sum test between two summary rows")
    p.add_argument("summary_a", type=Path)
    p.add_argument("summary_b", type=Path)
    p.add_argument("--row-a", type=int, default=0)
    p.add_argument("--row-b", type=int, default=0)
    p.add_argument("--significance", type=float, default=0.05)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (DstaError, OSError, ValueError, KeyError, IndexError) as exc:
        print(f"dsta: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
