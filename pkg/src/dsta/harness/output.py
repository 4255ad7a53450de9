"""CSV emission for experiment records.

Layout of an output directory::

    summary.csv                  one row per experiment
    <label>/history_<trial>.csv  iteration, best_fitness, evaluations
    <label>/layout_<trial>.csv   SNL only: sensor, estimated and true coords, deviation

Floats are written with ``repr`` (shortest round-trip form) so identical
runs give byte-identical files.
"""
from __future__ import annotations

import csv
import io
import os
from pathlib import Path
from typing import Iterable

import numpy as np

from ..core import DstaError
from .stats import ComparisonVerdict, Verdict

SUMMARY_FIELDS = ["problem", "solver", "p1", "p2", "best", "mean", "std", "verdict",
                  "p_value", "trials", "failed", "finals"]


class OutputError(DstaError, OSError):
    pass


def _f(v) -> str:
    return "" if v is None else repr(float(v))


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    try:
        tmp.write_text(text, newline="")
        os.replace(tmp, path)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def summary_row(record) -> list[str]:
    exp, stats = record.experiment, record.stats
    dsta = exp.solver == "dsta"
    cfg = exp.config
    p1 = (cfg.p1 if cfg else 0.9) if dsta else None
    p2 = (cfg.p2 if cfg else 0.3) if dsta else None
    verdict = record.verdict
    return [
        exp.problem.label, exp.solver, _f(p1), _f(p2),
        _f(stats.best), _f(stats.mean), _f(stats.std),
        verdict.verdict.value if verdict else "",
        _f(verdict.p_value) if verdict else "",
        str(exp.trials),
        " ".join(str(t) for t in stats.failed),
        " ".join(repr(v) for v in stats.finals),
    ]


def _layout_rows(state, truth, d):
    est = np.asarray(state, dtype=float).reshape(-1, d)
    tru = None if truth is None else np.asarray(truth, dtype=float).reshape(-1, d)
    for i, row in enumerate(est):
        if tru is None:
            yield [str(i), *map(_f, row), *([""] * d), ""]
        else:
            yield [str(i), *map(_f, row), *map(_f, tru[i]), _f(np.linalg.norm(row - tru[i]))]


def emit_outputs(records: Iterable, destination) -> Path:
    """Write summary, history and layout CSVs for ``records`` under ``destination``."""
    dest = Path(destination)
    try:
        dest.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create {dest}: {exc}") from exc
    records = list(records)
    _atomic_write(dest / "summary.csv", _csv_text(SUMMARY_FIELDS, [summary_row(r) for r in records]))

    for record in records:
        sub = dest / record.experiment.label
        try:
            sub.mkdir(exist_ok=True)
        except OSError as exc:
            raise OutputError(f"cannot create {sub}: {exc}") from exc
        for o in record.outcomes:
            rows = [[str(h.iteration), _f(h.best_fitness), str(h.evaluations)] for h in o.history]
            _atomic_write(sub / f"history_{o.trial}.csv",
                          _csv_text(["iteration", "best_fitness", "evaluations"], rows))
            if record.experiment.problem.is_snl and o.state is not None:
                objective, _, _ = record.experiment.problem.build()
                d = objective.dimension
                axes = "xyz"[:d] if d <= 3 else [str(k) for k in range(d)]
                header = ["sensor", *[f"est_{a}" for a in axes], *[f"true_{a}" for a in axes], "deviation"]
                _atomic_write(sub / f"layout_{o.trial}.csv",
                              _csv_text(header, _layout_rows(o.state, record.truth, d)))
    return dest


def read_summary(path) -> list[dict]:
    """Rows of a summary.csv, with ``finals`` parsed into a list of floats."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise OutputError(f"cannot read {path}: {exc}") from exc
    for row in rows:
        row["finals"] = [float(v) for v in row.get("finals", "").split()]
    return rows


def format_verdict(v: ComparisonVerdict) -> str:
    names = {Verdict.BETTER: "better", Verdict.WORSE: "worse", Verdict.SIMILAR: "similar"}
    return f"{v.verdict.value} ({names[v.verdict]}), p = {v.p_value:.4g}"
