"""Sensor network localization as a nonconvex least-squares problem.

A layout of ``n`` sensors in ``d`` dimensions is flattened row-major by
sensor index: sensor ``i`` occupies ``x[i*d:(i+1)*d]``. Indices are 0-based
everywhere, including the instance file format.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..core import DimensionMismatch, MalformedParameters, RandomStream


@dataclass(frozen=True, eq=False)
class SnlProblem:
    """Anchors, measured distances and the derived least-squares objective.

    ``sensor_edges`` holds ``(i, j, d_ij)`` with ``i < j``; ``anchor_edges``
    holds ``(i, k, e_ik)`` for sensor ``i`` and anchor ``k``.
    """

    anchors: np.ndarray
    sensor_count: int
    sensor_edges: list
    anchor_edges: list
    radio_range: float
    noise_factor: float = 0.0
    _idx: dict = field(init=False, repr=False)

    def __post_init__(self):
        anchors = np.atleast_2d(np.asarray(self.anchors, dtype=float))
        object.__setattr__(self, "anchors", anchors)
        n, m = self.sensor_count, anchors.shape[0]
        if n < 1:
            raise MalformedParameters("need at least one sensor")
        if not (self.radio_range > 0):
            raise MalformedParameters("radio range must be positive")
        if self.noise_factor < 0:
            raise MalformedParameters("noise factor must be non-negative")
        seen = set()
        for i, j, dist in self.sensor_edges:
            if not (0 <= i < j < n):
                raise MalformedParameters(f"bad sensor edge ({i}, {j})")
            if ("ss", i, j) in seen:
                raise MalformedParameters(f"duplicate sensor edge ({i}, {j})")
            seen.add(("ss", i, j))
            if not dist > 0:
                raise MalformedParameters(f"non-positive distance on edge ({i}, {j})")
        for i, k, dist in self.anchor_edges:
            if not (0 <= i < n and 0 <= k < m):
                raise MalformedParameters(f"bad anchor edge ({i}, {k})")
            if ("sa", i, k) in seen:
                raise MalformedParameters(f"duplicate anchor edge ({i}, {k})")
            seen.add(("sa", i, k))
            if not dist > 0:
                raise MalformedParameters(f"non-positive distance on anchor edge ({i}, {k})")

        ss = np.array([e[:2] for e in self.sensor_edges], dtype=int).reshape(-1, 2)
        sa = np.array([e[:2] for e in self.anchor_edges], dtype=int).reshape(-1, 2)
        idx = {
            "ss_i": ss[:, 0], "ss_j": ss[:, 1],
            "ss_d2": np.array([e[2] for e in self.sensor_edges], dtype=float) ** 2,
            "sa_i": sa[:, 0], "sa_k": sa[:, 1],
            "sa_e2": np.array([e[2] for e in self.anchor_edges], dtype=float) ** 2,
        }
        object.__setattr__(self, "_idx", idx)

    @property
    def dimension(self) -> int:
        """Spatial dimension ``d`` of sensors and anchors."""
        return self.anchors.shape[1]

    @property
    def anchor_count(self) -> int:
        return self.anchors.shape[0]

    @property
    def size(self) -> int:
        """Length of the flattened decision vector, ``n * d``."""
        return self.sensor_count * self.dimension

    @property
    def bounds(self) -> list[tuple[float, float]]:
        """Initialization box: the bounding box of the anchors, per coordinate."""
        low, high = self.anchors.min(axis=0), self.anchors.max(axis=0)
        span = np.where(high > low, 0.0, 1.0)
        return [(float(lo), float(hi + s)) for lo, hi, s in zip(low, high, span)] * self.sensor_count

    def _positions(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.size:
            raise DimensionMismatch(f"layout needs {self.size} values, got {x.shape[-1]}")
        return x.reshape(x.shape[:-1] + (self.sensor_count, self.dimension))

    def batch(self, X) -> np.ndarray:
        P = self._positions(X)
        ix = self._idx
        diff = P[..., ix["ss_i"], :] - P[..., ix["ss_j"], :]
        r_ss = np.sum(diff**2, axis=-1) - ix["ss_d2"]
        diff = P[..., ix["sa_i"], :] - self.anchors[ix["sa_k"]]
        r_sa = np.sum(diff**2, axis=-1) - ix["sa_e2"]
        return np.sum(r_ss**2, axis=-1) + np.sum(r_sa**2, axis=-1)

    def __call__(self, x) -> float:
        return float(self.batch(x))

    def gradient(self, x) -> np.ndarray:
        P = self._positions(x)
        if P.ndim != 2:
            raise DimensionMismatch("gradient takes a single layout")
        ix = self._idx
        G = np.zeros_like(P)
        diff = P[ix["ss_i"]] - P[ix["ss_j"]]
        w = 4.0 * (np.sum(diff**2, axis=1) - ix["ss_d2"])
        np.add.at(G, ix["ss_i"], w[:, None] * diff)
        np.add.at(G, ix["ss_j"], -w[:, None] * diff)
        diff = P[ix["sa_i"]] - self.anchors[ix["sa_k"]]
        w = 4.0 * (np.sum(diff**2, axis=1) - ix["sa_e2"])
        np.add.at(G, ix["sa_i"], w[:, None] * diff)
        return G.ravel()

    def mean_degree(self) -> float:
        """Average number of measured neighbours (sensors and anchors) per sensor."""
        deg = np.zeros(self.sensor_count)
        np.add.at(deg, self._idx["ss_i"], 1)
        np.add.at(deg, self._idx["ss_j"], 1)
        np.add.at(deg, self._idx["sa_i"], 1)
        return float(deg.mean())


def snl_objective(p: SnlProblem, layout) -> float:
    return p(layout)


def snl_gradient(p: SnlProblem, layout) -> np.ndarray:
    return p.gradient(layout)


def generate_problem(n: int, m: int, radio_range: float, noise_factor: float, seed: int):
    """Random planar instance in the unit square.

    Sensors and anchors are placed uniformly. Every pair closer than the radio
    range is measured, with recorded distance ``true * (1 + noise_factor * g)``
    and ``g`` standard Gaussian (redrawn while the result is not positive).

    Returns
    -------
    (SnlProblem, np.ndarray)
        The instance and the flattened ground-truth layout.
    """
    if n < 1 or m < 1:
        raise MalformedParameters("need n >= 1 sensors and m >= 1 anchors")
    if not radio_range > 0 or noise_factor < 0:
        raise MalformedParameters("radio range must be positive and noise non-negative")
    rng = RandomStream(seed)
    sensors = rng.random((n, 2))
    anchors = rng.random((m, 2))

    def noisy(true):
        while True:
            value = true * (1.0 + noise_factor * rng.normal()) if noise_factor else true
            if value > 0:
                return float(value)

    sensor_edges, anchor_edges = [], []
    for i in range(n):
        for j in range(i + 1, n):
            dist = float(np.linalg.norm(sensors[i] - sensors[j]))
            if 0 < dist <= radio_range:
                sensor_edges.append((i, j, noisy(dist)))
    for i in range(n):
        for k in range(m):
            dist = float(np.linalg.norm(sensors[i] - anchors[k]))
            if 0 < dist <= radio_range:
                anchor_edges.append((i, k, noisy(dist)))
    problem = SnlProblem(anchors, n, sensor_edges, anchor_edges, radio_range, noise_factor)
    return problem, sensors.ravel()


# The 8-sensor / 4-anchor example. Sensors sit at (15/32, sqrt(15)/32) and
# its images under the square's symmetries; REFERENCE_LAYOUT is the
# 4-decimal rounding.
_S = math.sqrt(15) / 32
_LO, _HI = 15 / 32, 17 / 32
_TRUE_LAYOUT = np.array([
    (_LO, _S), (_HI, -_S), (1 - _S, _LO), (1 + _S, _HI),
    (_HI, 1 + _S), (_LO, 1 - _S), (-_S, _HI), (_S, _LO),
])

REFERENCE_LAYOUT = np.array([
    (0.4688, 0.1210), (0.5313, -0.1210), (0.8790, 0.4688), (1.1210, 0.5313),
    (0.5313, 1.1210), (0.4688, 0.8790), (-0.1210, 0.5313), (0.1210, 0.4688),
])


def illustrative_example():
    """The 8-sensor, 4-anchor instance with its exact solution (flattened)."""
    anchors = np.array([(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)])
    short, long_ = math.sqrt(15) / 8, math.sqrt(19) / 8
    sensor_edges = [(0, 1, 0.25), (2, 3, 0.25), (4, 5, 0.25), (6, 7, 0.25)]
    # (sensor, anchor, distance), 1-based in the usual listing
    listing = [
        (1, 1, short), (1, 3, long_), (2, 1, long_), (2, 3, short),
        (3, 3, short), (3, 4, long_), (4, 3, long_), (4, 4, short),
        (5, 2, long_), (5, 4, short), (6, 2, short), (6, 4, long_),
        (7, 1, long_), (7, 2, short), (8, 1, short), (8, 2, long_),
    ]
    anchor_edges = [(i - 1, k - 1, e) for i, k, e in listing]
    problem = SnlProblem(anchors, 8, sensor_edges, anchor_edges, radio_range=0.6)
    return problem, _TRUE_LAYOUT.ravel().copy()


def position_error(estimate, truth, dimension: int = 2) -> tuple[float, float]:
    """RMS and maximum per-sensor Euclidean deviation between two layouts."""
    est = np.asarray(estimate, dtype=float)
    tru = np.asarray(truth, dtype=float)
    if est.shape != tru.shape or est.size % dimension:
        raise DimensionMismatch(f"layouts of shape {est.shape} and {tru.shape} do not match")
    dev = np.linalg.norm((est - tru).reshape(-1, dimension), axis=1)
    return float(np.sqrt(np.mean(dev**2))), float(dev.max())


# Instance file format -------------------------------------------------------

def _fmt(v: float) -> str:
    return repr(float(v))


def write_instance(problem: SnlProblem, path, truth=None) -> None:
    d = problem.dimension
    lines = [f"snl {d} {problem.sensor_count} {problem.anchor_count} "
             f"{_fmt(problem.radio_range)} {_fmt(problem.noise_factor)}"]
    for k, a in enumerate(problem.anchors):
        lines.append(f"anchor {k} " + " ".join(_fmt(c) for c in a))
    lines += [f"ss {i} {j} {_fmt(dist)}" for i, j, dist in problem.sensor_edges]
    lines += [f"sa {i} {k} {_fmt(dist)}" for i, k, dist in problem.anchor_edges]
    if truth is not None:
        T = np.asarray(truth, dtype=float).reshape(problem.sensor_count, d)
        lines += [f"truth {i} " + " ".join(_fmt(c) for c in row) for i, row in enumerate(T)]
    Path(path).write_text("\n".join(lines) + "\n")


def read_instance(path):
    """Parse an instance file. Returns ``(problem, truth)``; truth is ``None`` when absent."""
    header = None
    anchors, ss, sa, truth = {}, [], [], {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if tok[0] == "snl":
                header = (int(tok[1]), int(tok[2]), int(tok[3]), float(tok[4]), float(tok[5]))
            elif tok[0] == "anchor":
                anchors[int(tok[1])] = [float(t) for t in tok[2:]]
            elif tok[0] == "ss":
                ss.append((int(tok[1]), int(tok[2]), float(tok[3])))
            elif tok[0] == "sa":
                sa.append((int(tok[1]), int(tok[2]), float(tok[3])))
            elif tok[0] == "truth":
                truth[int(tok[1])] = [float(t) for t in tok[2:]]
            else:
                raise MalformedParameters(f"unknown record {tok[0]!r}")
        except (IndexError, ValueError) as exc:
            raise MalformedParameters(f"{path}:{lineno}: {exc}") from exc
    if header is None:
        raise MalformedParameters(f"{path}: missing 'snl' header")
    d, n, m, r_d, noise = header
    if sorted(anchors) != list(range(m)) or any(len(a) != d for a in anchors.values()):
        raise MalformedParameters(f"{path}: expected {m} anchors of dimension {d}")
    problem = SnlProblem(np.array([anchors[k] for k in range(m)]), n, ss, sa, r_d, noise)
    layout = None
    if truth:
        if sorted(truth) != list(range(n)) or any(len(t) != d for t in truth.values()):
            raise MalformedParameters(f"{path}: truth lines must cover all {n} sensors")
        layout = np.array([truth[i] for i in range(n)]).ravel()
    return problem, layout
