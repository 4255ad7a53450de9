"""Trial statistics and the Wilcoxon rank-sum comparison."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np


@dataclass(frozen=True)
class TrialStats:
    best: float
    mean: float
    std: float
    finals: tuple[float, ...]
    failed: tuple[int, ...] = field(default=())

    @classmethod
    def from_finals(cls, finals: Sequence[float], failed: Sequence[int] = ()) -> "TrialStats":
        """Summary over successful trials; ``std`` uses the n-1 denominator (0 for one trial)."""
        values = np.asarray(finals, dtype=float)
        if values.size == 0:
            nan = float("nan")
            return cls(nan, nan, nan, (), tuple(failed))
        std = float(values.std(ddof=1)) if values.size > 1 else 0.0
        return cls(float(values.min()), float(values.mean()), std,
                   tuple(float(v) for v in values), tuple(failed))


class Verdict(enum.Enum):
    BETTER = "+"
    WORSE = "-"
    SIMILAR = "≈"

    @property
    def mirrored(self) -> "Verdict":
        return {Verdict.BETTER: Verdict.WORSE, Verdict.WORSE: Verdict.BETTER}.get(self, self)


class ComparisonVerdict(NamedTuple):
    verdict: Verdict
    p_value: float

    def __str__(self):
        return self.verdict.value


def _midranks(values: np.ndarray) -> np.ndarray:
    """Average ranks (1-based), ties sharing the mean of their positions."""
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(len(values))
    sorted_vals = values[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _exact_p(doubled_ranks: np.ndarray, n1: int, w2: int) -> float:
    """P(|W - E W| >= |w - E W|) under random assignment of ranks to the first sample.

    Works on doubled ranks so every quantity is an integer. The null
    distribution of the rank sum is built by counting subsets of size n1 per
    attainable sum.
    """
    r = doubled_ranks.astype(int)
    N = len(r)
    total = int(r.sum())
    # counts[k, s]: number of k-subsets of the ranks seen so far with sum s
    counts = np.zeros((n1 + 1, total + 1))
    counts[0, 0] = 1.0
    for value in r:
        counts[1:, value:] = counts[1:, value:] + counts[:-1, :total + 1 - value]
    dist = counts[n1]
    mean2 = n1 * (N + 1)  # expected doubled rank sum
    sums = np.arange(total + 1)
    extreme = np.abs(sums - mean2) >= abs(w2 - mean2)
    return float(min(1.0, dist[extreme].sum() / dist.sum()))


def _normal_p(ranks: np.ndarray, n1: int, n2: int, w: float) -> float:
    N = n1 + n2
    _, tie_counts = np.unique(ranks, return_counts=True)
    tie_term = float(np.sum(tie_counts**3 - tie_counts)) / (N * (N - 1))
    var = n1 * n2 / 12.0 * ((N + 1) - tie_term)
    if var <= 0:
        return 1.0
    z = max(0.0, abs(w - n1 * (N + 1) / 2.0) - 0.5) / math.sqrt(var)
    return float(min(1.0, math.erfc(z / math.sqrt(2.0))))


EXACT_LIMIT = 30


def wilcoxon_rank_sum(a, b, significance: float = 0.05, method: str = "auto") -> ComparisonVerdict:
    """Two-sided Wilcoxon rank-sum comparison of ``a`` against ``b`` (minimization).

    ``BETTER`` means ``a`` tends to be smaller. With ``method="auto"`` the
    exact null distribution is used when ``len(a) + len(b) <= 30`` and the
    normal approximation (tie and continuity corrected) otherwise.
    Identical pooled values give ``SIMILAR`` with p = 1.
    """
    x = np.asarray(a, dtype=float)
    y = np.asarray(b, dtype=float)
    if x.size == 0 or y.size == 0:
        raise ValueError("both samples must be non-empty")
    if method not in ("auto", "exact", "normal"):
        raise ValueError(f"unknown method {method!r}")
    pooled = np.concatenate([x, y])
    if np.all(pooled == pooled[0]):
        return ComparisonVerdict(Verdict.SIMILAR, 1.0)
    n1, n2 = x.size, y.size
    ranks = _midranks(pooled)
    w = float(ranks[:n1].sum())
    exact = method == "exact" or (method == "auto" and n1 + n2 <= EXACT_LIMIT)
    if exact:
        p = _exact_p(2 * ranks, n1, int(round(2 * w)))
    else:
        p = _normal_p(ranks, n1, n2, w)
    if p >= significance:
        return ComparisonVerdict(Verdict.SIMILAR, p)
    diff = float(np.median(x) - np.median(y))
    if diff == 0.0:
        diff = float(ranks[:n1].mean() - ranks[n1:].mean())
    return ComparisonVerdict(Verdict.BETTER if diff < 0 else Verdict.WORSE, p)
