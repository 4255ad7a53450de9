import os

import numpy as np
import pytest


class ScriptedStream:
    """Stand-in for RandomStream that replays fixed draws, for hand-checked operator cases."""

    def __init__(self, uniform=(), random=(), normal=(), integers=()):
        self._queues = {
            "uniform": list(uniform), "random": list(random),
            "normal": list(normal), "integers": list(integers),
        }

    def _next(self, kind, size):
        value = np.asarray(self._queues[kind].pop(0), dtype=float if kind != "integers" else int)
        if size is None:
            return value.item() if value.ndim == 0 else value
        return np.broadcast_to(value, size if isinstance(size, tuple) else (size,)).copy()

    def uniform(self, low=-1.0, high=1.0, size=None):
        return self._next("uniform", size)

    def random(self, size=None):
        return self._next("random", size)

    def normal(self, size=None):
        return self._next("normal", size)

    def integers(self, high, size=None):
        return self._next("integers", size)

    def bernoulli(self, p):
        return bool(self.random() < p)


@pytest.fixture
def scripted():
    return ScriptedStream


def pytest_collection_modifyitems(config, items):
    if os.environ.get("DSTA_SLOW"):
        return
    skip = pytest.mark.skip(reason="full-scale run; set DSTA_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)
