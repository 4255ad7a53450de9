import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dsta.core import EvaluationError, RandomStream
from dsta.problems import BenchmarkSpec, generate_problem, illustrative_example
from dsta.refine import RefineSettings, numeric_gradient, refine


def sphere(x):
    return float(np.dot(x, x))


def sphere_grad(x):
    return 2 * np.asarray(x)


class TestNumericGradient:
    def test_sphere(self):
        g = numeric_gradient(sphere, np.array([1.0, 2.0]), h=1e-6)
        assert np.allclose(g, [2.0, 4.0], rtol=0, atol=1e-6)

    def test_constant(self):
        assert np.array_equal(numeric_gradient(lambda x: 3.0, np.ones(4)), np.zeros(4))

    def test_snl_truth(self):
        p, truth = illustrative_example()
        assert np.max(np.abs(numeric_gradient(p, truth))) <= 1e-6

    def test_relative_default_step(self):
        # at |x| = 1e6 an absolute 1e-6 step would be lost to rounding
        g = numeric_gradient(sphere, np.array([1e6, 0.0]))
        assert g[0] == pytest.approx(2e6, rel=1e-6)

    def test_non_finite_probe(self):
        with pytest.raises(EvaluationError):
            numeric_gradient(lambda x: 1.0 / x[0] if x[0] > 0 else float("nan"), np.array([0.0]))


class TestSettings:
    @pytest.mark.parametrize("kw", [dict(gradient_tolerance=0), dict(initial_step=-1),
                                    dict(backtrack_ratio=1.0), dict(sufficient_decrease=0.0),
                                    dict(max_steps=0)])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            RefineSettings(**kw)


class TestRefine:
    def test_sphere_converges(self):
        res = refine(sphere, sphere_grad, np.array([1.0, 1.0]), RefineSettings(max_steps=200))
        assert res.fitness <= 1e-16 and res.steps <= 200

    def test_stationary_start(self):
        x0 = np.zeros(3)
        res = refine(sphere, sphere_grad, x0)
        assert np.array_equal(res.x, x0) and res.steps == 0 and res.status == "converged"

    def test_numeric_fallback(self):
        res = refine(sphere, None, np.array([0.5, -2.0]), RefineSettings(max_steps=200))
        assert res.fitness <= 1e-16

    def test_rosenbrock_from_near(self):
        spec = BenchmarkSpec("rosenbrock", 10)
        x0 = np.ones(10) + RandomStream(0).uniform(-0.05, 0.05, 10)
        res = refine(spec, spec.gradient, x0)
        # steepest descent crawls along the curved valley; 1e-6 is what polishing needs
        assert res.fitness <= 1e-6 < spec(x0)

    def test_snl_polish(self):
        p, truth = generate_problem(20, 4, 0.4, 0.0, seed=1)
        x0 = truth + RandomStream(1).uniform(-1e-3, 1e-3, truth.size)
        res = refine(p, p.gradient, x0)
        assert res.fitness <= 1e-18

    def test_stall_flag(self):
        # |x| has no descent step near its kink once steps shrink below resolution
        res = refine(lambda x: float(np.abs(x).sum()), lambda x: np.sign(x) + (x == 0),
                     np.array([0.0, 0.0]))
        assert res.stalled and res.fitness == 0.0

    def test_max_steps(self):
        spec = BenchmarkSpec("rosenbrock", 4)
        res = refine(spec, spec.gradient, np.zeros(4), RefineSettings(max_steps=3))
        assert res.status == "max_steps" and res.steps == 3

    @given(st.integers(0, 2**32))
    @settings(max_examples=30, deadline=None)
    def test_descent(self, seed):
        spec = BenchmarkSpec("rosenbrock", 5)
        x0 = RandomStream(seed).uniform(-2, 2, 5)
        trace = []

        def tracked(x):
            v = spec(x)
            trace.append(v)
            return v

        res = refine(tracked, spec.gradient, x0, RefineSettings(max_steps=50))
        assert res.fitness <= spec(x0)
        assert res.fitness == spec(res.x)
