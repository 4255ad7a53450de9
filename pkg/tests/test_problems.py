import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dsta.core import DimensionMismatch, MalformedParameters, RandomStream, SolverConfig
from dsta.engines import run_dsta
from dsta.problems import (
    BENCHMARK_NAMES,
    REFERENCE_LAYOUT,
    BenchmarkSpec,
    SnlProblem,
    eval_benchmark,
    generate_problem,
    illustrative_example,
    position_error,
    read_instance,
    snl_gradient,
    snl_objective,
    write_instance,
)
from dsta.refine import numeric_gradient, refine


class TestBenchmarks:
    @pytest.mark.parametrize("name", ["spherical", "rastrigin", "griewank"])
    def test_zero_at_origin(self, name):
        assert eval_benchmark(BenchmarkSpec(name, 7), np.zeros(7)) == 0.0

    def test_rosenbrock_at_ones(self):
        assert eval_benchmark(BenchmarkSpec("rosenbrock", 9), np.ones(9)) == 0.0

    def test_ackley_at_origin(self):
        value = eval_benchmark(BenchmarkSpec("ackley", 100), np.zeros(100))
        assert abs(value) <= 1e-12

    def test_hand_values(self):
        # sum of squares; one Rosenbrock term: 100 (x2 - x1^2)^2 + (x1 - 1)^2
        assert BenchmarkSpec("spherical", 2)([3.0, 4.0]) == 25.0
        assert BenchmarkSpec("rosenbrock", 2)([0.0, 0.0]) == 1.0
        assert BenchmarkSpec("rosenbrock", 3)([0.0, 1.0, 1.0]) == pytest.approx(100.0 + 1.0)
        assert BenchmarkSpec("rastrigin", 1)([1.0]) == pytest.approx(1.0)
        # griewank at pi*sqrt(1)... single coord: x^2/4000 - cos(x) + 1
        assert BenchmarkSpec("griewank", 1)([math.pi]) == pytest.approx(math.pi**2 / 4000 + 2)

    @pytest.mark.parametrize("name", BENCHMARK_NAMES)
    def test_batch_matches_single(self, name):
        spec = BenchmarkSpec(name, 6)
        X = RandomStream(1).uniform(-3, 3, (20, 6))
        assert np.allclose(spec.batch(X), [spec(x) for x in X], rtol=0, atol=0)

    @pytest.mark.parametrize("name", BENCHMARK_NAMES)
    @given(st.integers(0, 2**32))
    @settings(max_examples=30, deadline=None)
    def test_non_negative(self, name, seed):
        spec = BenchmarkSpec(name, 5)
        lo, hi = spec.domain
        X = RandomStream(seed).uniform(-hi, hi, (10, 5))
        assert np.all(spec.batch(X) >= -1e-12)
        assert abs(spec(spec.minimizer)) <= 1e-12

    def test_domains(self):
        got = {n: BenchmarkSpec(n, 1 if n != "rosenbrock" else 2).domain for n in BENCHMARK_NAMES}
        assert got == {"spherical": (0, 100), "rastrigin": (0, 5.12), "griewank": (0, 600),
                       "rosenbrock": (0, 30), "ackley": (0, 32)}

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            BenchmarkSpec("spherical", 3)(np.zeros(4))

    def test_rosenbrock_gradient(self):
        spec = BenchmarkSpec("rosenbrock", 8)
        x = RandomStream(4).uniform(-2, 2, 8)
        assert np.allclose(spec.gradient(x), numeric_gradient(spec, x), rtol=1e-6, atol=1e-5)


def one_sensor_one_anchor(anchor=(0.0, 0.0)):
    return SnlProblem(np.array([anchor]), 1, [], [(0, 0, 1.0)], radio_range=3.0)


class TestSnlObjective:
    def test_hand_case(self):
        p = one_sensor_one_anchor()
        assert snl_objective(p, [2.0, 0.0]) == 9.0
        assert np.array_equal(snl_gradient(p, [2.0, 0.0]), [24.0, 0.0])

    def test_exact_distance_is_zero(self):
        p = one_sensor_one_anchor(anchor=(1.0, 0.0))
        assert snl_objective(p, [2.0, 0.0]) == 0.0
        assert np.array_equal(snl_gradient(p, [2.0, 0.0]), [0.0, 0.0])

    def test_empty_edges(self):
        p = SnlProblem(np.zeros((1, 2)), 3, [], [], radio_range=1.0)
        assert p(RandomStream(0).random(6)) == 0.0

    def test_illustrative_truth(self):
        p, truth = illustrative_example()
        assert p(truth) <= 1e-12
        assert np.max(np.abs(p.gradient(truth))) <= 1e-12
        assert np.max(np.abs(truth.reshape(8, 2) - REFERENCE_LAYOUT)) <= 5e-5

    def test_rounded_reference_layout_is_near_zero(self):
        # 4-decimal rounding of the reference layout leaves ~1e-8 residual
        p, _ = illustrative_example()
        assert p(REFERENCE_LAYOUT.ravel()) < 1e-7

    def test_illustrative_structure(self):
        p, truth = illustrative_example()
        assert (p.sensor_count, p.anchor_count) == (8, 4)
        assert len(p.sensor_edges) + len(p.anchor_edges) == 20
        x1 = truth[:2]
        assert np.linalg.norm(x1 - p.anchors[0]) == pytest.approx(math.sqrt(15) / 8, abs=5e-5)
        assert np.linalg.norm(REFERENCE_LAYOUT[0]) == pytest.approx(math.sqrt(15) / 8, abs=1e-4)

    def test_mirror_solution_exists(self):
        # Reflecting sensors 1 and 2 across y = 0 preserves every measured distance.
        p, truth = illustrative_example()
        mirrored = truth.reshape(8, 2).copy()
        mirrored[:2, 1] *= -1
        assert p(mirrored.ravel()) <= 1e-12
        assert position_error(mirrored.ravel(), truth)[1] > 0.2

    def test_batch_shapes(self):
        p, truth = illustrative_example()
        X = np.stack([truth, truth + 0.1])
        values = p.batch(X)
        assert values.shape == (2,) and values[0] <= 1e-12 < values[1]

    def test_dimension_mismatch(self):
        p, _ = illustrative_example()
        with pytest.raises(DimensionMismatch):
            p(np.zeros(15))

    @given(st.integers(0, 2**32))
    @settings(max_examples=25, deadline=None)
    def test_gradient_matches_differences(self, seed):
        p, truth = illustrative_example()
        x = truth + RandomStream(seed).uniform(-0.5, 0.5, truth.size)
        g = p.gradient(x)
        num = numeric_gradient(p, x, h=1e-6)
        assert np.linalg.norm(g - num) <= 1e-6 * max(1.0, np.linalg.norm(g))

    @pytest.mark.parametrize("bad", [
        dict(sensor_edges=[(1, 0, 0.5)]),
        dict(sensor_edges=[(0, 1, 0.5), (0, 1, 0.4)]),
        dict(anchor_edges=[(0, 3, 0.5)]),
        dict(anchor_edges=[(0, 0, -1.0)]),
    ])
    def test_malformed(self, bad):
        kw = dict(anchors=np.zeros((1, 2)), sensor_count=2, sensor_edges=[], anchor_edges=[], radio_range=1.0)
        kw.update(bad)
        with pytest.raises(MalformedParameters):
            SnlProblem(**kw)


class TestGenerator:
    def test_noise_free_truth_is_exact(self):
        p, truth = generate_problem(30, 4, 0.3, 0.0, seed=2)
        assert p(truth) == pytest.approx(0.0, abs=1e-24)

    def test_complete_graph(self):
        p, _ = generate_problem(12, 3, math.sqrt(2) + 1e-9, 0.001, seed=1)
        assert len(p.sensor_edges) == 12 * 11 // 2
        assert len(p.anchor_edges) == 12 * 3

    def test_edges_are_pairs_within_range(self):
        p, truth = generate_problem(40, 4, 0.3, 0.0, seed=3)
        pts = truth.reshape(-1, 2)
        expected = {(i, j) for i in range(40) for j in range(i + 1, 40)
                    if np.linalg.norm(pts[i] - pts[j]) <= 0.3}
        assert {(i, j) for i, j, _ in p.sensor_edges} == expected

    def test_noise_is_relative(self):
        p, truth = generate_problem(60, 4, 0.3, 0.001, seed=4)
        pts = truth.reshape(-1, 2)
        ratios = [d / np.linalg.norm(pts[i] - pts[j]) - 1 for i, j, d in p.sensor_edges]
        assert 0.0005 < np.std(ratios) < 0.002

    def test_density(self):
        # expected neighbours ~ pi r^2 n before border effects; require >= 10 on average
        degrees = [generate_problem(250, 4, 0.3, 0.001, seed=s)[0].mean_degree() for s in range(50)]
        assert np.mean(degrees) >= 10

    def test_seeded(self):
        a, ta = generate_problem(20, 4, 0.3, 0.001, seed=9)
        b, tb = generate_problem(20, 4, 0.3, 0.001, seed=9)
        assert np.array_equal(ta, tb) and a.sensor_edges == b.sensor_edges

    @pytest.mark.parametrize("args", [(0, 4, 0.3, 0.0), (5, 0, 0.3, 0.0), (5, 4, 0.0, 0.0), (5, 4, 0.3, -1.0)])
    def test_malformed(self, args):
        with pytest.raises(MalformedParameters):
            generate_problem(*args, seed=0)


class TestInstanceFile:
    def test_round_trip(self, tmp_path):
        p, truth = generate_problem(25, 4, 0.4, 0.001, seed=5)
        write_instance(p, tmp_path / "a.snl", truth=truth)
        q, t2 = read_instance(tmp_path / "a.snl")
        assert np.array_equal(q.anchors, p.anchors)
        assert q.sensor_edges == p.sensor_edges and q.anchor_edges == p.anchor_edges
        assert (q.radio_range, q.noise_factor) == (p.radio_range, p.noise_factor)
        assert np.array_equal(t2, truth)
        x = RandomStream(0).random(p.size)
        assert q(x) == p(x)

    def test_without_truth(self, tmp_path):
        p, _ = illustrative_example()
        write_instance(p, tmp_path / "b.snl")
        q, truth = read_instance(tmp_path / "b.snl")
        assert truth is None and q.sensor_count == 8

    def test_header_and_comments(self, tmp_path):
        f = tmp_path / "c.snl"
        f.write_text("# tiny\nsnl 2 1 1 3.0 0.0\nanchor 0 0.0 0.0\nsa 0 0 1.0  # e\n")
        p, _ = read_instance(f)
        assert p([2.0, 0.0]) == 9.0

    @pytest.mark.parametrize("text", ["anchor 0 1 1\n", "snl 2 1 1 1 0\nbogus 1\n",
                                      "snl 2 1 2 1 0\nanchor 0 0 0\n"])
    def test_malformed(self, tmp_path, text):
        f = tmp_path / "d.snl"
        f.write_text(text)
        with pytest.raises(MalformedParameters):
            read_instance(f)


class TestPositionError:
    def test_equal(self):
        assert position_error([1.0, 2.0, 3.0, 4.0], [1.0, 2.0, 3.0, 4.0]) == (0.0, 0.0)

    def test_three_four_five(self):
        rmsd, mx = position_error([0.3, 0.4], [0.0, 0.0])
        assert rmsd == pytest.approx(0.5) and mx == pytest.approx(0.5)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            position_error([0.0, 0.0], [0.0, 0.0, 0.0, 0.0])


def reflections(layout):
    """Images of an illustrative layout with any sensor pair reflected across its anchor edge."""
    pts = np.asarray(layout).reshape(8, 2)
    flips = [(0, 1, 1, 0.0), (2, 3, 0, 1.0), (4, 5, 1, 1.0), (6, 7, 0, 0.0)]
    for mask in itertools.product((False, True), repeat=4):
        img = pts.copy()
        for on, (i, j, axis, line) in zip(mask, flips):
            if on:
                img[[i, j], axis] = 2 * line - img[[i, j], axis]
        yield img.ravel()


class TestIllustrativeRecovery:
    def test_reflections_are_global_minima(self):
        p, truth = illustrative_example()
        images = list(reflections(truth))
        assert len({tuple(np.round(m, 9)) for m in images}) == 16
        assert max(p(m) for m in images) <= 1e-12

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_dsta_refine_recovers_up_to_reflection(self, seed):
        p, truth = illustrative_example()
        cfg = SolverConfig.uniform(p.bounds, p1=0.9, p2=0.3, max_outer_iterations=1000)
        polished = refine(p, p.gradient, run_dsta(p, cfg, RandomStream(seed)).best_state)
        assert polished.fitness <= 1e-12
        assert min(position_error(polished.x, m)[1] for m in reflections(REFERENCE_LAYOUT)) <= 5e-4
