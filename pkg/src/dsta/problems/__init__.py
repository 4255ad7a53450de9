from .benchmarks import BENCHMARK_NAMES, BenchmarkSpec, eval_benchmark
from .snl import (
    REFERENCE_LAYOUT,
    SnlProblem,
    generate_problem,
    illustrative_example,
    position_error,
    read_instance,
    snl_gradient,
    snl_objective,
    write_instance,
)

__all__ = [
    "BENCHMARK_NAMES", "BenchmarkSpec", "eval_benchmark",
    "REFERENCE_LAYOUT", "SnlProblem", "generate_problem", "illustrative_example",
    "position_error", "read_instance", "snl_gradient", "snl_objective", "write_instance",
]
