"""State transition algorithm (STA) and its dynamic variant (DSTA)."""
from .core import (
    FactorSchedule,
    RandomStream,
    RunResult,
    SolverConfig,
    sample_initial,
    validate_config,
)
from .engines import AcceptancePolicy, operator_search, run_dsta, run_sta
from .operators import OperatorKind, axesion, expand, rotate, rotate_fast, translate
from .refine import RefineSettings, numeric_gradient, refine

__version__ = "0.1.0"
