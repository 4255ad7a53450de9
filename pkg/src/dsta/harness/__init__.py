from .experiment import ExperimentConfig, ExperimentRecord, ProblemSelector, TrialOutcome, run_trials
from .output import emit_outputs, read_summary
from .stats import ComparisonVerdict, TrialStats, Verdict, wilcoxon_rank_sum

__all__ = [
    "ExperimentConfig", "ExperimentRecord", "ProblemSelector", "TrialOutcome", "run_trials",
    "emit_outputs", "read_summary",
    "ComparisonVerdict", "TrialStats", "Verdict", "wilcoxon_rank_sum",
]
