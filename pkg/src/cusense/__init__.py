"""Finite-window CUSUM spectrum sensing toolkit.

Sequential change detection for a two-hypothesis Gaussian signal model:
the recursive CUSUM statistic, closed-form finite-window false-alarm and
detection probabilities with a threshold solver, and a seeded Monte Carlo
harness that measures how close the closed forms come to the truth.
"""

__version__ = "0.1.0"

from .analytic import (
    NoBracketError,
    NonMonotoneWarning,
    NoSolutionError,
    RocCurve,
    RocPoint,
    RocQuery,
    RocSource,
    cdf_partial_sum,
    default_thresholds,
    f_z,
    p_detect_at,
    p_detect_total,
    p_false_at,
    p_false_total,
    roc_sweep,
    solve_threshold,
    zeta,
)
from .cusum import (
    CusumState,
    DetectionOutcome,
    OutcomeKind,
    classify,
    first_crossing,
    run,
    step,
    write_trace_csv,
)
from .montecarlo import (
    ComparisonReport,
    DelayStats,
    EmpiricalRoc,
    TrialOutcome,
    compare,
    delay_stats,
    empirical_roc,
    null_trials,
    run_trials,
    write_manifest,
)
from .rng import derive_seed, standard_normals
from .signal_model import (
    LlrParams,
    SampleSequence,
    ScenarioSpec,
    SensingCase,
    SignalModel,
    generate,
    llr,
    llr_params,
    post_change_variance,
    pre_change_variance,
)
from .specfun import GammaDomainError, chi_square_cdf, erf, ln_gamma, reg_lower_gamma

__all__ = [
    "CusumState",
    "ComparisonReport",
    "DelayStats",
    "DetectionOutcome",
    "EmpiricalRoc",
    "GammaDomainError",
    "LlrParams",
    "NoBracketError",
    "NonMonotoneWarning",
    "NoSolutionError",
    "OutcomeKind",
    "RocCurve",
    "RocPoint",
    "RocQuery",
    "RocSource",
    "SampleSequence",
    "ScenarioSpec",
    "SensingCase",
    "SignalModel",
    "TrialOutcome",
    "cdf_partial_sum",
    "chi_square_cdf",
    "classify",
    "compare",
    "default_thresholds",
    "delay_stats",
    "derive_seed",
    "empirical_roc",
    "erf",
    "f_z",
    "first_crossing",
    "generate",
    "ln_gamma",
    "llr",
    "llr_params",
    "null_trials",
    "p_detect_at",
    "p_detect_total",
    "p_false_at",
    "p_false_total",
    "post_change_variance",
    "pre_change_variance",
    "reg_lower_gamma",
    "roc_sweep",
    "run",
    "run_trials",
    "solve_threshold",
    "standard_normals",
    "step",
    "write_manifest",
    "write_trace_csv",
    "zeta",
]
