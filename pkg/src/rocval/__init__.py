"""Model-based ROC validation of binary-outcome risk prediction models."""

from .caltest import (
    CalibrationTestResult,
    NullDistribution,
    area_between_step_curves,
    chi_square_cdf,
    fill_unified_stats,
    mc_p_value,
    mean_calibration_stat,
    roc_equality_stat,
    simulate_null,
    unified_test,
)
from .core import RngStream, ValidationSample, bernoulli_draw, make_sample, validate_risks
from .errors import (
    AllOneRisksError,
    AllZeroRisksError,
    ConfigError,
    CsvParseError,
    DegenerateSampleError,
    DomainError,
    EmptySampleError,
    InfiniteLogitError,
    InvalidScenarioError,
    InvalidSimsError,
    LengthMismatchError,
    MissingColumnError,
    NonBinaryOutcomeError,
    NonConvergenceError,
    NumericError,
    OutOfRangeRiskError,
    SeparationDetectedError,
    ValidationError,
)
from .report import ValidationReport, build_report, calibration_bins, residual_t_test
from .roc import (
    CurveKind,
    RocCurve,
    WeightedCdfPair,
    auc_concordance,
    curve_from_cdfs,
    empirical_cdfs,
    empirical_roc,
    model_based_cdfs,
    model_roc,
)
from .simstudy import (
    LogisticFit,
    PowerRow,
    PowerTable,
    Scenario,
    ScenarioFamily,
    case_mix_preset,
    fit_logistic_2param,
    generate_dataset,
    generate_with_truth,
    lrt_calibration,
    make_scenario,
    run_power_study,
)

__version__ = "0.1.0"

__all__ = [
    "AllOneRisksError",
    "AllZeroRisksError",
    "CalibrationTestResult",
    "ConfigError",
    "CsvParseError",
    "CurveKind",
    "DegenerateSampleError",
    "DomainError",
    "EmptySampleError",
    "InfiniteLogitError",
    "InvalidScenarioError",
    "InvalidSimsError",
    "LengthMismatchError",
    "LogisticFit",
    "MissingColumnError",
    "NonBinaryOutcomeError",
    "NonConvergenceError",
    "NullDistribution",
    "NumericError",
    "OutOfRangeRiskError",
    "PowerRow",
    "PowerTable",
    "RngStream",
    "RocCurve",
    "Scenario",
    "ScenarioFamily",
    "SeparationDetectedError",
    "ValidationError",
    "ValidationReport",
    "ValidationSample",
    "WeightedCdfPair",
    "area_between_step_curves",
    "auc_concordance",
    "bernoulli_draw",
    "build_report",
    "calibration_bins",
    "case_mix_preset",
    "chi_square_cdf",
    "curve_from_cdfs",
    "empirical_cdfs",
    "empirical_roc",
    "fill_unified_stats",
    "fit_logistic_2param",
    "generate_dataset",
    "generate_with_truth",
    "lrt_calibration",
    "make_sample",
    "make_scenario",
    "mc_p_value",
    "mean_calibration_stat",
    "model_based_cdfs",
    "model_roc",
    "residual_t_test",
    "roc_equality_stat",
    "run_power_study",
    "simulate_null",
    "unified_test",
    "validate_risks",
]
