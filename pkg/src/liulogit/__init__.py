"""Shrinkage and stochastically restricted estimation for multicollinear
binary logistic regression, with exact MSE-matrix comparisons and a
reproducible Monte Carlo benchmarking harness."""

__version__ = "0.1.0"

from .comparison import (
    ComparisonVerdict,
    Superiority,
    aulle_vs_sraulle_gap,
    compare,
    is_positive_definite,
    lemma2_check,
)
from .dataio import load_csv, load_restrictions
from .diagnostics import DiagnosticsReport, condition_number, diagnostics
from .estimators import (
    AlmostUnbiasedLogisticLiu,
    LogisticLiu,
    LogisticMLE,
    StochasticRestrictedAlmostUnbiasedLiu,
    StochasticRestrictedLogistic,
)
from .exceptions import NumericalError, SeparationError
from .model import Dataset, MleFit, fit_mle, predict_probabilities
from .shrinkage import (
    ESTIMATOR_NAMES,
    EstimatorReport,
    SmseGrid,
    StochasticRestriction,
    almost_unbiased_filter,
    aulle_report,
    check_liu_d,
    liu_filter,
    lle_report,
    mle_report,
    smse_over_grid,
    sraulle_report,
    srmle_report,
)
from .simulation import (
    SimulationCell,
    SimulationConfig,
    SimulationResult,
    canonical_beta,
    default_restriction,
    emit_table,
    generate_design,
    run_monte_carlo,
    simulate_replication,
)

__all__ = [
    "AlmostUnbiasedLogisticLiu",
    "ComparisonVerdict",
    "Dataset",
    "DiagnosticsReport",
    "ESTIMATOR_NAMES",
    "EstimatorReport",
    "LogisticLiu",
    "LogisticMLE",
    "MleFit",
    "NumericalError",
    "SeparationError",
    "SimulationCell",
    "SimulationConfig",
    "SimulationResult",
    "SmseGrid",
    "StochasticRestrictedAlmostUnbiasedLiu",
    "StochasticRestrictedLogistic",
    "StochasticRestriction",
    "Superiority",
    "almost_unbiased_filter",
    "aulle_report",
    "aulle_vs_sraulle_gap",
    "canonical_beta",
    "check_liu_d",
    "compare",
    "condition_number",
    "default_restriction",
    "diagnostics",
    "emit_table",
    "fit_mle",
    "generate_design",
    "is_positive_definite",
    "lemma2_check",
    "liu_filter",
    "lle_report",
    "load_csv",
    "load_restrictions",
    "mle_report",
    "predict_probabilities",
    "run_monte_carlo",
    "simulate_replication",
    "smse_over_grid",
    "sraulle_report",
    "srmle_report",
]
