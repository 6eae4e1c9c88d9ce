"""Chernoff approximations to the 1-D heat equation and their convergence rates."""
from .analysis import (
    ErrorCurve,
    Grid,
    RegressionFit,
    error_curve,
    holder_meta_regression,
    ols_fit,
    run_experiment,
    sup_error,
)
from .chernoff import (
    PointMassState,
    ShiftChernoffOperator,
    apply_once,
    builtin_operators,
    check_tangency,
    compose,
    evaluate_approximation,
    evaluate_naive,
    tangency_residual,
)
from .config import ExperimentConfig
from .functions import (
    ReferenceSolution,
    ScalarFunction,
    catalog,
    closed_form_exp_abs,
    exact_solution,
    get_condition,
    heat_kernel,
)

__version__ = "0.1.0"
