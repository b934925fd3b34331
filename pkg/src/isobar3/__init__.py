"""Desk-scale numerics for the isobaric partial-sum error term.

Exact Fourier coefficients and their Dirichlet-convolution sums, the
degree-3 functional equation, exact exponent-pair calculus with the
resulting error-exponent budget, and oscillatory probes of the
stationary-phase and bilinear-sum steps.
"""

from .coeff_engine import (
    DELTA,
    LambdaTable,
    TauTable,
    build_tau_table,
    exact_bound_suite,
    hecke_selfcheck,
    naive_tau_table,
    normalize,
)
from .errors import IsobarError
from .exponent_calculus import (
    BOURGAIN,
    TRIVIAL,
    ExponentPair,
    a_process,
    b_process,
    objective_theta,
    search_pairs,
    verify_budget,
)
from .isobaric_sums import (
    IsobaricTable,
    build_isobaric,
    fit_error_exponent,
    partial_sums,
    short_interval_scan,
)
from .kernels import BACKEND
from .l_eval import (
    check_functional_equation,
    completed_l_phi,
    gamma_product,
    gamma_ratio,
    l1_phi,
)
from .oscillatory_lab import (
    exp_sum_probe,
    make_window,
    mellin,
    mellin_decay_check,
    stationary_phase_check,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BOURGAIN",
    "DELTA",
    "ExponentPair",
    "IsobarError",
    "IsobaricTable",
    "LambdaTable",
    "TRIVIAL",
    "TauTable",
    "a_process",
    "b_process",
    "build_isobaric",
    "build_tau_table",
    "check_functional_equation",
    "completed_l_phi",
    "exact_bound_suite",
    "exp_sum_probe",
    "fit_error_exponent",
    "gamma_product",
    "gamma_ratio",
    "hecke_selfcheck",
    "l1_phi",
    "make_window",
    "mellin",
    "mellin_decay_check",
    "naive_tau_table",
    "normalize",
    "objective_theta",
    "partial_sums",
    "search_pairs",
    "short_interval_scan",
    "stationary_phase_check",
    "verify_budget",
    "__version__",
]
