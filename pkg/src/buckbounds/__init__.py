"""Clamped buckling spectra of arbitrary order and universal gap bounds."""

from .bounds import (
    BoundReport,
    DeltaSequence,
    Spectrum,
    chain_bounds,
    delta_objective,
    euclidean_coefficient,
    eval_cor11,
    eval_eq112,
    eval_l2_priors,
    eval_thm11,
    eval_thm12,
    format_spectrum_csv,
    next_bound_cor11,
    next_bound_sharp,
    next_bound_sphere,
    optimize_delta,
    parse_spectrum,
    read_spectrum,
    thm11_optimal_delta,
)
from .eigen import EigenSolution, cholesky_spd, solve_buckling, solve_generalized
from .errors import (
    BracketError,
    BuckBoundsError,
    ConvergenceError,
    DomainViolationError,
    InfeasibleSpectrumError,
    InternalConsistencyError,
    InvalidParameterError,
    NotPositiveDefiniteError,
    NumericalError,
    SpectrumFormatError,
)
from .galerkin import (
    Basis1D,
    Domain,
    OperatorForms,
    assemble_forms,
    build_basis_1d,
    derivative_integral_table,
    export_forms,
    load_forms,
)
from .polyrec import (
    ACoefficients,
    Polynomial,
    extract_a_coefficients,
    fg_polynomials,
    h_term,
    phi_polynomial,
    s_term,
)
from .verify import (
    ConvergenceTable,
    LemmaRow,
    TheoremCheck,
    VerificationReport,
    check_lemma21,
    check_theorem11,
    convergence_study,
    rayleigh_quantities,
    run_verification,
)

__version__ = "0.1.0"
