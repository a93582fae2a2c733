"""Overlapping two-subdomain alternating sweeps for the finite-difference
optimality system of distributed elliptic control, with convergence-rate
measurement, componentwise maximum-principle checks, and closed-form 1D
rates."""

from .analytic1d import (
    Analytic1DConfig,
    better_estimate_pairing,
    g,
    gamma_of_alpha,
    rate_vs_gamma_scan,
    rho_c,
    rho_c_gamma,
    rho_e,
    rho_e_beta,
)
from .fdm import StencilOperator, apply, apply_on_subdomain, interior_matrix
from .metrics import (
    ConvergenceRecord,
    Verdict,
    check_domination,
    check_lemma_inequality,
    check_max_principle,
    discrete_l2_merit,
    extract_rates,
    max_norm,
    merit_vector,
    split_merit,
)
from .model import (
    ALPHA_ELLIPTIC,
    ELLIPTIC,
    EXTEND_BOTH,
    HALF_OVERLAP,
    OCP,
    Decomposition,
    Grid,
    GridFunction,
    ProblemSpec,
    Subdomain,
    build_decomposition,
    build_grid,
    sample_function,
    standard_spec,
    strip_decomposition,
    whole_domain,
)
from .saddle import (
    CoupledSystem,
    build_coupled_system,
    recover_control,
    solve_coupled,
    solve_coupled_dense,
    solve_coupled_schur,
    solve_elliptic,
    solve_elliptic_dense,
)
from .schwarz import (
    IterateState,
    SweepHistory,
    exact_solution,
    half_step,
    run,
    run_domination_pair,
)

__version__ = "0.1.0"
