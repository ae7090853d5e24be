"""Explicit finite-difference lab for scalar reaction-diffusion equations.

Builds the approximate solution of u_t = D*u_xx + f(u) on a triangular
space-time grid, verifies the a-priori estimates the stable stencil
guarantees (sup bound, space Lipschitz, time Holder), and certifies the
weak-solution property through test-function pairings, an exact discrete
summation-by-parts identity, and refinement studies against independent
oracles.
"""

from .estimates import (
    EstimateReport,
    HolderConstants,
    gronwall_envelope,
    holder_constant,
    space_lipschitz_report,
    sup_bound_report,
    time_holder_report,
)
from .grid import (
    GridPoint,
    GridSpec,
    StabilityError,
    level_width,
    make_grid,
    required_depth,
)
from .harness import (
    EvalWindow,
    InstabilityResult,
    StudyResult,
    instability_demo,
    refine_study,
)
from .oracle import (
    OracleSolution,
    bump_integral,
    heat_exact_gaussian,
    heat_quadrature,
    linear_reaction_exact,
)
from .problems import builtin_problems, make_initial, make_problem
from .reactions import ReactionTerm, empirical_lipschitz, make_builtin
from .scheme import (
    Field,
    ProblemSpec,
    constant_field,
    discrete_residual_max,
    forward_diff_x,
    solve,
    step_level,
    write_field_csv,
)
from .testfn import BumpTestFunction, fd_consistency_report
from .weak import (
    CoverageError,
    MarginError,
    ResidualReport,
    SbpTerms,
    pair,
    sbp_identity_gap,
    sbp_terms,
    weak_residual,
)

__version__ = "0.1.0"
