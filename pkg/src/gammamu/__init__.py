"""gamma-mu: numerical laboratory for generalized Hilbert matrices.

Builds the Hausdorff matrices K_mu and their column-shifted companions
Gamma_mu from finite positive Borel measures on (0,1), applies them to
Hardy-space functions, and verifies at desk scale the structure theorems,
the psi_p boundedness criterion, the exact p >= 2 operator norm, and the
compactness / complete-continuity trend probes.
"""

__version__ = "0.1.0"

from .errors import (
    CriterionViolated,
    EstimateUnconverged,
    EvaluationFailure,
    GammaMuError,
    GridTooCoarse,
    IndexOutOfRange,
    InvalidArguments,
    InvalidHint,
    InvalidParameter,
    IterationCapReached,
    NonConvergentIntegral,
    PreconditionError,
    ScheduleInvalid,
    StabilityCapExceeded,
    TruncationMismatch,
)
from .measure import (
    JacobiDensity,
    Measure,
    MomentSequence,
    forward_difference,
    integrate,
    integrate_columns,
    integrate_graded,
    log_binomial,
    measure_from_json,
    measure_to_json,
    moment,
    moment_hp,
    moments,
    parse_measure,
    restrict,
    total_mass,
)
from .matrices import (
    OperatorMatrix,
    StructureResult,
    composition_matrix,
    gamma_matrix,
    hankel_moment_test,
    hausdorff_matrix,
    hausdorff_matrix_via_differences,
    is_hankel,
    is_toeplitz,
)
from .hardy import (
    BoundaryFunction,
    BoundaryGrid,
    CoefficientVector,
    as_boundary_function,
    evaluate_on_grid,
    fa_coefficients,
    fa_function,
    fa_h2_norm_exact,
    fa_hp_norm_exact,
    fejer_riesz_check,
    grid_norm,
    growth_estimate_check,
    h1_kernel_norm,
    hardy_inequality_check,
    hp_norm,
    kernel_kw,
)
from .operators import (
    OperatorHandle,
    apply_gamma_adjoint_coefficients,
    apply_gamma_boundary,
    apply_gamma_coefficients,
    apply_t_boundary,
    gamma_of_one,
    gamma_of_one_value,
)
from .analysis import (
    Divergent,
    LambdaBoundResult,
    NormEstimate,
    ProbeReport,
    compactness_probe,
    complete_continuity_probe,
    finite_section_norm,
    lambda_lower_bound_check,
    lambda_values,
    largest_singular_value,
    norm_probe_fa,
    proof_lower_bounds,
    psi_integral,
    psi_weight,
    segment_integral_direct,
    t_norm_bound_check,
)
