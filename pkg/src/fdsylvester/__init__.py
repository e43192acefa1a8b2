"""Finite-difference schemes for 1-D transport recast as ``M1 U + U M2 + L(U) = M0``."""
from .analysis import error_bound, lax_bound, min_norm_pair, min_norm_split, normalize_lax, singular_values_paper
from .assembly import (
    FieldMatrix,
    FieldRole,
    SylvesterSystem,
    assemble_system,
    error_and_truncation,
    exact_matrix,
    march,
    reference_timestep,
    residual,
)
from .denselin import real_schur, solve_linear, svd
from .errors import (
    ConvergenceError,
    DegeneratePairError,
    DimensionError,
    FDSylvesterError,
    NonUniqueError,
    PreconditionError,
    SingularMatrixError,
    StartupError,
    ValidationError,
)
from .scheme import BoundaryData, Grid, SchemeCoefficients, SchemeId, SignalSpec, build_coefficients, sample_boundary
from .sylvester import (
    final_time_fast_path,
    invertibility_check_m1,
    kronecker_solve,
    nilpotency_order,
    solve_bartels_stewart,
    solve_system,
    uniqueness_check,
)

__version__ = "0.1.0"
