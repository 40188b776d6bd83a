"""Orthogonal polynomials on analytic Jordan curves.

Computes monic orthogonal polynomials over analytic Jordan curves with
positive analytic weights through recursive integral-transform expansions,
checks them against an independent Gram-matrix oracle, and validates the
strong asymptotics (exterior Szego form, interior integral representation,
algebraic-singularity fine terms, zero distribution).
"""

from .curves import (
    Contour,
    CurveSpec,
    InteriorMap,
    circle_curve,
    estimate_rho_hat,
    fit_interior_map,
    joukowski_curve,
    kernel_W,
    level_contour,
)
from .errors import (
    BranchTrackingError,
    ConditioningError,
    ConfigError,
    ContractionError,
    CurveOrthoError,
    CutProximityError,
    DomainError,
    FitError,
    IterationError,
    NumericalError,
    ResolutionError,
)
from .oracle import PolyCoeffs, inner_product, monic_orthogonal, orthonormal_eval
from .szego import (
    GenericWeight,
    SingularWeight,
    SzegoPack,
    build_szego_pack,
    build_szego_pack_generic,
    build_szego_pack_singular,
    continue_delta_i_inverse,
    disk_szego_exterior,
    disk_szego_interior,
    h_eval,
    weight_from_dict,
)
from .transforms import (
    ExpansionConfig,
    ExpansionResult,
    TransformState,
    check_contraction,
    compute_bounds,
    expand_thm1,
    expand_thm2,
)
from .asymptotics import (
    SingularityData,
    alpha_constants,
    binom_general,
    gamma_asymptotic,
    interior_integral_rep,
    proposition_I,
    szego_exterior_formula,
    thm3_at_singularity,
    thm3_interior,
)
from .zeros import (
    ZeroSet,
    discrete_potential_mismatch,
    equilibrium_compare,
    limit_angle_probe,
    roots,
    zero_free_region_check,
)

__version__ = "0.1.0"
