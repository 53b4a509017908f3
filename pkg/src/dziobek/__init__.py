"""Solver and certifier for Dziobek central configurations.

n bodies whose configuration spans exactly n - 2 dimensions, under the
homogeneous potential family indexed by the exponent a (Newtonian gravity
at a = -3/2, planar point vortices at a = -1).  The solver enumerates real
solution classes for given masses by multistart damped Newton; the
certifier checks candidates against the algebraic structure: the pairwise
multiplier relations, the rank-1 factorization m_i m_j s_ij =
kappa delta_i delta_j, and the Veronese quadrics.
"""

__version__ = "0.1.0"

from .algebra import (
    CountBound,
    bound,
    complete_diagonal,
    configuration_matrix,
    degeneracy_index,
    dziobek_relation_residual,
    kernel_by_factorization,
    kernel_by_minors,
    rank1_fit,
    shape_from_distances,
    veronese_map,
    veronese_residuals,
)
from .certify import CertifyTolerances, certified_classes, certify, certify_shape
from .experiment import SweepReport, generic_sweep, known_solutions, sample_masses
from .geometry import (
    RealizationResult,
    affine_dimension,
    cayley_menger_det,
    distance_matrix,
    distances_from_shape,
    gauge_normalize,
    realize_from_distances,
)
from .kernels import backend_name
from .model import (
    A_NEWTON,
    A_VORTEX,
    CCClass,
    Certificate,
    CoincidentBodies,
    CollapseDetected,
    Configuration,
    DegenerateDelta,
    DistanceMatrix,
    DziobekError,
    DziobekVector,
    MassVector,
    NoConvergence,
    NonPositiveMass,
    NonPositiveShape,
    NotEmbeddable,
    OracleRootNotFound,
    PotentialParam,
    RankDeficient,
    ShapeMatrix,
    UnsupportedCase,
    WrongDimension,
    ZeroTotalMass,
    ZeroVector,
    eval_potential,
    validate_masses,
)
from .solver import (
    CandidateSolution,
    SolveOptions,
    canonical_key,
    cc_jacobian,
    cc_residual,
    dedup_classes,
    euler_collinear_configurations,
    euler_collinear_oracle,
    isolation_check,
    multistart_solve,
    newton_solve,
)

__all__ = [
    "__version__",
    "A_NEWTON",
    "A_VORTEX",
    "CCClass",
    "CandidateSolution",
    "Certificate",
    "CertifyTolerances",
    "CoincidentBodies",
    "CollapseDetected",
    "Configuration",
    "CountBound",
    "DegenerateDelta",
    "DistanceMatrix",
    "DziobekError",
    "DziobekVector",
    "MassVector",
    "NoConvergence",
    "NonPositiveMass",
    "NonPositiveShape",
    "NotEmbeddable",
    "OracleRootNotFound",
    "PotentialParam",
    "RankDeficient",
    "RealizationResult",
    "ShapeMatrix",
    "SolveOptions",
    "SweepReport",
    "UnsupportedCase",
    "WrongDimension",
    "ZeroTotalMass",
    "ZeroVector",
    "affine_dimension",
    "backend_name",
    "bound",
    "canonical_key",
    "cayley_menger_det",
    "cc_jacobian",
    "cc_residual",
    "certified_classes",
    "certify",
    "certify_shape",
    "complete_diagonal",
    "configuration_matrix",
    "dedup_classes",
    "degeneracy_index",
    "distance_matrix",
    "distances_from_shape",
    "dziobek_relation_residual",
    "euler_collinear_configurations",
    "euler_collinear_oracle",
    "eval_potential",
    "gauge_normalize",
    "generic_sweep",
    "isolation_check",
    "kernel_by_factorization",
    "kernel_by_minors",
    "known_solutions",
    "multistart_solve",
    "newton_solve",
    "rank1_fit",
    "realize_from_distances",
    "sample_masses",
    "shape_from_distances",
    "validate_masses",
    "veronese_map",
    "veronese_residuals",
]
