"""Subgaussian sketching toolkit.

Construct seeded subgaussian sketches, measure their distortion on structured
sets, size the target dimension from geometric complexity, and run
model-based recovery from sketched measurements.
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("sketchlab")
except PackageNotFoundError:
    __version__ = "0+unknown"

from .bounds import (
    DEFAULT_C_GRID,
    VARIANTS,
    BoundModel,
    BoundResult,
    CalibrationConfig,
    CalibrationResult,
    ball_volume,
    calibrate_C,
    target_dimension,
)
from .complexity import (
    AnalyticProfile,
    ComplexityEstimate,
    EmpiricalProfile,
    dudley_closed_form,
    dudley_integral,
    gamma2_upper,
    gaussian_width_mc,
    greedy_net,
    unit_ball_profile,
)
from .core import (
    chords,
    check_semimetric,
    euclidean,
    normalized_chords,
    normalized_vectors,
    psi2_norm_estimate,
)
from .distortion import (
    DistortionExperiment,
    DistortionReport,
    FailureReport,
    check_chord_perturbation,
    check_reach_chord_bounds,
    chord_map,
    curve_length_distortion,
    eps_no_squares,
    epsilon_mc,
    exact_sparse_rip,
    exact_subspace_rip,
    failure_rate,
    iota_empirical,
    kappa_mc,
    kappa_points,
    measure_report,
    wilson_interval,
    zeta_mc,
)
from .estimators import ProjectiveLandweberRecovery, SubgaussianProjection
from .recovery import (
    RecoveryProblem,
    RecoveryResult,
    calibrate_step,
    hard_threshold,
    iht_recover,
    landweber_recover,
    project_uos,
    sparse_success_rate,
)
from .sets import (
    CosparseSet,
    FiniteSet,
    LowRankSet,
    ManifoldSet,
    ManifoldSpec,
    SparseSet,
    StructuredSet,
    TuckerSet,
    UoSSet,
    curve_tangent,
    enumerate_supports,
    finite_difference_operator,
    load_point_set,
    manifold_curve,
    membership,
    sample,
    save_point_set,
    set_from_config,
    set_to_config,
    tangent_projector,
)
from .sketch import (
    Sketch,
    SketchSpec,
    apply,
    apply_flat,
    build_sketch,
    family_alpha,
    from_csv,
    psi2_row_probe,
    to_csv,
)
from .subspaces import (
    Subspace,
    UoSFamily,
    finsler_distance,
    joint_subspace,
    principal_angles,
    projector,
    random_subspace,
    rotating_plane_family,
)
from .validation import InfeasibleError

__all__ = [
    "__version__",
    "InfeasibleError",
    # core
    "chords",
    "normalized_chords",
    "normalized_vectors",
    "euclidean",
    "check_semimetric",
    "psi2_norm_estimate",
    # sketch
    "Sketch",
    "SketchSpec",
    "build_sketch",
    "apply",
    "apply_flat",
    "family_alpha",
    "to_csv",
    "from_csv",
    "psi2_row_probe",
    # subspaces
    "Subspace",
    "UoSFamily",
    "projector",
    "principal_angles",
    "finsler_distance",
    "joint_subspace",
    "rotating_plane_family",
    "random_subspace",
    # sets
    "StructuredSet",
    "FiniteSet",
    "SparseSet",
    "CosparseSet",
    "LowRankSet",
    "TuckerSet",
    "UoSSet",
    "ManifoldSet",
    "ManifoldSpec",
    "sample",
    "membership",
    "enumerate_supports",
    "finite_difference_operator",
    "manifold_curve",
    "curve_tangent",
    "tangent_projector",
    "set_from_config",
    "set_to_config",
    "save_point_set",
    "load_point_set",
    # complexity
    "AnalyticProfile",
    "EmpiricalProfile",
    "ComplexityEstimate",
    "unit_ball_profile",
    "greedy_net",
    "dudley_integral",
    "dudley_closed_form",
    "gaussian_width_mc",
    "gamma2_upper",
    # distortion
    "DistortionReport",
    "kappa_points",
    "kappa_mc",
    "exact_sparse_rip",
    "exact_subspace_rip",
    "epsilon_mc",
    "zeta_mc",
    "eps_no_squares",
    "curve_length_distortion",
    "measure_report",
    "wilson_interval",
    "DistortionExperiment",
    "FailureReport",
    "failure_rate",
    "chord_map",
    "check_chord_perturbation",
    "check_reach_chord_bounds",
    "iota_empirical",
    # bounds
    "VARIANTS",
    "BoundModel",
    "BoundResult",
    "target_dimension",
    "ball_volume",
    "CalibrationConfig",
    "CalibrationResult",
    "calibrate_C",
    "DEFAULT_C_GRID",
    # recovery
    "hard_threshold",
    "project_uos",
    "RecoveryProblem",
    "RecoveryResult",
    "landweber_recover",
    "iht_recover",
    "sparse_success_rate",
    "calibrate_step",
    # estimators
    "SubgaussianProjection",
    "ProjectiveLandweberRecovery",
]
