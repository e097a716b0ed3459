"""Robust correspondence-based rigid registration.

Pipeline: pairwise biweight voting ranks correspondences, anchored rotation
consensus maximization finds a candidate inlier set, graduated biweight
refinement polishes the rotation, and residual thresholding recovers the
full inlier set and final transform. Designed to survive extreme outlier
contamination while staying closed form in every inner step.
"""

from .benchmark import (
    BenchConfig,
    BenchRecord,
    OutlierMode,
    generate_instance,
    run_benchmark,
    surface_model_points,
    write_csv,
    write_json,
)
from .consensus import (
    ConsensusConfig,
    ConsensusResult,
    max_rot_consensus,
    min_inlier_schedule,
)
from .cost import (
    GncParams,
    KernelKind,
    VoteKernel,
    tb_outlier_process,
    tb_stationarity_residual,
    tb_surrogate_cost,
    tb_weight,
    vote_increment,
)
from .errors import (
    DegenerateCandidate,
    DegenerateTriad,
    EmptyInlierSet,
    EmptyInput,
    InsufficientCorrespondences,
    NoConsensus,
    ParseError,
    RankDeficient,
    RegistrationError,
    SingularInput,
)
from .geometry import (
    CorrespondenceSet,
    RigidTransform,
    chordal_distance,
    chordal_threshold_from_geodesic,
    geodesic_distance,
    horn_triad_rotation,
    is_rotation,
    project_to_so3,
    random_rotation,
    rotation_about_axis,
    weighted_svd_rotation,
)
from .gnc import GncTrace, solve_gnc_tb
from .pipeline import (
    RegistrationResult,
    StageDiagnostics,
    VocraConfig,
    ransac_baseline,
    rotation_error,
    translation_error,
    vocra,
)
from .rotation_averaging import (
    RotationSample,
    chordal_consensus,
    robust_lee_chordal,
)
from .voting import VoteTable, pairwise_scale_gap, voting_tb

__version__ = "0.1.0"

__all__ = [
    "BenchConfig",
    "BenchRecord",
    "ConsensusConfig",
    "ConsensusResult",
    "CorrespondenceSet",
    "DegenerateCandidate",
    "DegenerateTriad",
    "EmptyInlierSet",
    "EmptyInput",
    "GncParams",
    "GncTrace",
    "InsufficientCorrespondences",
    "KernelKind",
    "NoConsensus",
    "OutlierMode",
    "ParseError",
    "RankDeficient",
    "RegistrationError",
    "RegistrationResult",
    "RigidTransform",
    "RotationSample",
    "SingularInput",
    "StageDiagnostics",
    "VocraConfig",
    "VoteKernel",
    "VoteTable",
    "chordal_consensus",
    "chordal_distance",
    "chordal_threshold_from_geodesic",
    "generate_instance",
    "geodesic_distance",
    "horn_triad_rotation",
    "is_rotation",
    "max_rot_consensus",
    "min_inlier_schedule",
    "pairwise_scale_gap",
    "project_to_so3",
    "random_rotation",
    "ransac_baseline",
    "robust_lee_chordal",
    "rotation_about_axis",
    "rotation_error",
    "run_benchmark",
    "solve_gnc_tb",
    "surface_model_points",
    "tb_outlier_process",
    "tb_stationarity_residual",
    "tb_surrogate_cost",
    "tb_weight",
    "translation_error",
    "vocra",
    "vote_increment",
    "voting_tb",
    "weighted_svd_rotation",
    "write_csv",
    "write_json",
]
