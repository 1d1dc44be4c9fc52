"""trajeval: evaluate estimated camera trajectories against ground truth.

Library surface: TUM-format trajectory I/O, timestamp association, rigid
alignment, absolute/relative error metrics with coverage reporting, and a
synthetic trajectory generator for fixtures. The same functionality is
exposed on the command line as ``trajeval``.
"""

from .alignment import AlignmentResult, horn_align
from .association import MatchedPairs, associate, interpolate
from .errors import (
    AssociationError,
    ConfigError,
    DegenerateGeometryError,
    EmptyTrajectoryError,
    EmptyWindowError,
    InsufficientDataError,
    ParseError,
    TrajevalError,
)
from .geometry import (
    Pose,
    Quaternion,
    RigidTransform,
    compose,
    inverse,
    quat_to_rotation,
    relative,
    rotation_angle,
    rotation_to_quat,
    translation_norm,
)
from .metrics import (
    CoverageReport,
    DeltaSpec,
    ErrorSeries,
    Stats,
    ate,
    coverage,
    rpe,
    rpe_all_deltas,
    summarize,
)
from .report import (
    EvaluationRecord,
    ReportConfig,
    ReportEntry,
    evaluate_entry,
    load_report_config,
    run_report,
)
from .synth import DegradationSpec, MotionSpec, degrade, generate
from .tum_io import Trajectory, load_trajectory, parse_tum, save_trajectory, write_tum

__version__ = "0.1.0"

__all__ = [
    "AlignmentResult",
    "AssociationError",
    "ConfigError",
    "CoverageReport",
    "DegenerateGeometryError",
    "DegradationSpec",
    "DeltaSpec",
    "EmptyTrajectoryError",
    "EmptyWindowError",
    "ErrorSeries",
    "EvaluationRecord",
    "InsufficientDataError",
    "MatchedPairs",
    "MotionSpec",
    "ParseError",
    "Pose",
    "Quaternion",
    "ReportConfig",
    "ReportEntry",
    "RigidTransform",
    "Stats",
    "Trajectory",
    "TrajevalError",
    "associate",
    "ate",
    "compose",
    "coverage",
    "degrade",
    "evaluate_entry",
    "generate",
    "horn_align",
    "interpolate",
    "inverse",
    "load_report_config",
    "load_trajectory",
    "parse_tum",
    "quat_to_rotation",
    "relative",
    "rotation_angle",
    "rotation_to_quat",
    "rpe",
    "rpe_all_deltas",
    "run_report",
    "save_trajectory",
    "summarize",
    "translation_norm",
    "write_tum",
]
