"""Closed-form rigid alignment of matched trajectories.

Finds the rotation and translation that map the estimated positions onto
the ground-truth positions with least-squares residual, using the SVD of
the cross-covariance between the centered point sets. Translation only --
orientations do not enter the objective, and no scale is estimated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .association import MatchedPairs
from .errors import DegenerateGeometryError, InsufficientDataError
from .geometry import RigidTransform, rotation_to_quat

__all__ = ["AlignmentResult", "horn_align"]

_SPREAD_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class AlignmentResult:
    transform: RigidTransform  # maps estimate coordinates into gt coordinates
    residual_rmse: float
    pair_count: int


def horn_align(pairs: MatchedPairs) -> AlignmentResult:
    """Least-squares rigid transform taking estimated onto ground-truth positions.

    Needs at least two pairs; raises DegenerateGeometryError when either
    point set is a single repeated point (rotation unobservable). The
    reflection case of the SVD solution is corrected via det(U V^T).
    """
    n = len(pairs)
    if n < 2:
        raise InsufficientDataError("alignment needs at least 2 pairs, got %d" % n)
    gt = pairs.gt_translations
    est = pairs.est_translations
    gt_centroid = gt.mean(axis=0)
    est_centroid = est.mean(axis=0)
    gt_centered = gt - gt_centroid
    est_centered = est - est_centroid
    if (
        np.max(np.linalg.norm(gt_centered, axis=1)) < _SPREAD_TOL
        or np.max(np.linalg.norm(est_centered, axis=1)) < _SPREAD_TOL
    ):
        raise DegenerateGeometryError(
            "all points coincide on one side; rotation is unobservable"
        )
    w = gt_centered.T @ est_centered
    u, _, vt = np.linalg.svd(w)
    d = np.sign(np.linalg.det(u @ vt))
    rotation = u @ np.diag([1.0, 1.0, d]) @ vt
    translation = gt_centroid - rotation @ est_centroid
    residuals = est @ rotation.T + translation - gt
    rmse = float(np.sqrt(np.mean(np.sum(residuals * residuals, axis=1))))
    return AlignmentResult(
        transform=RigidTransform(rotation_to_quat(rotation), translation),
        residual_rmse=rmse,
        pair_count=n,
    )
