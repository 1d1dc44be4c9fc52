"""Timestamp association between ground-truth and estimated trajectories.

Ground truth and estimates are recorded by different clocks at different
rates, so evaluation first needs a pairing step. The default is greedy
nearest-neighbor matching on timestamps; optionally the ground truth can
be interpolated at the estimate timestamps instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AssociationError
from .geometry import Pose, Quaternion, RigidTransform
from .tum_io import Trajectory

__all__ = ["MatchedPairs", "associate", "interpolate"]

DEFAULT_MAX_DIFF = 0.02  # seconds


@dataclass(frozen=True, eq=False)
class MatchedPairs:
    """Result of association: matched (gt, est) pose pairs plus bookkeeping.

    Pairs are ordered by ground-truth timestamp (strictly increasing) and no
    pose appears twice. Array views of both sides are precomputed for the
    metric code.
    """

    pairs: tuple
    unmatched_gt_count: int
    unmatched_est_count: int
    max_diff: float
    offset: float
    gt_timestamps: np.ndarray = field(init=False, repr=False, compare=False)
    est_timestamps: np.ndarray = field(init=False, repr=False, compare=False)
    gt_translations: np.ndarray = field(init=False, repr=False, compare=False)
    est_translations: np.ndarray = field(init=False, repr=False, compare=False)
    gt_quaternions: np.ndarray = field(init=False, repr=False, compare=False)
    est_quaternions: np.ndarray = field(init=False, repr=False, compare=False)
    gt_rotations: np.ndarray = field(init=False, repr=False, compare=False)
    est_rotations: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pairs = tuple(self.pairs)
        if not pairs:
            raise ValueError("MatchedPairs needs at least one pair")
        object.__setattr__(self, "pairs", pairs)
        gt = [p[0] for p in pairs]
        est = [p[1] for p in pairs]
        stamps = np.array([p.timestamp for p in gt])
        if len(stamps) > 1 and not np.all(np.diff(stamps) > 0.0):
            raise ValueError("pairs must be strictly increasing in gt timestamp")
        object.__setattr__(self, "gt_timestamps", stamps)
        object.__setattr__(self, "est_timestamps", np.array([p.timestamp for p in est]))
        object.__setattr__(self, "gt_translations", np.array([p.transform.translation for p in gt]))
        object.__setattr__(self, "est_translations", np.array([p.transform.translation for p in est]))
        object.__setattr__(self, "gt_quaternions", np.array([p.transform.rotation.as_array() for p in gt]))
        object.__setattr__(self, "est_quaternions", np.array([p.transform.rotation.as_array() for p in est]))
        object.__setattr__(self, "gt_rotations", np.array([p.transform.rotation_matrix for p in gt]))
        object.__setattr__(self, "est_rotations", np.array([p.transform.rotation_matrix for p in est]))

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


def _slerp(q0: Quaternion, q1: Quaternion, u: float) -> Quaternion:
    """Spherical interpolation along the shorter arc, u in [0, 1]."""
    a = (q0.qx, q0.qy, q0.qz, q0.qw)
    b = (q1.qx, q1.qy, q1.qz, q1.qw)
    dot = sum(x * y for x, y in zip(a, b))
    if dot < 0.0:
        b = tuple(-x for x in b)
        dot = -dot
    dot = min(dot, 1.0)
    if dot > 1.0 - 1e-12:
        # Nearly parallel: fall back to a normalized linear blend.
        wa, wb = 1.0 - u, u
    else:
        theta = math.acos(dot)
        sin_theta = math.sin(theta)
        wa = math.sin((1.0 - u) * theta) / sin_theta
        wb = math.sin(u * theta) / sin_theta
    return Quaternion(*(wa * x + wb * y for x, y in zip(a, b)))


def interpolate(traj: Trajectory, t: float) -> Pose:
    """Pose of ``traj`` at time ``t``: linear in translation, slerp in rotation.

    ``t`` must lie inside the trajectory's time range; a stored timestamp
    returns the stored pose itself.
    """
    if len(traj) < 2:
        raise ValueError("interpolation needs at least 2 poses")
    stamps = traj.timestamps
    if t < stamps[0] or t > stamps[-1]:
        raise ValueError(
            "time %r outside trajectory range [%r, %r]" % (t, stamps[0], stamps[-1])
        )
    k = int(np.searchsorted(stamps, t))
    if k < len(stamps) and stamps[k] == t:
        return traj[k]
    p0, p1 = traj[k - 1], traj[k]
    u = (t - p0.timestamp) / (p1.timestamp - p0.timestamp)
    translation = (1.0 - u) * p0.transform.translation + u * p1.transform.translation
    rotation = _slerp(p0.transform.rotation, p1.transform.rotation, u)
    return Pose(t, RigidTransform(rotation, translation))


def _greedy_pairs(gt: Trajectory, est: Trajectory, max_diff: float, offset: float):
    shifted = gt.timestamps + offset
    te = est.timestamps
    lo = np.searchsorted(te, shifted - max_diff, side="left")
    hi = np.searchsorted(te, shifted + max_diff, side="right")
    candidates = []
    for i in range(len(gt)):
        for j in range(int(lo[i]), int(hi[i])):
            diff = abs(shifted[i] - te[j])
            if diff <= max_diff:
                candidates.append((diff, i, j))
    candidates.sort()
    gt_used = np.zeros(len(gt), dtype=bool)
    est_used = np.zeros(len(est), dtype=bool)
    matches = []
    for _, i, j in candidates:
        if not gt_used[i] and not est_used[j]:
            gt_used[i] = True
            est_used[j] = True
            matches.append((i, j))
    matches.sort()
    return [(gt[i], est[j]) for i, j in matches]


def _interpolated_pairs(gt: Trajectory, est: Trajectory, max_diff: float, offset: float):
    if len(gt) < 2:
        return []
    t0, t1 = gt.time_range
    stamps = gt.timestamps
    pairs = []
    for est_pose in est:
        target = est_pose.timestamp - offset
        if target < t0 or target > t1:
            continue
        # Only interpolate where a stored sample is nearby; never invent
        # ground truth across a recording gap.
        k = int(np.searchsorted(stamps, target))
        nearest = min(
            abs(stamps[idx] - target) for idx in (k - 1, k) if 0 <= idx < len(stamps)
        )
        if nearest > max_diff:
            continue
        pairs.append((interpolate(gt, target), est_pose))
    return pairs


def associate(
    gt: Trajectory,
    est: Trajectory,
    max_diff: float = DEFAULT_MAX_DIFF,
    offset: float = 0.0,
    interpolate_gt: bool = False,
) -> MatchedPairs:
    """Pair ground-truth and estimated poses by timestamp.

    Default mode enumerates all candidate pairs with
    |t_gt + offset - t_est| <= max_diff, sorts them by that difference
    (ties by gt index, then est index) and accepts greedily, so each pose is
    used at most once. With ``interpolate_gt`` the ground truth is instead
    sampled at every estimate timestamp (minus offset) that falls inside
    its time range and has a stored sample within max_diff.

    Raises AssociationError when no pairs result.
    """
    if not max_diff > 0.0:
        raise ValueError("max_diff must be positive, got %r" % max_diff)
    if interpolate_gt:
        pairs = _interpolated_pairs(gt, est, max_diff, offset)
    else:
        pairs = _greedy_pairs(gt, est, max_diff, offset)
    if not pairs:
        raise AssociationError(
            "no timestamp matches: ground truth spans [%.6f, %.6f], estimate spans "
            "[%.6f, %.6f] (max_diff=%g, offset=%g)"
            % (*gt.time_range, *est.time_range, max_diff, offset)
        )
    matched_gt_stamps = np.array(sorted(p[0].timestamp for p in pairs))
    if interpolate_gt:
        # An interpolated gt pose is synthetic; count a stored gt pose as
        # matched when some pair's target time lies within max_diff of it.
        idx = np.searchsorted(matched_gt_stamps, gt.timestamps)
        covered = np.zeros(len(gt), dtype=bool)
        for shift_idx in (idx - 1, np.minimum(idx, len(matched_gt_stamps) - 1)):
            valid = shift_idx >= 0
            near = np.abs(matched_gt_stamps[shift_idx] - gt.timestamps) <= max_diff
            covered |= valid & near
        unmatched_gt = int(len(gt) - covered.sum())
    else:
        unmatched_gt = len(gt) - len(pairs)
    return MatchedPairs(
        pairs=tuple(pairs),
        unmatched_gt_count=unmatched_gt,
        unmatched_est_count=len(est) - len(pairs),
        max_diff=max_diff,
        offset=offset,
    )
