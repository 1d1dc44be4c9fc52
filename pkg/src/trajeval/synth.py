"""Synthetic ground-truth trajectories and controlled degradations.

The generator produces analytic paths (line, circle, figure-eight) with
the camera facing the direction of travel. Degradations then imitate the
classic estimator failure modes: independent pose noise, random-walk
drift, a mid-sequence dropout (sensor covered / kidnap) and truncation
(tracking lost and never recovered). Fixtures built here drive most of
the metric tests.

Randomness comes from numpy's default PCG64 generator, seeded from the
DegradationSpec; draws are ordered deterministically (translation, axis,
angle -- per pose or per step) and scaled by sigma afterwards, so changing
sigma alone rescales the very same noise realization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyTrajectoryError
from .geometry import Pose, Quaternion, RigidTransform
from .tum_io import Trajectory

__all__ = ["MotionSpec", "DegradationSpec", "generate", "degrade"]

SHAPES = ("line", "circle", "figure_eight")
DEGRADATION_KINDS = ("iid_noise", "random_walk_drift", "gap", "truncate")


@dataclass(frozen=True)
class MotionSpec:
    """Analytic path parameters: shape, duration (s), rate (Hz), scale (m)."""

    shape: str = "line"
    duration: float = 60.0
    rate: float = 30.0
    scale: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValueError("shape must be one of %s, got %r" % (SHAPES, self.shape))
        if not self.duration > 0.0:
            raise ValueError("duration must be positive")
        if not self.rate > 0.0:
            raise ValueError("rate must be positive")
        if not self.scale > 0.0:
            raise ValueError("scale must be positive")


@dataclass(frozen=True)
class DegradationSpec:
    """One degradation to apply: which kind, its parameters, and a seed.

    iid_noise / random_walk_drift use sigma_trans (m) and sigma_rot (rad);
    gap removes every pose with t0 <= timestamp <= t1; truncate removes
    everything after the cutoff.
    """

    kind: str
    sigma_trans: float = 0.0
    sigma_rot: float = 0.0
    t0: float = 0.0
    t1: float = 0.0
    cutoff: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in DEGRADATION_KINDS:
            raise ValueError(
                "kind must be one of %s, got %r" % (DEGRADATION_KINDS, self.kind)
            )
        if self.kind in ("iid_noise", "random_walk_drift"):
            if self.sigma_trans < 0.0 or self.sigma_rot < 0.0:
                raise ValueError("sigma values must be nonnegative")
        elif self.kind == "gap":
            if not 0.0 <= self.t0 < self.t1:
                raise ValueError("gap needs 0 <= t0 < t1, got [%r, %r]" % (self.t0, self.t1))
        elif self.kind == "truncate":
            if not self.cutoff > 0.0:
                raise ValueError("cutoff must be positive, got %r" % self.cutoff)


def _path_points(spec: MotionSpec, t: np.ndarray):
    """Positions (n, 3) and heading angles (n,) along the analytic path."""
    s = spec.scale
    if spec.shape == "line":
        x = s * t / spec.duration
        pos = np.column_stack([x, np.zeros_like(x), np.zeros_like(x)])
        heading = np.zeros_like(x)
    elif spec.shape == "circle":
        theta = 2.0 * math.pi * t / spec.duration
        pos = np.column_stack([s * np.cos(theta), s * np.sin(theta), np.zeros_like(theta)])
        heading = theta + 0.5 * math.pi
    else:  # figure_eight (Gerono lemniscate)
        phi = 2.0 * math.pi * t / spec.duration
        pos = np.column_stack(
            [s * np.sin(phi), s * np.sin(phi) * np.cos(phi), np.zeros_like(phi)]
        )
        heading = np.arctan2(np.cos(2.0 * phi), np.cos(phi))
    return pos, heading


def generate(spec: MotionSpec) -> Trajectory:
    """Sample the analytic path at the given rate, starting at t = 0.

    The pose orientation is a yaw facing the direction of travel. The path
    is deterministic; MotionSpec.seed is only passed through to degradations.
    """
    count = int(round(spec.duration * spec.rate)) + 1
    t = np.arange(count) / spec.rate
    pos, heading = _path_points(spec, t)
    half = 0.5 * heading
    poses = [
        Pose(
            t[k],
            RigidTransform(
                Quaternion(0.0, 0.0, math.sin(half[k]), math.cos(half[k])),
                pos[k],
            ),
        )
        for k in range(count)
    ]
    return Trajectory(poses, source_label="synth:%s" % spec.shape)


def _axis_angle_quat(axis: np.ndarray, angle: float) -> Quaternion:
    norm = float(np.linalg.norm(axis))
    if norm < 1e-12:
        unit = np.array([1.0, 0.0, 0.0])
    else:
        unit = axis / norm
    half = 0.5 * angle
    s = math.sin(half)
    return Quaternion(unit[0] * s, unit[1] * s, unit[2] * s, math.cos(half))


def _perturb_iid(traj: Trajectory, spec: DegradationSpec) -> list:
    rng = np.random.default_rng(spec.seed)
    out = []
    for pose in traj:
        dt = spec.sigma_trans * rng.standard_normal(3)
        axis = rng.standard_normal(3)
        angle = spec.sigma_rot * float(rng.standard_normal())
        noise_q = _axis_angle_quat(axis, angle)
        out.append(
            Pose(
                pose.timestamp,
                RigidTransform(
                    pose.transform.rotation.multiply(noise_q),
                    pose.transform.translation + dt,
                ),
            )
        )
    return out


def _perturb_drift(traj: Trajectory, spec: DegradationSpec) -> list:
    rng = np.random.default_rng(spec.seed)
    out = [traj[0]]
    cum_t = np.zeros(3)
    cum_q = Quaternion.identity()
    for pose in traj[1:]:
        cum_t = cum_t + spec.sigma_trans * rng.standard_normal(3)
        axis = rng.standard_normal(3)
        angle = spec.sigma_rot * float(rng.standard_normal())
        cum_q = _axis_angle_quat(axis, angle).multiply(cum_q)
        out.append(
            Pose(
                pose.timestamp,
                RigidTransform(
                    cum_q.multiply(pose.transform.rotation),
                    pose.transform.translation + cum_t,
                ),
            )
        )
    return out


def degrade(traj: Trajectory, spec: DegradationSpec) -> Trajectory:
    """Apply one degradation; surviving poses keep their timestamps.

    Raises EmptyTrajectoryError when gap/truncate would remove every pose.
    """
    if spec.kind == "iid_noise":
        poses = _perturb_iid(traj, spec)
    elif spec.kind == "random_walk_drift":
        poses = _perturb_drift(traj, spec)
    elif spec.kind == "gap":
        poses = [p for p in traj if not spec.t0 <= p.timestamp <= spec.t1]
        if not poses:
            raise EmptyTrajectoryError(
                "gap [%g, %g] removes every pose" % (spec.t0, spec.t1)
            )
    else:  # truncate
        poses = [p for p in traj if p.timestamp <= spec.cutoff]
        if not poses:
            raise EmptyTrajectoryError("cutoff %g removes every pose" % spec.cutoff)
    label = traj.source_label + "+" + spec.kind if traj.source_label else spec.kind
    return Trajectory(poses, source_label=label)
