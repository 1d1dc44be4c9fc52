"""Rigid body poses in SE(3): unit quaternions, transforms, timestamped poses.

Quaternion components are ordered (qx, qy, qz, qw) -- vector part first,
scalar last -- matching the trajectory file convention used throughout.
Many libraries put the scalar first; keep the order straight when
interfacing with them.

All types here are immutable after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Quaternion",
    "RigidTransform",
    "Pose",
    "quat_to_rotation",
    "rotation_to_quat",
    "compose",
    "inverse",
    "relative",
    "translation_norm",
    "rotation_angle",
]

# Quaternions with a norm below this are rejected as garbage input rather
# than silently blown up by normalization.
_MIN_QUAT_NORM = 1e-6


@dataclass(frozen=True)
class Quaternion:
    """Unit quaternion (qx, qy, qz, qw).

    The constructor normalizes; inputs with norm < 1e-6 raise ValueError.
    """

    qx: float
    qy: float
    qz: float
    qw: float

    def __post_init__(self):
        qx = float(self.qx)
        qy = float(self.qy)
        qz = float(self.qz)
        qw = float(self.qw)
        norm = math.sqrt(qx * qx + qy * qy + qz * qz + qw * qw)
        if not math.isfinite(norm) or norm < _MIN_QUAT_NORM:
            raise ValueError("quaternion norm %r is not usable" % norm)
        if norm != 1.0:
            qx, qy, qz, qw = qx / norm, qy / norm, qz / norm, qw / norm
        object.__setattr__(self, "qx", qx)
        object.__setattr__(self, "qy", qy)
        object.__setattr__(self, "qz", qz)
        object.__setattr__(self, "qw", qw)

    @classmethod
    def identity(cls) -> "Quaternion":
        return cls(0.0, 0.0, 0.0, 1.0)

    @classmethod
    def _unit_unchecked(cls, qx, qy, qz, qw) -> "Quaternion":
        # Internal: component sign flips and other norm-preserving rearrangements
        # must not renormalize, or they would perturb the last bit.
        q = object.__new__(cls)
        object.__setattr__(q, "qx", qx)
        object.__setattr__(q, "qy", qy)
        object.__setattr__(q, "qz", qz)
        object.__setattr__(q, "qw", qw)
        return q

    def conjugate(self) -> "Quaternion":
        """Inverse rotation. Negation preserves the norm, so no renormalization."""
        return Quaternion._unit_unchecked(-self.qx, -self.qy, -self.qz, self.qw)

    def multiply(self, other: "Quaternion") -> "Quaternion":
        """Hamilton product self * other (apply ``other`` first, then ``self``)."""
        ax, ay, az, aw = self.qx, self.qy, self.qz, self.qw
        bx, by, bz, bw = other.qx, other.qy, other.qz, other.qw
        return Quaternion(
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by + ay * bw + az * bx - ax * bz,
            aw * bz + az * bw + ax * by - ay * bx,
            aw * bw - ax * bx - ay * by - az * bz,
        )

    def canonical(self) -> "Quaternion":
        """Sign-canonical representative (qw >= 0) of the same rotation."""
        if self.qw < 0.0:
            # "+ 0.0" turns -0.0 into 0.0 so serialized output never shows -0.
            return Quaternion._unit_unchecked(
                -self.qx + 0.0, -self.qy + 0.0, -self.qz + 0.0, -self.qw + 0.0
            )
        return self

    def as_array(self) -> np.ndarray:
        return np.array([self.qx, self.qy, self.qz, self.qw])


def quat_to_rotation(q: Quaternion) -> np.ndarray:
    """3x3 rotation matrix for a unit quaternion.

    The diagonal uses the 1 - 2(b^2 + c^2) form, so the identity quaternion
    maps to the exact identity matrix.
    """
    x, y, z, w = q.qx, q.qy, q.qz, q.qw
    return np.array(
        [
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - z * w), 2.0 * (x * z + y * w)],
            [2.0 * (x * y + z * w), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - x * w)],
            [2.0 * (x * z - y * w), 2.0 * (y * z + x * w), 1.0 - 2.0 * (x * x + y * y)],
        ]
    )


def rotation_to_quat(m: np.ndarray) -> Quaternion:
    """Unit quaternion for a 3x3 rotation matrix (Shepperd's branch method)."""
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3):
        raise ValueError("expected a 3x3 matrix, got shape %s" % (m.shape,))
    t = m[0, 0] + m[1, 1] + m[2, 2]
    if t > 0.0:
        s = math.sqrt(t + 1.0) * 2.0
        return Quaternion(
            (m[2, 1] - m[1, 2]) / s,
            (m[0, 2] - m[2, 0]) / s,
            (m[1, 0] - m[0, 1]) / s,
            0.25 * s,
        )
    if m[0, 0] >= m[1, 1] and m[0, 0] >= m[2, 2]:
        s = math.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2]) * 2.0
        return Quaternion(
            0.25 * s,
            (m[0, 1] + m[1, 0]) / s,
            (m[0, 2] + m[2, 0]) / s,
            (m[2, 1] - m[1, 2]) / s,
        )
    if m[1, 1] >= m[2, 2]:
        s = math.sqrt(1.0 + m[1, 1] - m[0, 0] - m[2, 2]) * 2.0
        return Quaternion(
            (m[0, 1] + m[1, 0]) / s,
            0.25 * s,
            (m[1, 2] + m[2, 1]) / s,
            (m[0, 2] - m[2, 0]) / s,
        )
    s = math.sqrt(1.0 + m[2, 2] - m[0, 0] - m[1, 1]) * 2.0
    return Quaternion(
        (m[0, 2] + m[2, 0]) / s,
        (m[1, 2] + m[2, 1]) / s,
        0.25 * s,
        (m[1, 0] - m[0, 1]) / s,
    )


@dataclass(frozen=True, eq=False)
class RigidTransform:
    """Rotation + translation, with the rotation matrix cached at construction."""

    rotation: Quaternion
    translation: np.ndarray

    def __post_init__(self):
        if not isinstance(self.rotation, Quaternion):
            raise TypeError("rotation must be a Quaternion (see from_matrix)")
        t = np.array(self.translation, dtype=float).reshape(-1)
        if t.shape != (3,):
            raise ValueError("translation must have 3 components")
        if not np.all(np.isfinite(t)):
            raise ValueError("translation must be finite")
        t.setflags(write=False)
        object.__setattr__(self, "translation", t)
        m = quat_to_rotation(self.rotation)
        m.setflags(write=False)
        object.__setattr__(self, "_matrix", m)

    @property
    def rotation_matrix(self) -> np.ndarray:
        return self._matrix

    @classmethod
    def identity(cls) -> "RigidTransform":
        return cls(Quaternion.identity(), np.zeros(3))

    @classmethod
    def from_matrix(cls, m: np.ndarray, translation=(0.0, 0.0, 0.0)) -> "RigidTransform":
        """Build from a 3x3 matrix, which must be orthonormal with det +1 (tol 1e-6)."""
        m = np.asarray(m, dtype=float)
        if m.shape != (3, 3):
            raise ValueError("expected a 3x3 matrix, got shape %s" % (m.shape,))
        if not np.allclose(m.T @ m, np.eye(3), atol=1e-6):
            raise ValueError("matrix is not orthonormal")
        if np.linalg.det(m) < 0.0:
            raise ValueError("matrix has negative determinant (reflection)")
        return cls(rotation_to_quat(m), np.asarray(translation, dtype=float))

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Transform one point (3,) or many points (n, 3)."""
        p = np.asarray(points, dtype=float)
        return p @ self._matrix.T + self.translation


def compose(a: RigidTransform, b: RigidTransform) -> RigidTransform:
    """a then-applied-after b: the transform mapping x to a(b(x))."""
    return RigidTransform(
        a.rotation.multiply(b.rotation),
        a.rotation_matrix @ b.translation + a.translation,
    )


def inverse(t: RigidTransform) -> RigidTransform:
    q_inv = t.rotation.conjugate()
    # Use the inverse's own (deterministically recomputed) matrix for the
    # translation so that relative(x, x) cancels exactly.
    m_inv = quat_to_rotation(q_inv)
    return RigidTransform(q_inv, -(m_inv @ t.translation))


def relative(a: RigidTransform, b: RigidTransform) -> RigidTransform:
    """Motion from frame ``a`` to frame ``b``: inverse(a) composed with b."""
    return compose(inverse(a), b)


def translation_norm(t: RigidTransform) -> float:
    """Euclidean length of the translation component, in meters."""
    return float(np.linalg.norm(t.translation))


def rotation_angle(t: RigidTransform) -> float:
    """Geodesic rotation angle in radians, in [0, pi].

    Computed as arccos((trace(R) - 1) / 2) with the argument clamped to [-1, 1].
    """
    m = t.rotation_matrix
    tr = m[0, 0] + m[1, 1] + m[2, 2]
    return float(np.arccos(np.clip(0.5 * (tr - 1.0), -1.0, 1.0)))


@dataclass(frozen=True, eq=False)
class Pose:
    """A rigid transform stamped with a time in seconds."""

    timestamp: float
    transform: RigidTransform

    def __post_init__(self):
        ts = float(self.timestamp)
        if not math.isfinite(ts):
            raise ValueError("timestamp must be finite, got %r" % ts)
        object.__setattr__(self, "timestamp", ts)
        if not isinstance(self.transform, RigidTransform):
            raise TypeError("transform must be a RigidTransform")
