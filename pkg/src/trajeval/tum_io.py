"""Trajectory container plus reading/writing of the TUM text format.

A data line is::

    timestamp tx ty tz qx qy qz qw

with the timestamp in seconds, translation in meters and the quaternion
vector-first. Lines starting with '#' and blank lines are ignored.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyTrajectoryError, ParseError
from .geometry import Pose, Quaternion, RigidTransform

__all__ = ["Trajectory", "parse_tum", "write_tum", "load_trajectory", "save_trajectory"]

log = logging.getLogger(__name__)

_HEADER = "# timestamp tx ty tz qx qy qz qw"


@dataclass(frozen=True, eq=False)
class Trajectory:
    """An immutable, time-ordered sequence of poses.

    Construction requires at least one pose and strictly increasing
    timestamps; ``parse_tum`` sorts and de-duplicates before building one.
    Column-stacked views of the pose data are precomputed for the metric
    code, which works on arrays rather than pose objects.
    """

    poses: tuple
    source_label: str = ""
    timestamps: np.ndarray = field(init=False, repr=False, compare=False)
    translations: np.ndarray = field(init=False, repr=False, compare=False)
    quaternions: np.ndarray = field(init=False, repr=False, compare=False)
    rotations: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        poses = tuple(self.poses)
        if not poses:
            raise EmptyTrajectoryError("a trajectory needs at least one pose")
        for p in poses:
            if not isinstance(p, Pose):
                raise TypeError("poses must be Pose instances")
        stamps = np.array([p.timestamp for p in poses])
        if len(poses) > 1 and not np.all(np.diff(stamps) > 0.0):
            raise ValueError("timestamps must be strictly increasing")
        object.__setattr__(self, "poses", poses)
        object.__setattr__(self, "timestamps", stamps)
        object.__setattr__(
            self, "translations", np.array([p.transform.translation for p in poses])
        )
        object.__setattr__(
            self, "quaternions", np.array([p.transform.rotation.as_array() for p in poses])
        )
        object.__setattr__(
            self, "rotations", np.array([p.transform.rotation_matrix for p in poses])
        )
        for name in ("timestamps", "translations", "quaternions", "rotations"):
            getattr(self, name).setflags(write=False)

    def __len__(self):
        return len(self.poses)

    def __iter__(self):
        return iter(self.poses)

    def __getitem__(self, i) -> Pose:
        return self.poses[i]

    @property
    def time_range(self):
        return self.timestamps[0], self.timestamps[-1]

    @property
    def duration(self) -> float:
        return float(self.timestamps[-1] - self.timestamps[0])


def _parse_line(line_number, raw):
    parts = raw.split()
    if len(parts) != 8:
        raise ParseError(line_number, "expected 8 fields, got %d" % len(parts))
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise ParseError(line_number, "non-numeric field in %r" % raw.strip()) from None
    for v in values:
        if not np.isfinite(v):
            raise ParseError(line_number, "non-finite value in %r" % raw.strip())
    ts, tx, ty, tz, qx, qy, qz, qw = values
    try:
        rotation = Quaternion(qx, qy, qz, qw)
    except ValueError as exc:
        raise ParseError(line_number, str(exc)) from None
    return Pose(ts, RigidTransform(rotation, (tx, ty, tz)))


def parse_tum(lines, source_label: str = "") -> Trajectory:
    """Parse an iterable of text lines (e.g. an open file) into a Trajectory.

    Raises ParseError (with line number) on malformed lines and
    EmptyTrajectoryError when no data lines remain. Out-of-order input is
    sorted and duplicate timestamps are dropped (first occurrence wins),
    both with a logged warning.
    """
    poses = []
    for line_number, raw in enumerate(lines, start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        poses.append(_parse_line(line_number, stripped))
    if not poses:
        raise EmptyTrajectoryError(
            "no data lines in %s" % (source_label or "trajectory input")
        )
    stamps = [p.timestamp for p in poses]
    if any(b <= a for a, b in zip(stamps, stamps[1:])):
        # Stable sort keeps input order within equal stamps, so dropping
        # repeats below keeps the first occurrence from the file.
        if any(b < a for a, b in zip(stamps, stamps[1:])):
            log.warning(
                "%s: timestamps not sorted; reordering %d poses",
                source_label or "input",
                len(poses),
            )
        poses.sort(key=lambda p: p.timestamp)
        deduped = [poses[0]]
        for p in poses[1:]:
            if p.timestamp == deduped[-1].timestamp:
                continue
            deduped.append(p)
        if len(deduped) != len(poses):
            log.warning(
                "%s: dropped %d duplicate timestamp(s)",
                source_label or "input",
                len(poses) - len(deduped),
            )
        poses = deduped
    return Trajectory(poses, source_label=source_label)


def _format_value(value: float) -> str:
    # Shortest decimal string that round-trips to the same double, padded to
    # at least six decimal places so output stays familiar-looking.
    return np.format_float_positional(value, unique=True, min_digits=6)


def write_tum(trajectory: Trajectory, stream) -> None:
    """Write a trajectory with one comment header line.

    Every value is printed with enough digits to parse back bit-exactly;
    quaternions are written sign-canonicalized (qw >= 0).
    """
    stream.write(_HEADER + "\n")
    for pose in trajectory:
        q = pose.transform.rotation.canonical()
        t = pose.transform.translation
        fields = (
            pose.timestamp,
            t[0],
            t[1],
            t[2],
            q.qx,
            q.qy,
            q.qz,
            q.qw,
        )
        stream.write(" ".join(_format_value(v) for v in fields) + "\n")


def load_trajectory(path, source_label: str = "") -> Trajectory:
    """Read a TUM-format file from disk. OSError propagates to the caller."""
    label = source_label or str(path)
    with open(path, "r", encoding="utf-8") as handle:
        return parse_tum(handle, source_label=label)


def save_trajectory(trajectory: Trajectory, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        write_tum(trajectory, handle)
