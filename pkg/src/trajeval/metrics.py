"""Trajectory error metrics: absolute error, relative error, coverage.

Absolute trajectory error (ATE) aligns the estimate onto the ground truth
and measures per-pose residual translation. Relative pose error (RPE)
compares relative motions over a time or index interval and yields both a
translational and a rotational error series; averaged over all interval
lengths it captures drift without fixing an arbitrary delta. Coverage
reports how much of the ground-truth timespan the estimate accounts for at
all -- absolute/relative errors are silent about motion for which the
estimator produced no poses, and a high score on a half-empty trajectory
is meaningless without it.

All error computations run on stacked arrays; the per-couple relative
motions are composed in quaternion space, which keeps comparing a
trajectory against itself at exactly zero error instead of accumulating
round-off through rotation-matrix products.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .alignment import horn_align
from .association import MatchedPairs
from .errors import EmptyWindowError
from .tum_io import Trajectory

__all__ = [
    "Stats",
    "ErrorSeries",
    "DeltaSpec",
    "CoverageReport",
    "summarize",
    "ate",
    "rpe",
    "rpe_all_deltas",
    "coverage",
]

DELTA_MODES = ("frames", "seconds", "all_sampled")
DEFAULT_MAX_SAMPLES = 10000


@dataclass(frozen=True)
class Stats:
    """Summary statistics of an error sample set (std is the population std)."""

    rmse: float
    mean: float
    median: float
    std: float
    min: float
    max: float

    def as_dict(self) -> dict:
        return {
            "rmse": self.rmse,
            "mean": self.mean,
            "median": self.median,
            "std": self.std,
            "min": self.min,
            "max": self.max,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Stats":
        return cls(**{k: float(data[k]) for k in ("rmse", "mean", "median", "std", "min", "max")})


def _rmse(values: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.square(values))))


def summarize(values) -> Stats:
    """Stats over a nonempty sequence of real values."""
    v = np.asarray(values, dtype=float).reshape(-1)
    if v.size == 0:
        raise ValueError("cannot summarize an empty sequence")
    return Stats(
        rmse=_rmse(v),
        mean=float(np.mean(v)),
        median=float(np.median(v)),
        std=float(np.std(v)),
        min=float(np.min(v)),
        max=float(np.max(v)),
    )


@dataclass(frozen=True, eq=False)
class ErrorSeries:
    """Timestamped nonnegative error samples with their summary statistics.

    kind is one of "ate_trans", "rpe_trans" (meters) or "rpe_rot" (radians).
    Stats are always recomputed from the samples at construction.
    """

    timestamps: np.ndarray
    values: np.ndarray
    kind: str
    stats: Stats = field(init=False)

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype=float).reshape(-1)
        vals = np.asarray(self.values, dtype=float).reshape(-1)
        if ts.shape != vals.shape:
            raise ValueError("timestamps and values must have equal length")
        if vals.size == 0:
            raise ValueError("an error series cannot be empty")
        if not np.all(np.isfinite(vals)) or np.any(vals < 0.0):
            raise ValueError("error values must be finite and nonnegative")
        if self.kind not in ("ate_trans", "rpe_trans", "rpe_rot"):
            raise ValueError("unknown series kind %r" % self.kind)
        ts.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "stats", summarize(vals))

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class DeltaSpec:
    """Interval selection for relative pose error.

    mode "frames": delta is an index step, couples (i, i+delta).
    mode "seconds": partner of i is the first pose at least delta seconds later.
    mode "all_sampled": max_samples couples drawn over all interval lengths
    with the seeded generator (delta is ignored).
    """

    mode: str = "frames"
    delta: float = 1.0
    max_samples: int = DEFAULT_MAX_SAMPLES
    seed: int = 0

    def __post_init__(self):
        if self.mode not in DELTA_MODES:
            raise ValueError("mode must be one of %s, got %r" % (DELTA_MODES, self.mode))
        if self.mode != "all_sampled" and not self.delta > 0.0:
            raise ValueError("delta must be positive, got %r" % self.delta)
        if self.mode == "all_sampled" and self.max_samples <= 0:
            raise ValueError("max_samples must be positive, got %r" % self.max_samples)


@dataclass(frozen=True)
class CoverageReport:
    """How much of the ground truth the estimate accounts for."""

    matched_fraction: float
    temporal_coverage: float
    largest_gap: float


# ---------------------------------------------------------------------------
# batched quaternion helpers (component order x, y, z, w)


def _q_conj(q):
    out = q.copy()
    out[:, :3] = -out[:, :3]
    return out


def _q_mul(a, b):
    ax, ay, az, aw = a[:, 0], a[:, 1], a[:, 2], a[:, 3]
    bx, by, bz, bw = b[:, 0], b[:, 1], b[:, 2], b[:, 3]
    return np.stack(
        [
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by + ay * bw + az * bx - ax * bz,
            aw * bz + az * bw + ax * by - ay * bx,
            aw * bw - ax * bx - ay * by - az * bz,
        ],
        axis=1,
    )


def _q_normalize(q):
    return q / np.sqrt(np.sum(q * q, axis=1, keepdims=True))


def _q_matrices(q):
    x, y, z, w = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
    m = np.empty((len(q), 3, 3))
    m[:, 0, 0] = 1.0 - 2.0 * (y * y + z * z)
    m[:, 0, 1] = 2.0 * (x * y - z * w)
    m[:, 0, 2] = 2.0 * (x * z + y * w)
    m[:, 1, 0] = 2.0 * (x * y + z * w)
    m[:, 1, 1] = 1.0 - 2.0 * (x * x + z * z)
    m[:, 1, 2] = 2.0 * (y * z - x * w)
    m[:, 2, 0] = 2.0 * (x * z - y * w)
    m[:, 2, 1] = 2.0 * (y * z + x * w)
    m[:, 2, 2] = 1.0 - 2.0 * (x * x + y * y)
    return m


def _rotate_inv(matrices, vectors):
    # R^T v for each (R, v) pair
    return np.einsum("nji,nj->ni", matrices, vectors)


def _couple_errors(pairs: MatchedPairs, i_idx, j_idx):
    """Translation norms and rotation angles of the per-couple error transforms.

    For couple (i, j): the relative motion of each trajectory is
    inverse(pose_i) * pose_j; the error is inverse(rel_gt) * rel_est. All
    rotation composition happens on quaternions.
    """
    qg, qe = pairs.gt_quaternions, pairs.est_quaternions
    tg, te = pairs.gt_translations, pairs.est_translations
    rel_g_q = _q_normalize(_q_mul(_q_conj(qg[i_idx]), qg[j_idx]))
    rel_e_q = _q_normalize(_q_mul(_q_conj(qe[i_idx]), qe[j_idx]))
    rel_g_t = _rotate_inv(pairs.gt_rotations[i_idx], tg[j_idx] - tg[i_idx])
    rel_e_t = _rotate_inv(pairs.est_rotations[i_idx], te[j_idx] - te[i_idx])

    err_q = _q_normalize(_q_mul(_q_conj(rel_g_q), rel_e_q))
    err_t = _rotate_inv(_q_matrices(rel_g_q), rel_e_t - rel_g_t)

    trans = np.sqrt(np.sum(err_t * err_t, axis=1))
    err_m = _q_matrices(err_q)
    trace = err_m[:, 0, 0] + err_m[:, 1, 1] + err_m[:, 2, 2]
    rot = np.arccos(np.clip(0.5 * (trace - 1.0), -1.0, 1.0))
    return trans, rot


# ---------------------------------------------------------------------------
# metrics


def ate(pairs: MatchedPairs, align: bool = True) -> ErrorSeries:
    """Absolute trajectory error: per-pose residual translation after alignment.

    With align the estimate is first mapped onto the ground truth by the
    least-squares rigid transform; without it the trajectories are compared
    as given. Sample i is the Euclidean distance between ground-truth
    position i and the (aligned) estimated position i; the series carries
    the ground-truth timestamps.
    """
    if align:
        transform = horn_align(pairs).transform
        aligned = pairs.est_translations @ transform.rotation_matrix.T + transform.translation
    else:
        aligned = pairs.est_translations
    diff = aligned - pairs.gt_translations
    values = np.sqrt(np.sum(diff * diff, axis=1))
    return ErrorSeries(pairs.gt_timestamps, values, kind="ate_trans")


def _frames_couples(pairs, delta):
    n = len(pairs)
    d = int(delta)
    if d != delta:
        raise ValueError("frames-mode delta must be an integer, got %r" % delta)
    if d >= n:
        raise EmptyWindowError(
            "delta of %d frames leaves no couples: %d poses spanning %.3f s"
            % (d, n, pairs.gt_timestamps[-1] - pairs.gt_timestamps[0])
        )
    i_idx = np.arange(n - d)
    return i_idx, i_idx + d


def _seconds_couples(pairs, delta):
    t = pairs.gt_timestamps
    n = len(pairs)
    # partner of i: first j with t_j - t_i >= delta, so the measured
    # interval never undershoots the requested one
    j_idx = np.searchsorted(t, t + delta, side="left")
    valid = j_idx < n
    if not np.any(valid):
        raise EmptyWindowError(
            "delta of %g s leaves no couples: %d poses spanning %.3f s"
            % (delta, n, t[-1] - t[0])
        )
    return np.nonzero(valid)[0], j_idx[valid]


def _sampled_couples(pairs, max_samples, seed):
    n = len(pairs)
    if n < 2:
        raise EmptyWindowError("need at least 2 pairs to form a couple, got %d" % n)
    rng = np.random.default_rng(seed)
    d = rng.integers(1, n, size=max_samples)
    i_idx = rng.integers(0, n - d)
    j_idx = i_idx + d
    order = np.lexsort((j_idx, i_idx))
    return i_idx[order], j_idx[order]


def rpe(pairs: MatchedPairs, spec: DeltaSpec) -> tuple:
    """Relative pose error series (translational, rotational) under a DeltaSpec.

    Returns (trans, rot): trans samples in meters, rot samples in radians,
    both stamped with the ground-truth time of the couple's start pose.
    In frames mode a trajectory of n pairs yields exactly n - delta couples.
    """
    if spec.mode == "frames":
        i_idx, j_idx = _frames_couples(pairs, spec.delta)
    elif spec.mode == "seconds":
        i_idx, j_idx = _seconds_couples(pairs, spec.delta)
    else:
        i_idx, j_idx = _sampled_couples(pairs, spec.max_samples, spec.seed)
    trans, rot = _couple_errors(pairs, i_idx, j_idx)
    stamps = pairs.gt_timestamps[i_idx]
    return (
        ErrorSeries(stamps, trans, kind="rpe_trans"),
        ErrorSeries(stamps, rot, kind="rpe_rot"),
    )


def rpe_all_deltas(
    pairs: MatchedPairs,
    max_samples: int = DEFAULT_MAX_SAMPLES,
    seed: int = 0,
) -> tuple:
    """Relative error averaged over all interval lengths.

    For every delta in 1..n-1 the RMSE over its couples is computed and the
    per-delta RMSEs are averaged, separately for translation and rotation.
    Exact when the total couple count n(n-1)/2 fits within max_samples;
    otherwise approximated by drawing max_samples couples (delta uniform,
    then start index uniform) from the seeded generator. Returns
    (trans_rmse, rot_rmse).
    """
    if max_samples <= 0:
        raise ValueError("max_samples must be positive, got %r" % max_samples)
    n = len(pairs)
    if n < 2:
        raise EmptyWindowError("need at least 2 pairs to form a couple, got %d" % n)
    total = n * (n - 1) // 2
    if total <= max_samples:
        trans_rmses = np.empty(n - 1)
        rot_rmses = np.empty(n - 1)
        for d in range(1, n):
            i_idx = np.arange(n - d)
            trans, rot = _couple_errors(pairs, i_idx, i_idx + d)
            trans_rmses[d - 1] = _rmse(trans)
            rot_rmses[d - 1] = _rmse(rot)
        return float(np.mean(trans_rmses)), float(np.mean(rot_rmses))

    rng = np.random.default_rng(seed)
    d = rng.integers(1, n, size=max_samples)
    i_idx = rng.integers(0, n - d)
    trans, rot = _couple_errors(pairs, i_idx, i_idx + d)
    order = np.argsort(d, kind="stable")
    d_sorted = d[order]
    starts = np.nonzero(np.diff(d_sorted, prepend=-1))[0]
    counts = np.diff(starts, append=len(d_sorted))
    trans_sq = np.square(trans[order])
    rot_sq = np.square(rot[order])
    trans_rmses = np.sqrt(np.add.reduceat(trans_sq, starts) / counts)
    rot_rmses = np.sqrt(np.add.reduceat(rot_sq, starts) / counts)
    return float(np.mean(trans_rmses)), float(np.mean(rot_rmses))


def coverage(gt: Trajectory, pairs: MatchedPairs) -> CoverageReport:
    """Coverage of the ground truth by the (matched) estimate.

    A ground-truth timestamp counts as covered when some matched estimate
    timestamp lies within the association threshold of it. temporal_coverage
    weights each timestamp by the stretch of the timeline it owns (midpoint
    to midpoint), so evenly sampled ground truth gives the intuitive
    covered-time fraction. largest_gap is the longest stretch of the
    ground-truth timespan between consecutive covered timestamps (or to the
    span boundaries).
    """
    stamps = gt.timestamps
    n = len(stamps)
    est_stamps = np.sort(pairs.est_timestamps)
    shifted = stamps + pairs.offset
    k = np.searchsorted(est_stamps, shifted)
    nearest = np.full(n, np.inf)
    left_ok = k > 0
    nearest[left_ok] = np.abs(est_stamps[k[left_ok] - 1] - shifted[left_ok])
    right_ok = k < len(est_stamps)
    nearest[right_ok] = np.minimum(
        nearest[right_ok], np.abs(est_stamps[k[right_ok]] - shifted[right_ok])
    )
    covered = nearest <= pairs.max_diff

    matched = n - pairs.unmatched_gt_count
    matched_fraction = float(np.clip(matched / n, 0.0, 1.0))

    span = float(stamps[-1] - stamps[0])
    if span <= 0.0:
        temporal = 1.0 if covered[0] else 0.0
        return CoverageReport(matched_fraction, temporal, 0.0)

    # each timestamp owns the timeline between the midpoints to its neighbors
    mids = 0.5 * (stamps[:-1] + stamps[1:])
    bounds = np.concatenate(([stamps[0]], mids, [stamps[-1]]))
    weights = np.diff(bounds)
    uncovered_time = float(np.sum(weights[~covered]))
    temporal = float(np.clip((span - uncovered_time) / span, 0.0, 1.0))

    covered_stamps = stamps[covered]
    if covered_stamps.size == 0:
        largest_gap = span
    else:
        edge_runs = [covered_stamps[0] - stamps[0], stamps[-1] - covered_stamps[-1]]
        inner = np.diff(covered_stamps)
        largest_gap = float(max(edge_runs + ([inner.max()] if inner.size else [])))
    return CoverageReport(matched_fraction, temporal, min(largest_gap, span))
