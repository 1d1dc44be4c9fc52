import numpy as np
import pytest

from trajeval import (
    DeltaSpec,
    EmptyWindowError,
    ErrorSeries,
    associate,
    ate,
    coverage,
    rpe,
    rpe_all_deltas,
    summarize,
)
from trajeval.geometry import (
    inverse,
    relative,
    rotation_angle,
    translation_norm,
)

from oracles import (
    brute_rpe_all_deltas,
    brute_rpe_frames,
    make_pairs,
    make_trajectory,
    noisy_instance,
    pose_matrices,
    random_rotation_matrix,
)


def _self_pairs(rng, n=50):
    stamps, gt_t, gt_q, _, _ = noisy_instance(rng, n)
    return make_pairs(stamps, gt_t, gt_q, gt_t, gt_q)


def _noisy_pairs(rng, n=50, **kwargs):
    stamps, gt_t, gt_q, est_t, est_q = noisy_instance(rng, n, **kwargs)
    return make_pairs(stamps, gt_t, gt_q, est_t, est_q)


# ---------------------------------------------------------------------------
# summarize


def test_summarize_zeros():
    stats = summarize([0.0, 0.0, 0.0])
    for name in ("rmse", "mean", "median", "std", "min", "max"):
        assert getattr(stats, name) == 0.0


def test_summarize_closed_form_pair():
    stats = summarize([3.0, 4.0])
    assert stats.rmse == pytest.approx(np.sqrt(12.5), abs=1e-15)
    assert stats.mean == 3.5
    assert stats.median == 3.5
    assert stats.std == 0.5
    assert stats.min == 3.0
    assert stats.max == 4.0


def test_summarize_matches_streaming_oracle():
    rng = np.random.default_rng(100)
    values = rng.uniform(0.0, 2.0, size=1000)
    stats = summarize(values)
    # independent streaming pass (Welford) plus order statistics
    count, mean, m2, sq_sum = 0, 0.0, 0.0, 0.0
    lo, hi = np.inf, -np.inf
    for v in values:
        count += 1
        delta = v - mean
        mean += delta / count
        m2 += delta * (v - mean)
        sq_sum += v * v
        lo, hi = min(lo, v), max(hi, v)
    ordered = np.sort(values)
    median = 0.5 * (ordered[499] + ordered[500])
    assert abs(stats.mean - mean) < 1e-12
    assert abs(stats.std - np.sqrt(m2 / count)) < 1e-12
    assert abs(stats.rmse - np.sqrt(sq_sum / count)) < 1e-12
    assert abs(stats.median - median) < 1e-12
    assert stats.min == lo
    assert stats.max == hi


def test_summarize_empty_raises():
    with pytest.raises(ValueError):
        summarize([])


def test_error_series_validation():
    with pytest.raises(ValueError):
        ErrorSeries([0.0], [-1.0], kind="ate_trans")
    with pytest.raises(ValueError):
        ErrorSeries([0.0], [np.inf], kind="ate_trans")
    with pytest.raises(ValueError):
        ErrorSeries([], [], kind="ate_trans")
    with pytest.raises(ValueError):
        ErrorSeries([0.0], [1.0], kind="bogus")
    series = ErrorSeries([0.0, 1.0], [1.0, 2.0], kind="rpe_trans")
    assert series.stats.mean == 1.5


def test_delta_spec_validation():
    with pytest.raises(ValueError):
        DeltaSpec(mode="weekly")
    with pytest.raises(ValueError):
        DeltaSpec(mode="frames", delta=0.0)
    with pytest.raises(ValueError):
        DeltaSpec(mode="all_sampled", max_samples=0)
    DeltaSpec(mode="all_sampled", delta=-1.0)  # delta is ignored in this mode


# ---------------------------------------------------------------------------
# ATE


def test_ate_self_is_zero():
    rng = np.random.default_rng(200)
    pairs = _self_pairs(rng)
    unaligned = ate(pairs, align=False)
    assert unaligned.stats.max == 0.0
    aligned = ate(pairs, align=True)
    assert aligned.stats.rmse < 1e-12


def test_ate_alignment_absorbs_rigid_transform():
    rng = np.random.default_rng(201)
    stamps, gt_t, gt_q, _, _ = noisy_instance(rng, 80)
    g_rot = random_rotation_matrix(rng)
    g_trans = rng.uniform(-2.0, 2.0, size=3)
    est_t = gt_t @ g_rot.T + g_trans
    pairs = make_pairs(stamps, gt_t, gt_q, est_t, gt_q)
    assert ate(pairs, align=True).stats.rmse < 1e-9


def test_ate_three_pair_frozen_oracle():
    # computed by an independent SVD alignment + residual evaluation
    stamps = [0.0, 1.0, 2.0]
    gt = [(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (2.0, 0.0, 0.0)]
    est = [(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (2.0, 0.0, 1.0)]
    quats = [(0.0, 0.0, 0.0, 1.0)] * 3
    pairs = make_pairs(stamps, gt, quats, est, quats)
    assert ate(pairs, align=True).stats.rmse == pytest.approx(
        0.25464400750007005, abs=1e-9
    )


def test_ate_invariance_under_estimate_motion():
    rng = np.random.default_rng(202)
    for _ in range(10):
        pairs = _noisy_pairs(rng, 60)
        base = ate(pairs, align=True).stats.rmse
        g_rot = random_rotation_matrix(rng)
        g_trans = rng.uniform(-5.0, 5.0, size=3)
        moved_t = pairs.est_translations @ g_rot.T + g_trans
        moved = make_pairs(
            pairs.gt_timestamps,
            pairs.gt_translations,
            pairs.gt_quaternions,
            moved_t,
            pairs.est_quaternions,
        )
        assert abs(ate(moved, align=True).stats.rmse - base) < 1e-9


def test_ate_series_carries_gt_timestamps():
    rng = np.random.default_rng(203)
    pairs = _noisy_pairs(rng, 30)
    series = ate(pairs, align=False)
    assert np.array_equal(series.timestamps, pairs.gt_timestamps)
    assert series.kind == "ate_trans"


# ---------------------------------------------------------------------------
# RPE


def test_rpe_self_is_exactly_zero():
    rng = np.random.default_rng(300)
    pairs = _self_pairs(rng)
    trans, rot = rpe(pairs, DeltaSpec(mode="frames", delta=1))
    assert trans.stats.max == 0.0
    assert rot.stats.max == 0.0


def test_rpe_single_displaced_pose_delta_one():
    # a single displaced pose corrupts exactly the two adjacent relative motions
    n = 8
    stamps = 0.1 * np.arange(n)
    gt = np.column_stack([np.arange(n, dtype=float), np.zeros(n), np.zeros(n)])
    est = gt.copy()
    est[4, 0] += 0.1
    quats = [(0.0, 0.0, 0.0, 1.0)] * n
    pairs = make_pairs(stamps, gt, quats, est, quats)
    trans, rot = rpe(pairs, DeltaSpec(mode="frames", delta=1))
    nonzero = trans.values[trans.values > 0.0]
    assert len(trans) == n - 1
    assert len(nonzero) == 2
    assert np.allclose(nonzero, [0.1, 0.1], atol=1e-12)
    assert rot.stats.max == 0.0


def test_rpe_frames_matches_brute_force_oracle_every_delta():
    rng = np.random.default_rng(301)
    for _ in range(20):
        stamps, gt_t, gt_q, est_t, est_q = noisy_instance(rng, 5)
        pairs = make_pairs(stamps, gt_t, gt_q, est_t, est_q)
        gt_mats = pose_matrices(gt_t, gt_q)
        est_mats = pose_matrices(est_t, est_q)
        for delta in (1, 2, 3, 4):
            trans, rot = rpe(pairs, DeltaSpec(mode="frames", delta=delta))
            oracle_trans, oracle_rot = brute_rpe_frames(gt_mats, est_mats, delta)
            assert np.allclose(trans.values, oracle_trans, atol=1e-12)
            assert np.allclose(rot.values, oracle_rot, atol=1e-12)


def test_rpe_couple_count_law():
    rng = np.random.default_rng(302)
    pairs = _noisy_pairs(rng, 40)
    for delta in (1, 2, 5, 39):
        trans, _ = rpe(pairs, DeltaSpec(mode="frames", delta=delta))
        assert len(trans) == 40 - delta


def test_rpe_frames_rejects_non_integer_and_empty_window():
    rng = np.random.default_rng(303)
    pairs = _noisy_pairs(rng, 10)
    with pytest.raises(ValueError):
        rpe(pairs, DeltaSpec(mode="frames", delta=1.5))
    with pytest.raises(EmptyWindowError) as err:
        rpe(pairs, DeltaSpec(mode="frames", delta=10))
    assert "10" in str(err.value)  # names the delta
    assert "0.9" in str(err.value)  # and the trajectory span


def test_rpe_seconds_mode_partner_selection():
    rng = np.random.default_rng(304)
    pairs = _noisy_pairs(rng, 30)  # stamps at 0.1 s spacing
    trans, _ = rpe(pairs, DeltaSpec(mode="seconds", delta=0.5))
    t = pairs.gt_timestamps
    expected = []
    for i in range(len(t)):
        for j in range(i + 1, len(t)):
            if t[j] - t[i] >= 0.5:
                expected.append((i, j))
                break
    assert len(trans) == len(expected)
    # first partner never undershoots the requested interval
    assert len(trans) == np.sum(t + 0.5 <= t[-1] + 1e-12)


def test_rpe_seconds_empty_window():
    rng = np.random.default_rng(305)
    pairs = _noisy_pairs(rng, 10)
    with pytest.raises(EmptyWindowError):
        rpe(pairs, DeltaSpec(mode="seconds", delta=100.0))


def test_rpe_all_sampled_deterministic():
    rng = np.random.default_rng(306)
    pairs = _noisy_pairs(rng, 120)
    spec = DeltaSpec(mode="all_sampled", max_samples=500, seed=9)
    t1, r1 = rpe(pairs, spec)
    t2, r2 = rpe(pairs, spec)
    assert np.array_equal(t1.values, t2.values)
    assert np.array_equal(r1.values, r2.values)
    t3, _ = rpe(pairs, DeltaSpec(mode="all_sampled", max_samples=500, seed=10))
    assert not np.array_equal(t1.values, t3.values)


def test_rpe_inversion_equivalence():
    # error magnitudes are unchanged by inverting the error transform,
    # which is exactly the difference between the two published forms
    rng = np.random.default_rng(307)
    for _ in range(25):
        pairs = _noisy_pairs(rng, 8)
        trans, rot = rpe(pairs, DeltaSpec(mode="frames", delta=2))
        plain, flipped = [], []
        for i in range(len(pairs) - 2):
            rel_gt = relative(pairs.pairs[i][0].transform, pairs.pairs[i + 2][0].transform)
            rel_est = relative(pairs.pairs[i][1].transform, pairs.pairs[i + 2][1].transform)
            err = relative(rel_gt, rel_est)
            plain.append((translation_norm(err), rotation_angle(err)))
            inv_err = inverse(err)
            flipped.append((translation_norm(inv_err), rotation_angle(inv_err)))
        plain = np.array(plain)
        flipped = np.array(flipped)
        assert np.allclose(plain, flipped, atol=1e-12)
        assert np.allclose(trans.values, plain[:, 0], atol=1e-12)
        assert np.allclose(rot.values, plain[:, 1], atol=1e-12)


def test_rmse_at_least_mean():
    rng = np.random.default_rng(308)
    for _ in range(10):
        pairs = _noisy_pairs(rng, 30)
        for series in rpe(pairs, DeltaSpec(mode="frames", delta=1)):
            assert series.stats.rmse >= series.stats.mean >= 0.0


# ---------------------------------------------------------------------------
# rpe_all_deltas


def test_all_deltas_self_is_zero():
    rng = np.random.default_rng(400)
    pairs = _self_pairs(rng, 20)
    assert rpe_all_deltas(pairs) == (0.0, 0.0)


def test_all_deltas_exact_matches_brute_force():
    rng = np.random.default_rng(401)
    stamps, gt_t, gt_q, est_t, est_q = noisy_instance(rng, 6)
    pairs = make_pairs(stamps, gt_t, gt_q, est_t, est_q)
    got = rpe_all_deltas(pairs)  # 15 couples, exact branch
    expected = brute_rpe_all_deltas(pose_matrices(gt_t, gt_q), pose_matrices(est_t, est_q))
    assert got[0] == pytest.approx(expected[0], abs=1e-12)
    assert got[1] == pytest.approx(expected[1], abs=1e-12)


def test_all_deltas_exact_branch_bit_identical_to_per_delta_rmse():
    rng = np.random.default_rng(402)
    pairs = _noisy_pairs(rng, 40)  # 780 couples <= default budget
    got_trans, got_rot = rpe_all_deltas(pairs)
    trans_rmses, rot_rmses = [], []
    for delta in range(1, 40):
        trans, rot = rpe(pairs, DeltaSpec(mode="frames", delta=delta))
        trans_rmses.append(trans.stats.rmse)
        rot_rmses.append(rot.stats.rmse)
    assert got_trans == float(np.mean(np.array(trans_rmses)))
    assert got_rot == float(np.mean(np.array(rot_rmses)))


def test_all_deltas_sampled_deterministic_and_plausible():
    rng = np.random.default_rng(403)
    pairs = _noisy_pairs(rng, 300)  # 44850 couples > default budget
    a = rpe_all_deltas(pairs, max_samples=5000, seed=3)
    b = rpe_all_deltas(pairs, max_samples=5000, seed=3)
    assert a == b
    exact = rpe_all_deltas(pairs, max_samples=50000, seed=3)  # forces exact branch
    assert abs(a[0] - exact[0]) / exact[0] < 0.15
    assert abs(a[1] - exact[1]) / exact[1] < 0.15


def test_all_deltas_needs_two_pairs():
    stamps = [0.0]
    quats = [(0.0, 0.0, 0.0, 1.0)]
    pairs = make_pairs(stamps, [(0.0, 0.0, 0.0)], quats, [(0.0, 0.0, 0.0)], quats)
    with pytest.raises(EmptyWindowError):
        rpe_all_deltas(pairs)
    with pytest.raises(ValueError):
        rpe_all_deltas(pairs, max_samples=0)


# ---------------------------------------------------------------------------
# coverage


def _line_traj(stamps, speed=1.0):
    stamps = np.asarray(stamps, dtype=float)
    pos = np.column_stack([speed * stamps, np.zeros(len(stamps)), np.zeros(len(stamps))])
    return make_trajectory(stamps, pos, [(0.0, 0.0, 0.0, 1.0)] * len(stamps))


def test_coverage_complete():
    gt = _line_traj(np.arange(0.0, 10.01, 0.1))
    pairs = associate(gt, gt)
    report = coverage(gt, pairs)
    assert report.matched_fraction == 1.0
    assert report.temporal_coverage == 1.0
    assert report.largest_gap <= 0.1 + 1e-12


def test_coverage_truncated_estimate():
    stamps = np.arange(0.0, 100.01, 0.1)
    gt = _line_traj(stamps)
    est = _line_traj(stamps[stamps <= 50.0])
    pairs = associate(gt, est)
    report = coverage(gt, pairs)
    frame = 0.1
    assert abs(report.matched_fraction - 0.5) < 0.01
    assert abs(report.temporal_coverage - 0.5) <= (frame / 100.0) * 1.01
    assert abs(report.largest_gap - 50.0) <= 2.01 * frame


def test_coverage_kidnap_gap():
    rate = 30.0
    stamps = np.arange(0.0, 120.0 + 1e-9, 1.0 / rate)
    gt = _line_traj(stamps)
    keep = (stamps < 50.0) | (stamps > 70.0)
    est = _line_traj(stamps[keep])
    pairs = associate(gt, est)
    report = coverage(gt, pairs)
    period = 1.0 / rate
    span = 120.0
    assert abs(report.temporal_coverage - 100.0 / 120.0) <= (period / span) * 1.01
    assert abs(report.largest_gap - 20.0) <= 2.01 * period


def test_coverage_single_pose_gt():
    gt = _line_traj([0.0])
    pairs = associate(gt, gt)
    report = coverage(gt, pairs)
    assert report.matched_fraction == 1.0
    assert report.temporal_coverage == 1.0
    assert report.largest_gap == 0.0
