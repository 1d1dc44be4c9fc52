import numpy as np
import pytest

from trajeval import (
    DegradationSpec,
    DeltaSpec,
    EmptyTrajectoryError,
    MotionSpec,
    associate,
    ate,
    coverage,
    degrade,
    generate,
    rpe,
)

from oracles import make_pairs


def _arrays(traj):
    return traj.timestamps, traj.translations, traj.quaternions


def test_line_three_poses():
    traj = generate(MotionSpec(shape="line", duration=1.0, rate=2.0, scale=1.0))
    stamps, pos, _ = _arrays(traj)
    assert np.array_equal(stamps, [0.0, 0.5, 1.0])
    assert np.allclose(
        pos, [(0.0, 0.0, 0.0), (0.5, 0.0, 0.0), (1.0, 0.0, 0.0)], atol=1e-15
    )


def test_circle_closes_loop():
    traj = generate(MotionSpec(shape="circle", duration=10.0, rate=10.0, scale=2.0))
    _, pos, quats = _arrays(traj)
    assert np.allclose(pos[0], pos[-1], atol=1e-9)
    assert np.allclose(np.abs(quats[0] @ quats[-1]), 1.0, atol=1e-9)
    radii = np.linalg.norm(pos[:, :2], axis=1)  # centered on the origin
    assert np.allclose(radii, 2.0, atol=1e-9)


def test_figure_eight_deterministic():
    spec = MotionSpec(shape="figure_eight", duration=8.0, rate=25.0, scale=1.5)
    a = generate(spec)
    b = generate(spec)
    assert np.array_equal(a.timestamps, b.timestamps)
    assert np.array_equal(a.translations, b.translations)
    assert np.array_equal(a.quaternions, b.quaternions)
    # the lemniscate crosses its own path at the origin
    center_hits = np.linalg.norm(a.translations, axis=1) < 0.05
    assert center_hits.sum() >= 2


def test_heading_faces_travel_direction():
    traj = generate(MotionSpec(shape="circle", duration=10.0, rate=50.0, scale=1.0))
    pos = traj.translations
    for idx in (10, 100, 250, 400):
        step = pos[idx + 1] - pos[idx - 1]
        step /= np.linalg.norm(step)
        forward = traj[idx].transform.rotation_matrix[:, 0]
        assert float(forward @ step) > 0.999


def test_pose_count_rounding():
    assert len(generate(MotionSpec(shape="line", duration=1.0, rate=30.0))) == 31
    assert len(generate(MotionSpec(shape="line", duration=2.5, rate=2.0))) == 6


def test_motion_spec_validation():
    with pytest.raises(ValueError):
        MotionSpec(shape="spiral", duration=1.0, rate=1.0)
    with pytest.raises(ValueError):
        MotionSpec(shape="line", duration=0.0, rate=1.0)
    with pytest.raises(ValueError):
        MotionSpec(shape="line", duration=1.0, rate=-2.0)


# ---------------------------------------------------------------------------
# degradations


def _base():
    return generate(MotionSpec(shape="circle", duration=20.0, rate=10.0, scale=2.0))


def test_noise_sigma_zero_is_identity():
    base = _base()
    out = degrade(base, DegradationSpec(kind="iid_noise", sigma_trans=0.0, sigma_rot=0.0, seed=1))
    assert np.array_equal(out.timestamps, base.timestamps)
    assert np.array_equal(out.translations, base.translations)
    assert np.array_equal(out.quaternions, base.quaternions)


def test_noise_seed_reproducible():
    base = _base()
    a = degrade(base, DegradationSpec(kind="iid_noise", sigma_trans=0.05, sigma_rot=0.01, seed=7))
    b = degrade(base, DegradationSpec(kind="iid_noise", sigma_trans=0.05, sigma_rot=0.01, seed=7))
    assert np.array_equal(a.translations, b.translations)
    assert np.array_equal(a.quaternions, b.quaternions)
    c = degrade(base, DegradationSpec(kind="iid_noise", sigma_trans=0.05, sigma_rot=0.01, seed=8))
    assert not np.array_equal(a.translations, c.translations)


def test_noise_translation_scale():
    base = _base()
    spread = []
    for seed in range(30):
        out = degrade(base, DegradationSpec(kind="iid_noise", sigma_trans=0.05, seed=seed))
        spread.append(out.translations - base.translations)
    spread = np.concatenate(spread)
    assert abs(spread.std() - 0.05) < 0.002
    assert abs(spread.mean()) < 0.002


def test_noise_sigma_scales_same_draws():
    # same seed, doubled sigma: the very same noise realization, rescaled
    base = _base()
    small = degrade(base, DegradationSpec(kind="iid_noise", sigma_trans=0.01, seed=5))
    large = degrade(base, DegradationSpec(kind="iid_noise", sigma_trans=0.02, seed=5))
    d_small = small.translations - base.translations
    d_large = large.translations - base.translations
    # tolerance is absolute: the differences re-absorb round-off from the
    # base positions (magnitude ~2 m), not from the noise itself
    assert np.allclose(d_large, 2.0 * d_small, rtol=0.0, atol=1e-12)


def test_truncate_keeps_prefix():
    base = _base()
    out = degrade(base, DegradationSpec(kind="truncate", cutoff=10.0))
    assert out.timestamps[-1] <= 10.0 + 1e-12
    n = len(out)
    assert np.array_equal(out.timestamps, base.timestamps[:n])
    assert np.array_equal(out.translations, base.translations[:n])


def test_gap_removes_inclusive_interval():
    base = _base()
    out = degrade(base, DegradationSpec(kind="gap", t0=5.0, t1=8.0))
    assert not np.any((out.timestamps >= 5.0) & (out.timestamps <= 8.0))
    keep = (base.timestamps < 5.0) | (base.timestamps > 8.0)
    assert np.array_equal(out.timestamps, base.timestamps[keep])
    assert np.array_equal(out.translations, base.translations[keep])


def test_gap_then_coverage_reports_hole():
    base = generate(MotionSpec(shape="line", duration=120.0, rate=30.0, scale=50.0))
    est = degrade(base, DegradationSpec(kind="gap", t0=50.0, t1=70.0))
    pairs = associate(base, est)
    report = coverage(base, pairs)
    period = 1.0 / 30.0
    assert abs(report.temporal_coverage - 5.0 / 6.0) <= (period / 120.0) * 1.01
    assert abs(report.largest_gap - 20.0) <= 2.01 * period


def test_degrade_to_nothing_raises():
    base = _base()
    with pytest.raises(EmptyTrajectoryError):
        degrade(base, DegradationSpec(kind="gap", t0=0.0, t1=100.0))
    # truncation can only empty a trajectory that starts after the cutoff
    from oracles import make_trajectory

    late = make_trajectory([5.0, 6.0], [(0.0, 0.0, 0.0)] * 2, [(0.0, 0.0, 0.0, 1.0)] * 2)
    with pytest.raises(EmptyTrajectoryError):
        degrade(late, DegradationSpec(kind="truncate", cutoff=1.0))


def test_degradation_spec_validation():
    with pytest.raises(ValueError):
        DegradationSpec(kind="smear")
    with pytest.raises(ValueError):
        DegradationSpec(kind="iid_noise", sigma_trans=-0.1)
    with pytest.raises(ValueError):
        DegradationSpec(kind="gap", t0=3.0, t1=2.0)
    with pytest.raises(ValueError):
        DegradationSpec(kind="truncate", cutoff=0.0)


def test_label_records_degradation_kind():
    base = _base()
    out = degrade(base, DegradationSpec(kind="truncate", cutoff=10.0))
    assert "truncate" in (out.source_label or "")


# ---------------------------------------------------------------------------
# drift statistics


def _drift_pairs(sigma, seed, duration=20.0, rate=10.0):
    base = generate(MotionSpec(shape="circle", duration=duration, rate=rate, scale=2.0))
    est = degrade(base, DegradationSpec(kind="random_walk_drift", sigma_trans=sigma, seed=seed))
    return make_pairs(base.timestamps, base.translations, base.quaternions,
                      est.translations, est.quaternions)


def test_drift_step_noise_lands_in_band():
    # per-axis sigma 0.01 => expected per-step translation RMSE 0.01 * sqrt(3)
    lo, hi = 0.009 * np.sqrt(3.0), 0.011 * np.sqrt(3.0)
    rmses = []
    for seed in range(50):
        pairs = _drift_pairs(0.01, seed)
        trans, _ = rpe(pairs, DeltaSpec(mode="frames", delta=1))
        rmses.append(trans.stats.rmse)
    mean_rmse = float(np.mean(rmses))
    assert lo < mean_rmse < hi


def test_drift_ate_grows_with_sigma():
    for seed in range(10):
        small = ate(_drift_pairs(0.01, seed), align=True).stats.rmse
        large = ate(_drift_pairs(0.02, seed), align=True).stats.rmse
        assert large > small


def test_drift_accumulates_over_time():
    pairs = _drift_pairs(0.01, seed=3, duration=60.0)
    err = np.linalg.norm(pairs.est_translations - pairs.gt_translations, axis=1)
    n = len(err)
    assert err[0] == 0.0  # the first pose anchors the random walk
    assert err[: n // 4].mean() < err[-n // 4 :].mean()
