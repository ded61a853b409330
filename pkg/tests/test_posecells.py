import numpy as np
import pytest

from oracles import circular_mean_cell, dense_attractor_step
from vitaslam.geometry import Pose, Twist, integrate
from vitaslam.posecells import (DegenerateActivity, PoseCellGrid, cell_distance, decode_peak,
                                inject, path_integrate, step_attractor, wrapped_gaussian_bump)


def delta(dims=(21, 21, 36), at=(10, 10, 18)):
    g = PoseCellGrid.empty(dims)
    g.activity[at] = 1.0
    return g


def test_step_delta_stays_symmetric():
    g = step_attractor(delta())
    a = g.activity
    assert np.unravel_index(np.argmax(a), a.shape) == (10, 10, 18)
    assert np.allclose(a[10 - 3:10, 10, 18], a[10 + 3:10:-1, 10, 18])
    assert np.allclose(a[10, 10 - 3:10, 18], a[10, 10 + 3:10:-1, 18])
    assert np.allclose(a[10, 10, 18 - 3:18], a[10, 10, 18 + 3:18:-1])
    assert a.sum() == pytest.approx(1.0, abs=1e-12)


def test_step_uniform_stays_uniform():
    g = PoseCellGrid.empty((5, 6, 7))
    g.activity[:] = 1.0 / g.activity.size
    out = step_attractor(g)
    assert np.ptp(out.activity) < 1e-15


def test_step_matches_dense_oracle():
    dims = (11, 11, 12)
    g = PoseCellGrid.empty(dims)
    g.activity[2, 5, 6] = 0.5
    g.activity[7, 5, 6] = 0.5
    ref = g.activity.copy()
    for _ in range(10):
        g = step_attractor(g)
        ref = dense_attractor_step(ref)
        # separable and dense sums round differently in the last place only
        assert np.max(np.abs(g.activity - ref)) < 1e-15
        assert g.activity.sum() == pytest.approx(1.0, abs=1e-12)


def test_step_degenerate():
    g = PoseCellGrid.empty((4, 4, 4))
    g.activity[:] = 1.0 / 64
    with pytest.raises(DegenerateActivity):
        step_attractor(g, inhibition=1.0)


def test_path_integrate_zero_twist():
    g = step_attractor(delta())
    assert np.array_equal(path_integrate(g, Twist()).activity, g.activity)


def test_path_integrate_one_theta_cell_is_roll():
    g = step_attractor(delta())
    out = path_integrate(g, Twist(0.0, g.cell_size[2]))
    assert np.array_equal(out.activity, np.roll(g.activity, 1, axis=2))


def test_path_integrate_forward_one_cell():
    g = delta(at=(10, 10, 0))
    out = path_integrate(g, Twist(g.cell_size[0], 0.0))
    assert out.activity[11, 10, 0] == pytest.approx(1.0, abs=1e-12)


def test_path_integrate_half_cell_bilinear():
    g = delta(at=(10, 10, 0))
    out = path_integrate(g, Twist(0.5 * g.cell_size[0], 0.0))
    # closed-form linear weights for a 0.5-cell move
    assert out.activity[10, 10, 0] == pytest.approx(0.5, abs=1e-12)
    assert out.activity[11, 10, 0] == pytest.approx(0.5, abs=1e-12)


def test_path_integrate_fractional_weights():
    g = delta(at=(4, 4, 0))
    frac = 0.3
    out = path_integrate(g, Twist(frac * g.cell_size[0], 0.0))
    assert out.activity[4, 4, 0] == pytest.approx(1 - frac, abs=1e-12)
    assert out.activity[5, 4, 0] == pytest.approx(frac, abs=1e-12)


def test_path_integrate_too_far():
    g = delta()
    with pytest.raises(ValueError):
        path_integrate(g, Twist(6.0, 0.0))


def test_inject_zero_energy_noop():
    g = step_attractor(delta())
    assert np.array_equal(inject(g, (3, 3, 3), 0.0).activity, g.activity)


def test_inject_at_peak_sharpens():
    g = step_attractor(delta())
    before = g.activity.max()
    raw = g.activity + 0.02 * wrapped_gaussian_bump(g.dims, (10, 10, 18))
    assert raw.max() > before
    out = inject(g, (10, 10, 18), 0.02)
    assert np.unravel_index(np.argmax(out.activity), g.dims) == (10, 10, 18)


def test_inject_rejects_negative():
    with pytest.raises(ValueError):
        inject(delta(), (0, 0, 0), -1.0)


def test_competing_injection_relocates():
    g = delta(at=(5, 5, 5))
    for _ in range(5):
        g = step_attractor(g)
    target = (12, 10, 20)
    relocated = None
    for step in range(1, 31):
        g = step_attractor(inject(g, target, 0.02))
        if relocated is None and cell_distance(decode_peak(g).cell_coords, target, g.dims) < 1:
            relocated = step
    assert relocated == 13
    assert cell_distance(decode_peak(g).cell_coords, target, g.dims) < 0.01


def test_decode_delta_exact():
    est = decode_peak(delta(at=(3, 4, 5)))
    assert est.cell_coords == (3.0, 4.0, 5.0)


def test_decode_between_cells():
    g = PoseCellGrid.empty()
    g.activity = wrapped_gaussian_bump(g.dims, (3.5, 10, 18))
    assert decode_peak(g).cell_coords[0] == pytest.approx(3.5, abs=1e-6)


def test_decode_across_wrap_matches_circular_mean():
    g = PoseCellGrid.empty()
    g.activity = wrapped_gaussian_bump(g.dims, (20.6, 10, 18))
    x = decode_peak(g).cell_coords[0]
    ref = circular_mean_cell(g.activity.sum(axis=(1, 2)), 21)
    assert min(x, 21 - x) < 1.0
    assert x == pytest.approx(ref, abs=1e-3)


def test_decode_all_zero():
    with pytest.raises(DegenerateActivity):
        decode_peak(PoseCellGrid.empty())


def test_pose_cell_conversion_roundtrip():
    g = PoseCellGrid.empty()
    p = Pose(3.3, 7.1, -2.0)
    q = g.cell_to_pose(g.pose_to_cell(p))
    assert (q.x, q.y, q.theta) == pytest.approx((p.x, p.y, p.theta))


def test_csv_roundtrip(tmp_path):
    g = step_attractor(delta(dims=(5, 4, 6), at=(1, 2, 3)))
    g.to_csv(tmp_path / "g.csv")
    back = PoseCellGrid.from_csv(tmp_path / "g.csv")
    assert np.array_equal(back.activity, g.activity) and back.cell_size == g.cell_size


def test_zero_mean_walk_tracks_odometry():
    rng = np.random.default_rng(0)
    g0 = PoseCellGrid.empty()
    pose = g0.cell_to_pose((10, 10, 2))
    g = PoseCellGrid.at_pose(pose)
    for _ in range(100):
        tw = Twist(rng.normal(0, 0.075), rng.normal(0, 0.1))
        g = step_attractor(path_integrate(g, tw))
        pose = integrate(pose, tw)
        est, truth = decode_peak(g).cell_coords, g.pose_to_cell(pose)
        for u, v, n in zip(est, truth, g.dims):
            d = abs(u - v) % n
            assert min(d, n - d) <= 1.0
