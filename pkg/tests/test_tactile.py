import math

import numpy as np
import pytest

from oracles import pfh_bruteforce
from vitaslam.config import Config
from vitaslam.geometry import Point2, Pose
from vitaslam.simulator import Simulator
from vitaslam.tactile import (NoSurface, TactileTemplate, TactileTemplateStore, WhiskCycleData,
                              compute_pfh, compute_sda, contacts_to_world, estimate_normals,
                              load_templates, match_tactile_template, save_templates,
                              tactile_distance, tactile_features)
from vitaslam.templates import MatchKind


def ring(n=16, r=1.0):
    a = 2 * math.pi * np.arange(n) / n
    return np.column_stack([r * np.cos(a), r * np.sin(a)])


def test_contacts_to_world_examples():
    pts = [Point2(0.2, 0.0), Point2(-1.0, 3.0)]
    assert contacts_to_world(pts, Pose()) == pts
    q = contacts_to_world([(0.2, 0.0)], Pose(1, 1, 0))[0]
    assert (q.x, q.y) == pytest.approx((1.2, 1.0))
    q = contacts_to_world([(0.2, 0.0)], Pose(0, 0, math.pi / 2))[0]
    assert (q.x, q.y) == pytest.approx((0.0, 0.2), abs=1e-12)


def test_normals_on_line_face_head():
    pts = np.column_stack([np.linspace(-1, 1, 7), np.zeros(7)])
    nrm = estimate_normals(pts, k=3, head=(0, 1))
    assert np.allclose(nrm, [[0, 1]] * 7, atol=1e-12)


def test_normals_on_ring_point_inward():
    pts = ring(16)
    nrm = estimate_normals(pts, k=3, head=(0, 0))
    inward = -pts / np.linalg.norm(pts, axis=1, keepdims=True)
    err = np.arccos(np.clip((nrm * inward).sum(axis=1), -1, 1))
    assert err.max() < 1e-6


def test_normals_two_points_perpendicular():
    pts = np.array([[0.0, 0.0], [1.0, 2.0]])
    nrm = estimate_normals(pts, head=(5, -5))
    seg = pts[1] - pts[0]
    assert np.allclose(nrm @ seg, 0, atol=1e-12)


def test_normals_need_two_points():
    with pytest.raises(NoSurface):
        estimate_normals([[0.0, 0.0]])


def test_pfh_two_point_example():
    pts = np.array([[0.0, 0.0], [0.3, 0.0]])
    nrm = np.array([[0.0, 1.0], [0.0, 1.0]])
    h = compute_pfh(pts, nrm, 5)
    # f1 = 0 -> bin 0, f2 = pi/2 -> bin 2, f3 = 1 -> last bin
    expected = np.zeros(125)
    expected[(0 * 5 + 2) * 5 + 4] = 1.0
    assert np.array_equal(h, expected)


def test_pfh_unit_sum_and_empty():
    rng = np.random.default_rng(0)
    pts = rng.uniform(size=(9, 2))
    h = compute_pfh(pts, estimate_normals(pts), 5)
    assert h.min() >= 0 and h.sum() == pytest.approx(1.0)
    assert not compute_pfh(pts[:1], np.array([[1.0, 0.0]])).any()


def test_pfh_ring_matches_oracle():
    pts = ring(16)
    nrm = -pts
    assert np.array_equal(compute_pfh(pts, nrm, 5), pfh_bruteforce(pts, nrm, 5))


def test_pfh_relabeling_invariant():
    rng = np.random.default_rng(4)
    pts = rng.uniform(-1, 1, size=(12, 2))
    nrm = estimate_normals(pts, head=(0, 0))
    perm = rng.permutation(12)
    assert np.array_equal(compute_pfh(pts, nrm), compute_pfh(pts[perm], nrm[perm]))


@pytest.mark.parametrize("defl, expected", [
    ([0.0] * 24, [0.0] * 24),
    ([0.0] * 5 + [0.3] + [0.0] * 18, [0.0] * 5 + [1.0] + [0.0] * 18),
    ([0.1, 0.2, 0.4] + [0.0] * 21, [0.25, 0.5, 1.0] + [0.0] * 21),
])
def test_sda_examples(defl, expected):
    assert np.allclose(compute_sda(defl), expected)


def test_sda_scale_invariant():
    rng = np.random.default_rng(6)
    d = rng.uniform(0, 0.5, size=24)
    assert np.allclose(compute_sda(d), compute_sda(3.7 * d))


def test_sda_rejects_negative():
    with pytest.raises(ValueError):
        compute_sda([-0.1] + [0.0] * 23)


def _tmpl(i, rng):
    pfh = rng.uniform(size=125)
    return TactileTemplate(i, pfh / pfh.sum(), rng.uniform(size=24))


def test_match_examples():
    rng = np.random.default_rng(8)
    store = [_tmpl(i, rng) for i in range(3)]
    r = match_tactile_template(store[1], store)
    assert (r.kind, r.id, r.distance) == (MatchKind.MATCHED, 1, 0.0)
    empty = TactileTemplate(0, np.zeros(125), np.zeros(24))
    assert match_tactile_template(empty, store).kind is MatchKind.NO_CONTACT


def test_match_rejects_bad_weights():
    rng = np.random.default_rng(9)
    t = _tmpl(0, rng)
    with pytest.raises(ValueError):
        match_tactile_template(t, [t], w_pfh=0.7, w_sda=0.4)


def test_distance_axioms():
    rng = np.random.default_rng(10)
    a, b = _tmpl(0, rng), _tmpl(1, rng)
    assert tactile_distance(a, a) == 0
    assert tactile_distance(a, b) == tactile_distance(b, a)
    assert 0 <= tactile_distance(a, b) <= 1


def test_store_never_keeps_no_contact():
    store = TactileTemplateStore()
    r = store.observe(np.zeros(125), np.zeros(24), (0, 0, 0))
    assert r.kind is MatchKind.NO_CONTACT and len(store) == 0


def test_whisk_data_validation():
    with pytest.raises(ValueError):
        WhiskCycleData([], np.zeros(10))
    with pytest.raises(ValueError):
        WhiskCycleData([(3, Point2(0.1, 0.0))], np.zeros(24))


def test_template_file_roundtrip(tmp_path):
    rng = np.random.default_rng(12)
    ts = [_tmpl(i, rng) for i in range(3)]
    save_templates(ts, tmp_path / "t.jsonl")
    back = load_templates(tmp_path / "t.jsonl")
    assert all(np.array_equal(a.pfh, b.pfh) and np.array_equal(a.sda, b.sda)
               for a, b in zip(ts, back))


def test_cylinder_and_cube_templates_distinguished():
    # pull the second orbit in so the whiskers reach the cube faces
    cfg = Config().replace(orbit2_radius=0.56)
    sim = Simulator(cfg, 42)
    epochs = {"orbit_1": [], "orbit_2": [], "orbit_1b": []}
    for k, phase in enumerate(sim.script.phases):
        if phase not in epochs:
            continue
        f = sim.frame(k)
        # a single contact carries no shape, only which whisker touched
        if len(f.whisk.contacts_head) < 2:
            continue
        pfh, sda = tactile_features(f.whisk, f.truth)
        epochs[phase].append((k, pfh, sda))
    cyl, cube = epochs["orbit_1"], epochs["orbit_2"]
    assert cyl and cube and epochs["orbit_1b"]
    store = [TactileTemplate(i, p, s) for i, (_, p, s) in enumerate(cyl + cube)]
    print("\nrevisit cycle  nearest cylinder  nearest cube")
    for k, pfh, sda in epochs["orbit_1b"]:
        fresh = TactileTemplate(-1, pfh, sda)
        d = [tactile_distance(fresh, t) for t in store]
        d_cyl, d_cube = min(d[:len(cyl)]), min(d[len(cyl):])
        print(f"{k:>13}  {d_cyl:16.4f}  {d_cube:12.4f}")
        assert d_cyl < d_cube
        r = match_tactile_template(fresh, store, threshold=1.0)
        assert r.is_matched and r.id < len(cyl)
