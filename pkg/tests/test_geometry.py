import math

import pytest

from vitaslam.geometry import (IDENTITY, Pose, Twist, between, compose, integrate, inverse,
                               inverse_transform_point, transform_point, wrap_angle)


def close(p, q, tol=1e-12):
    return (abs(p.x - q.x) < tol and abs(p.y - q.y) < tol
            and abs(wrap_angle(p.theta - q.theta)) < tol)


@pytest.mark.parametrize("theta, expected", [
    (0.0, 0.0),
    (3 * math.pi, -math.pi),
    (-3.5 * math.pi, 0.5 * math.pi),
    (math.pi, -math.pi),
    (-math.pi, -math.pi),
])
def test_wrap_angle_examples(theta, expected):
    assert wrap_angle(theta) == pytest.approx(expected, abs=1e-12)


def test_wrap_angle_tiny_negative_stays_in_range():
    out = wrap_angle(-1e-17)
    assert -math.pi <= out < math.pi


def test_wrap_angle_rejects_nan():
    with pytest.raises(ValueError):
        wrap_angle(float("nan"))


def test_pose_wraps_theta():
    assert Pose(0, 0, 3 * math.pi).theta == pytest.approx(-math.pi)


def test_pose_rejects_non_finite():
    with pytest.raises(ValueError):
        Pose(float("inf"), 0, 0)


def test_compose_examples():
    p = Pose(1.5, -2.0, 0.3)
    assert close(compose(IDENTITY, p), p)
    assert close(compose(Pose(1, 0, 0), Pose(1, 0, 0)), Pose(2, 0, 0))
    assert close(compose(Pose(0, 0, math.pi / 2), Pose(1, 0, 0)), Pose(0, 1, math.pi / 2))


def test_inverse_and_between():
    a, b = Pose(1, 2, 0.7), Pose(-3, 0.5, -2.9)
    assert close(compose(a, inverse(a)), IDENTITY)
    assert close(compose(a, between(a, b)), b)


@pytest.mark.parametrize("frame, p, expected", [
    (Pose(0, 0, 0), (1, 2), (1, 2)),
    (Pose(0, 0, math.pi / 2), (1, 0), (0, 1)),
    (Pose(3, 4, math.pi), (1, 0), (2, 4)),
])
def test_transform_point_examples(frame, p, expected):
    q = transform_point(frame, p)
    assert q.x == pytest.approx(expected[0], abs=1e-12)
    assert q.y == pytest.approx(expected[1], abs=1e-12)


def test_twist_limits():
    with pytest.raises(ValueError):
        Twist(0.1, math.pi)
    assert close(integrate(Pose(0, 0, 0), Twist(1.0, 0.5)), Pose(1, 0, 0.5))


def test_inverse_transform_point_roundtrip():
    f = Pose(0.3, -1.2, 2.2)
    q = transform_point(f, inverse_transform_point(f, (4.0, 5.0)))
    assert q.x == pytest.approx(4.0, abs=1e-12) and q.y == pytest.approx(5.0, abs=1e-12)
