"""Planar poses, frame transforms and angle arithmetic.

Convention: right-handed, theta = 0 along +x, angles wrapped to [-pi, pi).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

TWO_PI = 2.0 * math.pi


def wrap_angle(theta: float) -> float:
    """Wrap an angle to [-pi, pi)."""
    if not math.isfinite(theta):
        raise ValueError(f"non-finite angle: {theta!r}")
    out = (theta + math.pi) % TWO_PI - math.pi
    # float modulo can land exactly on +pi for tiny negative inputs
    if out >= math.pi:
        out -= TWO_PI
    return out


class Point2(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class Pose:
    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite pose: {self!r}")
        # plain floats keep repr() and JSON output free of numpy scalar types
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "theta", float(wrap_angle(self.theta)))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.theta)


@dataclass(frozen=True)
class Twist:
    """Per-cycle motion: drive ``dforward`` along the heading, then turn ``dtheta``."""

    dforward: float = 0.0
    dtheta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.dforward) and math.isfinite(self.dtheta)):
            raise ValueError(f"non-finite twist: {self!r}")
        if abs(self.dtheta) >= math.pi:
            raise ValueError(f"|dtheta| must be < pi per step, got {self.dtheta}")

    def as_pose(self) -> Pose:
        return Pose(self.dforward, 0.0, self.dtheta)


IDENTITY = Pose(0.0, 0.0, 0.0)


def compose(a: Pose, b: Pose) -> Pose:
    """SE(2) composition: ``b`` expressed in ``a``'s frame, chained onto ``a``."""
    c, s = math.cos(a.theta), math.sin(a.theta)
    return Pose(a.x + c * b.x - s * b.y, a.y + s * b.x + c * b.y, a.theta + b.theta)


def inverse(a: Pose) -> Pose:
    c, s = math.cos(a.theta), math.sin(a.theta)
    return Pose(-c * a.x - s * a.y, s * a.x - c * a.y, -a.theta)


def between(a: Pose, b: Pose) -> Pose:
    """Relative pose of ``b`` seen from ``a``, i.e. ``inverse(a) o b``."""
    c, s = math.cos(a.theta), math.sin(a.theta)
    dx, dy = b.x - a.x, b.y - a.y
    return Pose(c * dx + s * dy, -s * dx + c * dy, b.theta - a.theta)


def integrate(pose: Pose, twist: Twist) -> Pose:
    return compose(pose, twist.as_pose())


def transform_point(frame: Pose, p_local) -> Point2:
    c, s = math.cos(frame.theta), math.sin(frame.theta)
    x, y = p_local
    return Point2(frame.x + c * x - s * y, frame.y + s * x + c * y)


def inverse_transform_point(frame: Pose, p_world) -> Point2:
    c, s = math.cos(frame.theta), math.sin(frame.theta)
    dx, dy = p_world[0] - frame.x, p_world[1] - frame.y
    return Point2(c * dx + s * dy, -s * dx + c * dy)
