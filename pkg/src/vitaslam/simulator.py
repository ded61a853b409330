"""Desk-scale 2-D stand-in for a whiskered camera robot.

A rectangular arena with a bright cylinder and a dark cube, a ray-cast
camera, a 24-whisker array whisked once per cycle with contact-triggered
cessation of protraction, a scripted orbit trajectory and noisy odometry.
Every output is a pure function of (config, seed, cycle).
"""
from __future__ import annotations

import base64
import json
import math
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .config import Config
from .geometry import Point2, Pose, Twist, integrate, inverse_transform_point, wrap_angle
from .tactile import N_WHISKERS, WhiskCycleData
from .visual import RgbImage

# surface kinds returned by the ray caster
NOTHING, WALL, CYLINDER, CUBE = 0, 1, 2, 3


class OutsideArena(ValueError):
    pass


class ScriptEnded(IndexError):
    pass


class LogParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


# world ----------------------------------------------------------------------

@dataclass(frozen=True)
class Cylinder:
    x: float
    y: float
    radius: float
    shade: float


@dataclass(frozen=True)
class Cube:
    x: float
    y: float
    half: float
    shade: float


@dataclass(frozen=True)
class World:
    width: float
    height: float
    cylinder: Cylinder
    cube: Cube
    wall_shade: float = 0.5
    wall_contrast: float = 0.03
    wall_period: float = 0.7

    def __post_init__(self):
        c, b = self.cylinder, self.cube
        if not (c.radius < c.x < self.width - c.radius and c.radius < c.y < self.height - c.radius):
            raise ValueError("cylinder must lie strictly inside the arena")
        if not (b.half < b.x < self.width - b.half and b.half < b.y < self.height - b.half):
            raise ValueError("cube must lie strictly inside the arena")
        dx = max(abs(c.x - b.x) - b.half, 0.0)
        dy = max(abs(c.y - b.y) - b.half, 0.0)
        if math.hypot(dx, dy) <= c.radius:
            raise ValueError("landmarks overlap")

    @classmethod
    def from_config(cls, cfg: Config) -> "World":
        return cls(cfg.arena_width, cfg.arena_height,
                   Cylinder(cfg.cylinder_x, cfg.cylinder_y, cfg.cylinder_radius, cfg.cylinder_shade),
                   Cube(cfg.cube_x, cfg.cube_y, cfg.cube_half, cfg.cube_shade),
                   cfg.wall_shade, cfg.wall_contrast, cfg.wall_period)

    def inside(self, x: float, y: float) -> bool:
        return 0.0 < x < self.width and 0.0 < y < self.height

    def wall_texture(self, x: float, y: float) -> float:
        """Low-contrast periodic shade; the coordinate along the wall drives it."""
        along = x if min(y, self.height - y) < min(x, self.width - x) else y
        return self.wall_shade + self.wall_contrast * math.sin(2 * math.pi * along / self.wall_period)

    def surface_distance(self, x: float, y: float) -> float:
        """Distance from a point to the nearest surface of any object."""
        c, b = self.cylinder, self.cube
        d_cyl = abs(math.hypot(x - c.x, y - c.y) - c.radius)
        d_cube = _box_boundary_distance(x - b.x, y - b.y, b.half)
        d_wall = _box_boundary_distance(x - self.width / 2, y - self.height / 2,
                                        self.width / 2, self.height / 2)
        return min(d_cyl, d_cube, d_wall)

    def landmark_clearance(self, x: float, y: float) -> float:
        c, b = self.cylinder, self.cube
        d_cyl = math.hypot(x - c.x, y - c.y) - c.radius
        dx = max(abs(x - b.x) - b.half, 0.0)
        dy = max(abs(y - b.y) - b.half, 0.0)
        return min(d_cyl, math.hypot(dx, dy))

    def cast(self, ox: float, oy: float, dx: float, dy: float) -> tuple[float, int]:
        """First hit along a unit-direction ray from inside the arena."""
        best_t, kind = _ray_box_exit(ox, oy, dx, dy, self.width, self.height), WALL
        t = _ray_circle(ox, oy, dx, dy, self.cylinder.x, self.cylinder.y, self.cylinder.radius)
        if t is not None and t < best_t:
            best_t, kind = t, CYLINDER
        b = self.cube
        t = _ray_box_enter(ox, oy, dx, dy, b.x - b.half, b.y - b.half, b.x + b.half, b.y + b.half)
        if t is not None and t < best_t:
            best_t, kind = t, CUBE
        return best_t, kind


def _box_boundary_distance(px: float, py: float, hx: float, hy: float | None = None) -> float:
    hy = hx if hy is None else hy
    qx, qy = abs(px) - hx, abs(py) - hy
    outside = math.hypot(max(qx, 0.0), max(qy, 0.0))
    inside = min(max(qx, qy), 0.0)
    return abs(outside + inside)


def _ray_circle(ox, oy, dx, dy, cx, cy, r) -> Optional[float]:
    fx, fy = ox - cx, oy - cy
    b = fx * dx + fy * dy
    c = fx * fx + fy * fy - r * r
    disc = b * b - c
    if disc < 0:
        return None
    t = -b - math.sqrt(disc)
    if t < 0:
        return None if c > 0 else 0.0
    return t


def _ray_box_enter(ox, oy, dx, dy, x0, y0, x1, y1) -> Optional[float]:
    t_near, t_far = -math.inf, math.inf
    for o, d, lo, hi in ((ox, dx, x0, x1), (oy, dy, y0, y1)):
        if d == 0.0:
            if not lo <= o <= hi:
                return None
            continue
        ta, tb = (lo - o) / d, (hi - o) / d
        if ta > tb:
            ta, tb = tb, ta
        t_near, t_far = max(t_near, ta), min(t_far, tb)
    if t_near > t_far or t_far < 0:
        return None
    return max(t_near, 0.0)


def _ray_box_exit(ox, oy, dx, dy, width, height) -> float:
    t = math.inf
    if dx > 0:
        t = min(t, (width - ox) / dx)
    elif dx < 0:
        t = min(t, -ox / dx)
    if dy > 0:
        t = min(t, (height - oy) / dy)
    elif dy < 0:
        t = min(t, -oy / dy)
    return t


# camera ---------------------------------------------------------------------

def cast_columns(world: World, pose: Pose, width: int, fov_deg: float = 90.0):
    """Hit distance and surface kind for each image column, left to right."""
    half = math.radians(fov_deg) / 2
    offsets = half - (np.arange(width) + 0.5) * (2 * half / width)
    dists = np.empty(width)
    kinds = np.empty(width, dtype=int)
    for i, off in enumerate(offsets):
        a = pose.theta + off
        dists[i], kinds[i] = world.cast(pose.x, pose.y, math.cos(a), math.sin(a))
    return dists, kinds, offsets


def _shade_to_rgb(shade: np.ndarray, kinds: np.ndarray) -> np.ndarray:
    # slight tints so the grey conversion has something to do
    tint = np.array([[1.0, 1.0, 1.0],   # background
                     [1.0, 0.98, 0.95],  # wall
                     [1.0, 0.97, 0.9],   # cylinder
                     [0.9, 0.95, 1.05]])  # cube
    return shade[..., None] * tint[kinds]


def render_camera(world: World, head_pose: Pose, width: int = 64, height: int = 32,
                  cfg: Config | None = None, rng: np.random.Generator | None = None) -> RgbImage:
    """Flat 2.5-D render: one ray per column, rows show the hit object as a
    band whose height falls off with distance; contrast fades with distance.
    Pixel noise is added only when ``rng`` is given."""
    cfg = cfg or Config()
    if not world.inside(head_pose.x, head_pose.y):
        raise OutsideArena(f"head pose {head_pose} outside the arena")
    dists, kinds, offsets = cast_columns(world, head_pose, width, cfg.camera_fov_deg)
    xs = head_pose.x + dists * np.cos(head_pose.theta + offsets)
    ys = head_pose.y + dists * np.sin(head_pose.theta + offsets)
    shade = np.empty(width)
    obj_height = np.empty(width)
    for i, k in enumerate(kinds):
        if k == CYLINDER:
            shade[i], obj_height[i] = world.cylinder.shade, cfg.landmark_height
        elif k == CUBE:
            shade[i], obj_height[i] = world.cube.shade, cfg.landmark_height
        else:
            shade[i], obj_height[i] = world.wall_texture(xs[i], ys[i]), cfg.wall_height
    bg = cfg.background_shade
    shade = bg + (shade - bg) * np.exp(-dists / cfg.camera_fog)

    focal = (width / 2) / math.tan(math.radians(cfg.camera_fov_deg) / 2)
    depth = np.maximum(dists * np.cos(offsets), 1e-6)
    half_rows = focal * (obj_height / 2) / depth
    row_off = np.abs(np.arange(height) + 0.5 - height / 2)
    covered = row_off[:, None] <= half_rows[None, :]
    gray = np.where(covered, shade[None, :], bg)
    row_kinds = np.where(covered, kinds[None, :], 0)
    rgb = _shade_to_rgb(gray, row_kinds)
    if rng is not None and cfg.camera_noise > 0:
        rgb = rgb + rng.normal(0.0, cfg.camera_noise, size=rgb.shape)
    pixels = np.clip(np.round(rgb * 255), 0, 255).astype(np.uint8)
    return RgbImage(width, height, pixels)


# whiskers ---------------------------------------------------------------------

@dataclass(frozen=True)
class WhiskerArray:
    length: float = 0.25
    fan_deg: float = 60.0
    sweep_deg: float = 30.0
    increments: int = 30

    @classmethod
    def from_config(cls, cfg: Config) -> "WhiskerArray":
        return cls(cfg.whisker_length, cfg.whisker_fan_deg, cfg.whisker_sweep_deg,
                   cfg.whisker_increments)

    @property
    def mount_angles(self) -> np.ndarray:
        return np.radians(np.linspace(-self.fan_deg, self.fan_deg, N_WHISKERS))

    def sweep_angles(self, whisker: int) -> np.ndarray:
        """Head-frame angles visited from rest toward full protraction.

        Rest is folded toward the midline and the sweep opens outward, so a
        surface beside the head is met part way through and the arrested
        remainder grades with its distance.
        """
        mount = self.mount_angles[whisker]
        side = 1.0 if mount > 0 else -1.0
        amp = math.radians(self.sweep_deg)
        steps = np.arange(self.increments) * (amp / self.increments)
        return mount + side * (steps - amp / 2)


def whisk_cycle(world: World, head_pose: Pose, whiskers: WhiskerArray | None = None,
                rng: np.random.Generator | None = None, cfg: Config | None = None) -> WhiskCycleData:
    """One protraction sweep with rapid cessation on contact.

    A whisker is a rigid segment from the head origin. Protraction stops at the
    first increment where the segment meets a surface; the contact point is the
    nearest intersection and the deflection is the sweep left untraversed.
    """
    whiskers = whiskers or WhiskerArray()
    cfg = cfg or Config()
    amp = math.radians(whiskers.sweep_deg)
    step = amp / whiskers.increments
    deflections = np.zeros(N_WHISKERS)
    contacts = []
    for w in range(N_WHISKERS):
        for j, ang in enumerate(whiskers.sweep_angles(w)):
            a = head_pose.theta + ang
            dx, dy = math.cos(a), math.sin(a)
            t, kind = world.cast(head_pose.x, head_pose.y, dx, dy)
            if t <= whiskers.length:
                deflections[w] = amp - j * step
                hit = Point2(head_pose.x + t * dx, head_pose.y + t * dy)
                contacts.append((w, inverse_transform_point(head_pose, hit)))
                break
    if rng is not None and world.landmark_clearance(head_pose.x, head_pose.y) < cfg.body_radius:
        # the array is pressed against a landmark: bending readings become unreliable
        touched = deflections > 0
        jitter = rng.normal(1.0, cfg.collision_noise, size=N_WHISKERS)
        deflections = np.where(touched, np.clip(deflections * jitter, step, None), 0.0)
    return WhiskCycleData(contacts, deflections)


# trajectory -----------------------------------------------------------------

PHASES = ("approach_1", "orbit_1", "approach_2", "orbit_2", "return", "orbit_1b", "stop")


@dataclass
class TrajectoryScript:
    """Per-cycle true poses and twists compiled from the waypoint program:
    approach landmark 1, orbit it, cross to landmark 2, orbit it, loop back
    below both landmarks, orbit landmark 1 again, stop."""
    poses: list
    twists: list
    phases: list

    def __len__(self):
        return len(self.poses)

    @classmethod
    def from_config(cls, cfg: Config, world: World | None = None) -> "TrajectoryScript":
        world = world or World.from_config(cfg)
        step = cfg.speed * cfg.cycle_period
        c1, c2 = world.cylinder, world.cube
        o1 = (c1.x, c1.y + cfg.orbit1_offset)
        o2 = (c2.x, c2.y + cfg.orbit2_offset)
        entry1 = (o1[0], o1[1] - cfg.orbit1_radius)
        entry2 = (o2[0], o2[1] - cfg.orbit2_radius)

        points, phases = [], []
        _line((cfg.start_x, entry1[1]), entry1, step, points, phases, "approach_1")
        _orbit(o1, cfg.orbit1_radius, step, points, phases, "orbit_1")
        _line(entry1, entry2, step, points, phases, "approach_2")
        _orbit(o2, cfg.orbit2_radius, step, points, phases, "orbit_2")
        # come back from the south so no earlier stretch is retraced
        low = min(entry1[1], entry2[1]) - cfg.return_drop
        for a, b in ((entry2, (entry2[0], low)), ((entry2[0], low), (entry1[0], low)),
                     ((entry1[0], low), entry1)):
            _line(a, b, step, points, phases, "return")
        _orbit(o1, cfg.orbit1_radius, step, points, phases, "orbit_1b")
        points.append(entry1)
        phases.append("stop")

        headings = [math.atan2(b[1] - a[1], b[0] - a[0]) for a, b in zip(points, points[1:])]
        headings.append(headings[-1])
        twists = [Twist(math.dist(a, b), wrap_angle(h1 - h0))
                  for a, b, h0, h1 in zip(points, points[1:], headings, headings[1:])]
        twists.append(Twist(0.0, 0.0))
        poses = [Pose(points[0][0], points[0][1], headings[0])]
        for tw in twists[:-1]:
            poses.append(integrate(poses[-1], tw))
        return cls(poses, twists, phases)


def _line(a, b, step, points, phases, label):
    """Points from ``a`` (inclusive) toward ``b`` (exclusive) at ~``step`` spacing."""
    n = max(1, math.ceil(math.dist(a, b) / step))
    for i in range(n):
        f = i / n
        points.append((a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])))
        phases.append(label)


def _orbit(center, radius, step, points, phases, label):
    """One counter-clockwise lap starting at the bottom of the circle."""
    n = max(3, round(2 * math.pi * radius / step))
    for i in range(n):
        a = -math.pi / 2 + 2 * math.pi * i / n
        points.append((center[0] + radius * math.cos(a), center[1] + radius * math.sin(a)))
        phases.append(label)


def step_trajectory(script: TrajectoryScript, cfg: Config, seed: int,
                    cycle: int) -> tuple[Pose, Twist]:
    """True pose at ``cycle`` and the noisy odometry for the motion that
    follows it."""
    if not 0 <= cycle < len(script):
        raise ScriptEnded(f"cycle {cycle} outside script of {len(script)} cycles")
    true = script.twists[cycle]
    rng = np.random.default_rng([seed, cycle, 0])
    nf, nt = rng.normal(size=2)
    odom = Twist(true.dforward + cfg.odom_sigma_forward * nf,
                 true.dtheta + math.radians(cfg.odom_sigma_theta_deg) * nt)
    return script.poses[cycle], odom


def dead_reckon(start: Pose, twists) -> list:
    poses = [start]
    for tw in twists:
        poses.append(integrate(poses[-1], tw))
    return poses


# frames -------------------------------------------------------------------------

@dataclass
class SensorFrame:
    cycle: int
    rgb: RgbImage
    whisk: WhiskCycleData
    odom: Twist
    truth: Pose

    def to_record(self) -> dict:
        return {
            "cycle": self.cycle,
            "truth": list(self.truth.as_tuple()),
            "odom": [self.odom.dforward, self.odom.dtheta],
            "deflections": self.whisk.deflections.tolist(),
            "contacts": [[int(w), p[0], p[1]] for w, p in self.whisk.contacts_head],
            "image": {"width": self.rgb.width, "height": self.rgb.height,
                      "data": base64.b64encode(self.rgb.pixels.tobytes()).decode("ascii")},
        }

    @classmethod
    def from_record(cls, d: dict) -> "SensorFrame":
        img = d["image"]
        raw = np.frombuffer(base64.b64decode(img["data"], validate=True), dtype=np.uint8)
        return cls(int(d["cycle"]),
                   RgbImage(int(img["width"]), int(img["height"]), raw),
                   WhiskCycleData([(int(w), Point2(x, y)) for w, x, y in d["contacts"]],
                                  np.array(d["deflections"], dtype=float)),
                   Twist(*d["odom"]), Pose(*d["truth"]))

    def __eq__(self, other):
        if not isinstance(other, SensorFrame):
            return NotImplemented
        return self.to_record() == other.to_record()


class Simulator:
    def __init__(self, cfg: Config | None = None, seed: int = 42):
        self.cfg = cfg or Config()
        self.seed = seed
        self.world = World.from_config(self.cfg)
        self.whiskers = WhiskerArray.from_config(self.cfg)
        self.script = TrajectoryScript.from_config(self.cfg, self.world)

    def __len__(self):
        return len(self.script)

    def frame(self, cycle: int) -> SensorFrame:
        truth, odom = step_trajectory(self.script, self.cfg, self.seed, cycle)
        rng = np.random.default_rng([self.seed, cycle, 1])
        rgb = render_camera(self.world, truth, self.cfg.image_width, self.cfg.image_height,
                            self.cfg, rng)
        whisk = whisk_cycle(self.world, truth, self.whiskers, rng, self.cfg)
        return SensorFrame(cycle, rgb, whisk, odom, truth)

    def frames(self, cycles: int | None = None) -> Iterator[SensorFrame]:
        n = len(self) if cycles is None else cycles
        for k in range(n):
            yield self.frame(k)


# sensor logs ------------------------------------------------------------------

def record(frames, path, header: dict | None = None) -> int:
    """Write a header line then one JSON record per frame. Returns frame count."""
    count = 0
    with open(path, "w") as fh:
        fh.write(json.dumps({"type": "header", **(header or {})}) + "\n")
        for frame in frames:
            fh.write(json.dumps(frame.to_record()) + "\n")
            count += 1
    return count


def replay(path) -> tuple[dict, list]:
    """Read a sensor log back as ``(header, frames)``."""
    header, frames = {}, []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.endswith("\n"):
                raise LogParseError(lineno, "truncated record (no line terminator)")
            if not line.strip():
                continue
            try:
                d = json.loads(line)
            except json.JSONDecodeError as exc:
                raise LogParseError(lineno, f"malformed JSON: {exc.msg}") from None
            if lineno == 1 and d.get("type") == "header":
                header = d
                continue
            try:
                frames.append(SensorFrame.from_record(d))
            except (KeyError, TypeError, ValueError) as exc:
                raise LogParseError(lineno, f"bad frame record: {exc}") from None
    return header, frames
