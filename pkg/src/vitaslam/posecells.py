"""Three-dimensional continuous attractor network over (x, y, theta).

Activity lives on a torus: every axis wraps. Each cycle the packet is shifted
by odometry (path integration), template matches inject energy at the cells
where those templates were learned, and the attractor step (local Gaussian
excitation, constant global inhibition, normalisation) keeps a coherent
packet.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Pose, Twist, wrap_angle, TWO_PI


class DegenerateActivity(RuntimeError):
    """All pose-cell activity vanished."""


def gaussian_kernel_1d(sigma: float = 1.0, radius: int = 3) -> np.ndarray:
    k = np.arange(-radius, radius + 1, dtype=float)
    w = np.exp(-0.5 * (k / sigma) ** 2)
    return w / w.sum()


@dataclass
class PoseCellGrid:
    activity: np.ndarray  # (Nx, Ny, Ntheta)
    cell_size: tuple  # (m per x-cell, m per y-cell, rad per theta-cell)

    @classmethod
    def empty(cls, dims=(21, 21, 36), extent=(10.0, 10.0)) -> "PoseCellGrid":
        nx, ny, nth = dims
        cell = (extent[0] / nx, extent[1] / ny, TWO_PI / nth)
        return cls(np.zeros(dims), cell)

    @classmethod
    def at_pose(cls, pose: Pose, dims=(21, 21, 36), extent=(10.0, 10.0)) -> "PoseCellGrid":
        """Grid with a unit delta at the cell nearest ``pose``."""
        grid = cls.empty(dims, extent)
        idx = tuple(int(round(c)) % n for c, n in zip(grid.pose_to_cell(pose), dims))
        grid.activity[idx] = 1.0
        return grid

    @property
    def dims(self) -> tuple:
        return self.activity.shape

    def copy(self) -> "PoseCellGrid":
        return PoseCellGrid(self.activity.copy(), self.cell_size)

    def pose_to_cell(self, pose: Pose) -> tuple:
        nx, ny, nth = self.dims
        cx, cy, cth = self.cell_size
        return ((pose.x / cx) % nx, (pose.y / cy) % ny,
                ((pose.theta % TWO_PI) / cth) % nth)

    def cell_to_pose(self, cell) -> Pose:
        cx, cy, cth = self.cell_size
        return Pose(cell[0] * cx, cell[1] * cy, wrap_angle(cell[2] * cth))

    def to_csv(self, path) -> None:
        """Dump as ``ix,iy,itheta,activity`` rows, x-major."""
        nx, ny, nth = self.dims
        ix, iy, ith = np.meshgrid(np.arange(nx), np.arange(ny), np.arange(nth),
                                  indexing="ij")
        rows = np.column_stack([ix.ravel(), iy.ravel(), ith.ravel()])
        with open(path, "w") as fh:
            fh.write(f"# dims={nx},{ny},{nth} cell_size={','.join(map(repr, self.cell_size))}\n")
            fh.write("ix,iy,itheta,activity\n")
            for (a, b, c), v in zip(rows, self.activity.ravel()):
                fh.write(f"{a},{b},{c},{float(v)!r}\n")

    @classmethod
    def from_csv(cls, path) -> "PoseCellGrid":
        with open(path) as fh:
            meta = fh.readline()[1:].split()
            dims = tuple(int(v) for v in meta[0].split("=")[1].split(","))
            cell = tuple(float(v) for v in meta[1].split("=")[1].split(","))
            fh.readline()
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
        activity = np.zeros(dims)
        idx = data[:, :3].astype(int)
        activity[idx[:, 0], idx[:, 1], idx[:, 2]] = data[:, 3]
        return cls(activity, cell)


def _normalized(grid: PoseCellGrid, activity: np.ndarray) -> PoseCellGrid:
    total = activity.sum()
    if not total > 0:
        raise DegenerateActivity("pose-cell activity is all zero")
    return PoseCellGrid(activity / total, grid.cell_size)


def wrapped_convolve(activity: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Separable circular convolution of a 3-D volume with a 1-D kernel per axis."""
    radius = len(kernel) // 2
    out = activity
    for axis in range(3):
        acc = np.zeros_like(out)
        for offset, w in zip(range(-radius, radius + 1), kernel):
            acc += w * np.roll(out, offset, axis=axis)
        out = acc
    return out


def step_attractor(grid: PoseCellGrid, inhibition: float = 0.00002,
                   sigma: float = 1.0, radius: int = 3) -> PoseCellGrid:
    excited = wrapped_convolve(grid.activity, gaussian_kernel_1d(sigma, radius))
    inhibited = np.maximum(excited - inhibition, 0.0)
    return _normalized(grid, inhibited)


def _shift(a: np.ndarray, cells: float, axis: int) -> np.ndarray:
    """Circular shift by a real number of cells with linear interpolation."""
    whole = math.floor(cells)
    frac = cells - whole
    out = np.roll(a, whole, axis=axis)
    if frac:
        out = (1.0 - frac) * out + frac * np.roll(out, 1, axis=axis)
    return out


def path_integrate(grid: PoseCellGrid, odom: Twist) -> PoseCellGrid:
    nx, ny, nth = grid.dims
    cx, cy, cth = grid.cell_size
    if abs(odom.dforward) >= nx * cx / 2:
        raise ValueError("forward motion exceeds half the grid extent")
    moved = np.empty_like(grid.activity)
    for k in range(nth):
        heading = k * cth
        plane = grid.activity[:, :, k]
        plane = _shift(plane, odom.dforward * math.cos(heading) / cx, axis=0)
        plane = _shift(plane, odom.dforward * math.sin(heading) / cy, axis=1)
        moved[:, :, k] = plane
    moved = _shift(moved, odom.dtheta / cth, axis=2)
    # linear blends conserve mass already; re-dividing by an order-dependent
    # sum would break exact equivariance under integer rolls
    return PoseCellGrid(moved, grid.cell_size)


def wrapped_gaussian_bump(dims, center, sigma: float = 1.0) -> np.ndarray:
    """Unit-sum Gaussian over the torus, separable per axis."""
    axes = []
    for n, c in zip(dims, center):
        d = np.arange(n) - c
        d = (d + n / 2) % n - n / 2
        axes.append(np.exp(-0.5 * (d / sigma) ** 2))
    bump = axes[0][:, None, None] * axes[1][None, :, None] * axes[2][None, None, :]
    return bump / bump.sum()


def inject(grid: PoseCellGrid, at, energy: float, sigma: float = 1.0) -> PoseCellGrid:
    if energy < 0:
        raise ValueError("injection energy must be non-negative")
    if energy == 0:
        return grid.copy()
    return _normalized(grid, grid.activity + energy * wrapped_gaussian_bump(grid.dims, at, sigma))


@dataclass(frozen=True)
class PoseEstimate:
    cell_coords: tuple
    pose: Pose


def _window_offsets(radius: int, n: int) -> np.ndarray:
    if 2 * radius + 1 > n:
        return np.arange(-(n // 2), n - n // 2)
    return np.arange(-radius, radius + 1)


def decode_peak(grid: PoseCellGrid, radius: int = 5) -> PoseEstimate:
    """Activity-weighted circular mean around the most active cell."""
    a = grid.activity
    if not a.max() > 0:
        raise DegenerateActivity("cannot decode an all-zero grid")
    peak = np.unravel_index(int(np.argmax(a)), a.shape)
    offsets = [_window_offsets(radius, n) for n in a.shape]
    box = a[np.ix_(*[(p + o) % n for p, o, n in zip(peak, offsets, a.shape)])]
    coords = []
    for axis, (p, o, n) in enumerate(zip(peak, offsets, a.shape)):
        other = tuple(i for i in range(3) if i != axis)
        w = box.sum(axis=other)
        ang = TWO_PI * o / n
        shift = math.atan2((w * np.sin(ang)).sum(), (w * np.cos(ang)).sum()) * n / TWO_PI
        coords.append((p + shift) % n)
    coords = tuple(float(c) for c in coords)
    return PoseEstimate(coords, grid.cell_to_pose(coords))


def cell_distance(a, b, dims) -> float:
    """Euclidean distance between cell coordinates on the torus."""
    total = 0.0
    for u, v, n in zip(a, b, dims):
        d = abs(u - v) % n
        d = min(d, n - d)
        total += d * d
    return math.sqrt(total)
