"""Camera frames to local view templates, and template matching."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .templates import MatchResult

LUMA = np.array([0.299, 0.587, 0.114])


@dataclass
class RgbImage:
    width: int
    height: int
    pixels: np.ndarray  # (height, width, 3) uint8

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=np.uint8)
        if self.pixels.size != self.width * self.height * 3:
            raise ValueError(
                f"pixel buffer has {self.pixels.size} values, "
                f"expected {self.width}x{self.height}x3")
        self.pixels = self.pixels.reshape(self.height, self.width, 3)

    def __eq__(self, other):
        return (isinstance(other, RgbImage) and self.width == other.width
                and self.height == other.height
                and np.array_equal(self.pixels, other.pixels))


@dataclass
class ViewTemplate:
    id: int
    profile: np.ndarray
    learned_pose_cell: tuple[float, float, float]


def to_grayscale(img: RgbImage) -> np.ndarray:
    """Luma-weighted grayscale in [0, 1], shape (height, width)."""
    if img.width == 0 or img.height == 0:
        raise ValueError("zero-sized image")
    return (img.pixels.astype(float) @ LUMA) / 255.0


def normalize_profile(profile: np.ndarray) -> np.ndarray:
    """Subtract the mean and rescale into [0, 1] around 0.5.

    A flat profile maps to all 0.5.
    """
    centered = profile - profile.mean()
    scale = np.abs(centered).max()
    if scale <= 1e-12:
        return np.full_like(profile, 0.5)
    return 0.5 + 0.5 * centered / scale


def extract_view_template(gray: np.ndarray, profile_len: int = 60) -> np.ndarray:
    """Column-mean intensity profile, box-downsampled to ``profile_len``."""
    if profile_len <= 0:
        raise ValueError("profile_len must be positive")
    gray = np.asarray(gray, dtype=float)
    if gray.ndim != 2 or gray.shape[1] < profile_len:
        raise ValueError(
            f"image width {gray.shape[-1]} narrower than profile_len {profile_len}")
    columns = gray.mean(axis=0)
    # box averaging with fractional overlap so any width >= profile_len works
    width = columns.size
    edges = np.linspace(0.0, width, profile_len + 1)
    cum = np.concatenate([[0.0], np.cumsum(columns)])

    def integral(t):
        i = np.minimum(np.floor(t).astype(int), width - 1)
        return cum[i] + (t - i) * columns[i]

    profile = (integral(edges[1:]) - integral(edges[:-1])) / np.diff(edges)
    return normalize_profile(profile)


def profile_distance(a: np.ndarray, b: np.ndarray, shift: int = 0) -> float:
    """Mean absolute difference between ``a`` and ``b`` circularly shifted."""
    return float(np.mean(np.abs(a - np.roll(b, shift))))


def match_view_template(current: np.ndarray, store: Sequence[ViewTemplate],
                        threshold: float, max_shift: int = 10) -> MatchResult:
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    if not store:
        return MatchResult.novel(0)
    current = np.asarray(current, dtype=float)
    stored = np.stack([t.profile for t in store])
    best_d, best_id = np.inf, -1
    for shift in range(-max_shift, max_shift + 1):
        d = np.mean(np.abs(current - np.roll(stored, shift, axis=1)), axis=1)
        i = int(np.argmin(d))
        # strict '<' keeps the lowest id on ties across shifts
        if d[i] < best_d or (d[i] == best_d and store[i].id < best_id):
            best_d, best_id = float(d[i]), store[i].id
    if best_d <= threshold:
        return MatchResult.matched(best_id, best_d)
    return MatchResult.novel(len(store), best_d)


@dataclass
class ViewTemplateStore:
    threshold: float = 0.035
    max_shift: int = 10
    templates: list[ViewTemplate] = field(default_factory=list)

    def __len__(self):
        return len(self.templates)

    def __getitem__(self, i) -> ViewTemplate:
        return self.templates[i]

    def observe(self, profile: np.ndarray, pose_cell) -> MatchResult:
        """Match ``profile``; learn it as a new template when novel."""
        result = match_view_template(profile, self.templates, self.threshold,
                                     self.max_shift)
        if result.is_novel:
            self.templates.append(
                ViewTemplate(result.id, np.array(profile, dtype=float),
                             tuple(float(c) for c in pose_cell)))
        return result
