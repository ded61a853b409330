"""Whisker contacts and deflections to tactile templates (PFH + SDA).

The contact-geometry descriptor is a planar surflet-pair histogram: for every
pair of contact points it bins the angle between the two normals, the angle
between the source normal and the connecting vector, and the pair distance
relative to the contact-set diameter.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .geometry import Pose, transform_point
from .templates import MatchResult

N_WHISKERS = 24


class NoSurface(ValueError):
    """Too few contact points to estimate a surface."""


@dataclass
class WhiskCycleData:
    contacts_head: list  # [(whisker_id, Point2 in head frame)]
    deflections: np.ndarray  # (24,), radians of arrested sweep, 0 = no contact

    def __post_init__(self):
        self.deflections = np.asarray(self.deflections, dtype=float)
        if self.deflections.shape != (N_WHISKERS,):
            raise ValueError(f"expected {N_WHISKERS} deflections, got {self.deflections.shape}")
        touched = {int(w) for w, _ in self.contacts_head}
        if any(self.deflections[w] <= 0 for w in touched):
            raise ValueError("contact reported for a whisker with zero deflection")

    @property
    def points_head(self) -> list:
        return [p for _, p in self.contacts_head]


@dataclass
class TactileTemplate:
    id: int
    pfh: np.ndarray
    sda: np.ndarray
    learned_pose_cell: tuple = (0.0, 0.0, 0.0)

    @property
    def is_empty(self) -> bool:
        return not (np.any(self.pfh) or np.any(self.sda))

    def to_record(self) -> str:
        return json.dumps({
            "id": self.id,
            "pfh": self.pfh.tolist(),
            "sda": self.sda.tolist(),
            "learned_pose_cell": list(self.learned_pose_cell),
        })

    @classmethod
    def from_record(cls, line: str) -> "TactileTemplate":
        d = json.loads(line)
        return cls(int(d["id"]), np.array(d["pfh"], dtype=float),
                   np.array(d["sda"], dtype=float), tuple(d["learned_pose_cell"]))


def save_templates(templates: Iterable[TactileTemplate], path) -> None:
    with open(path, "w") as fh:
        for t in templates:
            fh.write(t.to_record() + "\n")


def load_templates(path) -> list[TactileTemplate]:
    with open(path) as fh:
        return [TactileTemplate.from_record(line) for line in fh if line.strip()]


def contacts_to_world(contacts_head: Sequence, head_pose: Pose) -> list:
    return [transform_point(head_pose, p) for p in contacts_head]


def estimate_normals(points, k: int = 4, head=(0.0, 0.0)) -> np.ndarray:
    """Unit normals from a total-least-squares line fit over each point's
    ``k`` nearest neighbours (the point itself included), oriented toward
    ``head``."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    n = len(pts)
    if n < 2:
        raise NoSurface(f"need at least 2 contact points, got {n}")
    if k < 2:
        raise ValueError("k must be >= 2")
    k = min(k, n)
    head = np.asarray(head, dtype=float)
    d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1)
    normals = np.empty_like(pts)
    for i in range(n):
        nbrs = np.argsort(d2[i], kind="stable")[:k]
        cluster = pts[nbrs]
        centered = cluster - cluster.mean(axis=0)
        toward_head = head - pts[i]
        if np.allclose(centered, 0.0, atol=1e-12):
            normal = toward_head
        else:
            _, vecs = np.linalg.eigh(centered.T @ centered)
            normal = vecs[:, 0]
            if normal @ toward_head < 0:
                normal = -normal
        norm = np.hypot(*normal)
        normals[i] = normal / norm if norm > 0 else (1.0, 0.0)
    return normals


def _angle(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Unsigned angle in [0, pi] between row vectors."""
    cross = u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]
    dot = (u * v).sum(-1)
    return np.arctan2(np.abs(cross), dot)


def compute_pfh(points, normals, bins_per_feature: int = 5) -> np.ndarray:
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    nrm = np.asarray(normals, dtype=float).reshape(-1, 2)
    if len(pts) != len(nrm):
        raise ValueError("points and normals differ in length")
    b = bins_per_feature
    hist = np.zeros(b ** 3)
    n = len(pts)
    if n < 2:
        return hist
    i, j = np.triu_indices(n, k=1)
    d = pts[j] - pts[i]
    dist = np.hypot(d[:, 0], d[:, 1])
    diameter = dist.max()
    # source = point whose normal is closer in angle to the vector toward the other
    ang_i = _angle(nrm[i], d)
    ang_j = _angle(nrm[j], -d)
    swap = ang_j < ang_i
    src = np.where(swap, j, i)
    dst = np.where(swap, i, j)
    f1 = _angle(nrm[src], nrm[dst])
    f2 = np.where(swap, ang_j, ang_i)
    f3 = dist / diameter if diameter > 0 else np.zeros_like(dist)
    b1 = _bin(f1 / math.pi, b)
    b2 = _bin(f2 / math.pi, b)
    b3 = _bin(f3, b)
    np.add.at(hist, (b1 * b + b2) * b + b3, 1.0)
    return hist / hist.sum()


def _bin(unit_value: np.ndarray, bins: int) -> np.ndarray:
    return np.clip(np.floor(unit_value * bins).astype(int), 0, bins - 1)


def compute_sda(deflections) -> np.ndarray:
    defl = np.asarray(deflections, dtype=float)
    if np.any(defl < 0):
        raise ValueError("deflections must be non-negative")
    top = defl.max() if defl.size else 0.0
    if top <= 0:
        return np.zeros_like(defl)
    return defl / top


def tactile_features(whisk: WhiskCycleData, head_pose: Pose, k: int = 4,
                     bins_per_feature: int = 5) -> tuple[np.ndarray, np.ndarray]:
    """PFH over world-frame contacts plus SDA over deflections."""
    world = contacts_to_world(whisk.points_head, head_pose)
    if len(world) >= 2:
        normals = estimate_normals(world, k, head=(head_pose.x, head_pose.y))
        pfh = compute_pfh(world, normals, bins_per_feature)
    else:
        pfh = np.zeros(bins_per_feature ** 3)
    return pfh, compute_sda(whisk.deflections)


def tactile_distance(a: TactileTemplate, b: TactileTemplate,
                     w_pfh: float = 0.6, w_sda: float = 0.4) -> float:
    d_pfh = 0.5 * np.abs(a.pfh - b.pfh).sum()
    d_sda = np.abs(a.sda - b.sda).mean()
    return float(w_pfh * d_pfh + w_sda * d_sda)


def match_tactile_template(current: TactileTemplate, store: Sequence[TactileTemplate],
                           w_pfh: float = 0.6, w_sda: float = 0.4,
                           threshold: float = 0.12) -> MatchResult:
    if w_pfh < 0 or w_sda < 0 or not math.isclose(w_pfh + w_sda, 1.0):
        raise ValueError("tactile weights must be non-negative and sum to 1")
    if current.is_empty:
        return MatchResult.no_contact()
    if not store:
        return MatchResult.novel(0)
    dists = [tactile_distance(current, t, w_pfh, w_sda) for t in store]
    i = int(np.argmin(dists))
    if dists[i] <= threshold:
        return MatchResult.matched(store[i].id, dists[i])
    return MatchResult.novel(len(store), dists[i])


@dataclass
class TactileTemplateStore:
    threshold: float = 0.12
    w_pfh: float = 0.6
    w_sda: float = 0.4
    templates: list[TactileTemplate] = field(default_factory=list)

    def __len__(self):
        return len(self.templates)

    def __getitem__(self, i) -> TactileTemplate:
        return self.templates[i]

    def observe(self, pfh: np.ndarray, sda: np.ndarray, pose_cell) -> MatchResult:
        current = TactileTemplate(len(self.templates), np.asarray(pfh, dtype=float),
                                  np.asarray(sda, dtype=float),
                                  tuple(float(c) for c in pose_cell))
        result = match_tactile_template(current, self.templates, self.w_pfh,
                                        self.w_sda, self.threshold)
        if result.is_novel:
            self.templates.append(current)
        return result
