"""Semi-metric experience map: experiences, odometric links, loop closure
detection, graph relaxation and trajectory error."""
from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .geometry import Pose, compose, wrap_angle
from .posecells import PoseEstimate, cell_distance
from .templates import MatchResult


@dataclass
class Experience:
    id: int
    cell_coords: tuple
    view_id: Optional[int]
    tactile_id: Optional[int]
    map_pose: Pose
    cycle: int = 0
    created_pose: Optional[Pose] = None

    def __post_init__(self):
        if self.view_id is None and self.tactile_id is None:
            raise ValueError("an experience needs a view or tactile template")
        if self.created_pose is None:
            self.created_pose = self.map_pose


@dataclass(frozen=True)
class Link:
    source: int
    target: int
    delta: Pose
    cycle: int = 0

    def __post_init__(self):
        if self.source == self.target:
            raise ValueError("self-links are not allowed")


@dataclass(frozen=True)
class LoopClosureEvent:
    current_exp: int
    matched_exp: int
    cycle: int


class Outcome(enum.Enum):
    NEW_EXPERIENCE = "new"
    SAME_EXPERIENCE = "same"
    LOOP_CLOSURE = "loop_closure"


@dataclass(frozen=True)
class UpdateResult:
    outcome: Outcome
    experience: int
    event: Optional[LoopClosureEvent] = None


def pose_residual(a: Pose, b: Pose) -> np.ndarray:
    """World-frame difference ``a - b`` with the heading wrapped."""
    return np.array([a.x - b.x, a.y - b.y, wrap_angle(a.theta - b.theta)])


@dataclass
class ExperienceMap:
    dims: tuple = (21, 21, 36)
    match_radius: float = 2.0  # pose-cell units
    experiences: list[Experience] = field(default_factory=list)
    links: list[Link] = field(default_factory=list)
    events: list[LoopClosureEvent] = field(default_factory=list)
    active: Optional[int] = None

    def _score(self, exp: Experience, v_match: Optional[MatchResult],
               t_match: Optional[MatchResult]) -> int:
        score = 0
        if v_match is not None and v_match.is_matched and exp.view_id == v_match.id:
            score += 1
        if t_match is not None and t_match.is_matched and exp.tactile_id == t_match.id:
            score += 1
        return score

    def best_candidate(self, v_match, t_match, peak: PoseEstimate):
        """Highest-scoring experience within the pose-cell radius.

        Ties go to the experience nearest in pose-cell space, then lowest id.
        Returns ``(score, id)`` or ``None``.
        """
        best = None
        for exp in self.experiences:
            dist = cell_distance(exp.cell_coords, peak.cell_coords, self.dims)
            if dist > self.match_radius:
                continue
            score = self._score(exp, v_match, t_match)
            if score == 0:
                continue
            key = (-score, dist, exp.id)
            if best is None or key < best[0]:
                best = (key, exp.id)
        if best is None:
            return None
        return -best[0][0], best[1]

    def update(self, v_match: Optional[MatchResult], t_match: Optional[MatchResult],
               peak: PoseEstimate, odom_accum: Pose, cycle: int = 0) -> UpdateResult:
        """Place the robot in the map for this cycle.

        ``odom_accum`` is the odometric motion since the active experience was
        entered.
        """
        cand = self.best_candidate(v_match, t_match, peak)
        if cand is None:
            return UpdateResult(Outcome.NEW_EXPERIENCE,
                                self._create(v_match, t_match, peak, odom_accum, cycle))
        _, cid = cand
        if cid == self.active:
            return UpdateResult(Outcome.SAME_EXPERIENCE, cid)
        if self.active is None:
            # nothing to link from yet
            self.active = cid
            return UpdateResult(Outcome.SAME_EXPERIENCE, cid)
        event = LoopClosureEvent(self.active, cid, cycle)
        self.links.append(Link(self.active, cid, odom_accum, cycle))
        self.events.append(event)
        self.active = cid
        return UpdateResult(Outcome.LOOP_CLOSURE, cid, event)

    def _create(self, v_match, t_match, peak, odom_accum, cycle) -> int:
        view_id = v_match.id if v_match is not None and v_match.id is not None else None
        tactile_id = t_match.id if t_match is not None and t_match.id is not None else None
        new_id = len(self.experiences)
        if self.active is None:
            pose = odom_accum
        else:
            pose = compose(self.experiences[self.active].map_pose, odom_accum)
        self.experiences.append(Experience(new_id, tuple(peak.cell_coords), view_id,
                                           tactile_id, pose, cycle))
        if self.active is not None:
            self.links.append(Link(self.active, new_id, odom_accum, cycle))
        self.active = new_id
        return new_id

    # relaxation -----------------------------------------------------------

    def energy(self) -> float:
        return link_energy([e.map_pose for e in self.experiences], self.links)

    def relax(self, iterations: int = 20, alpha: float = 0.5) -> list[float]:
        """Iterative graph relaxation; returns the energy after each iteration."""
        poses, history = relax_poses([e.map_pose for e in self.experiences],
                                     self.links, iterations, alpha)
        for exp, pose in zip(self.experiences, poses):
            exp.map_pose = pose
        return history

    # export ---------------------------------------------------------------

    def write_experiences_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["id", "x", "y", "theta", "view_id", "tactile_id"])
            for e in self.experiences:
                w.writerow([e.id, repr(e.map_pose.x), repr(e.map_pose.y),
                            repr(e.map_pose.theta), _opt(e.view_id), _opt(e.tactile_id)])

    def write_links_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["from", "to", "dx", "dy", "dtheta", "cycle"])
            for l in self.links:
                w.writerow([l.source, l.target, repr(l.delta.x), repr(l.delta.y),
                            repr(l.delta.theta), l.cycle])

    def write_events(self, path) -> None:
        with open(path, "w") as fh:
            for ev in self.events:
                fh.write(json.dumps({"current_exp": ev.current_exp,
                                     "matched_exp": ev.matched_exp,
                                     "cycle": ev.cycle}) + "\n")


def _opt(v):
    return "" if v is None else v


def link_energy(poses: Sequence[Pose], links: Sequence[Link]) -> float:
    total = 0.0
    for l in links:
        r = pose_residual(poses[l.target], compose(poses[l.source], l.delta))
        total += float(r @ r)
    return total


def relax_poses(poses: Sequence[Pose], links: Sequence[Link], iterations: int = 20,
                alpha: float = 0.5) -> tuple[list, list]:
    """Jacobi-style relaxation. Each node moves by ``alpha / degree`` times the
    summed residual of its links; all nodes update from the same snapshot.

    Returns the relaxed poses and the energy after each iteration.
    """
    if not 0 < alpha <= 1:
        raise ValueError("alpha must be in (0, 1]")
    state = np.array([p.as_tuple() for p in poses], dtype=float).reshape(-1, 3)
    n = len(state)
    history = []
    if n == 0 or not links:
        return [Pose(*row) for row in state], [link_energy(poses, links)] * iterations
    src = np.array([l.source for l in links])
    dst = np.array([l.target for l in links])
    delta = np.array([l.delta.as_tuple() for l in links], dtype=float)
    degree = np.bincount(np.concatenate([src, dst]), minlength=n).astype(float)
    degree[degree == 0] = 1.0
    for _ in range(iterations):
        residual = _residuals(state, src, dst, delta)
        correction = np.zeros_like(state)
        # outgoing: pull the source toward agreement with its target
        np.add.at(correction, src, residual)
        # incoming: pull the target toward the source's prediction
        np.add.at(correction, dst, -residual)
        state = state + (alpha / degree)[:, None] * correction
        state[:, 2] = _wrap(state[:, 2])
        r = _residuals(state, src, dst, delta)
        history.append(float((r * r).sum()))
    return [Pose(*row) for row in state], history


def _wrap(a: np.ndarray) -> np.ndarray:
    out = (a + math.pi) % (2 * math.pi) - math.pi
    return np.where(out >= math.pi, out - 2 * math.pi, out)


def _residuals(state, src, dst, delta) -> np.ndarray:
    """``pose(to) - (pose(from) o delta)`` for every link."""
    th = state[src, 2]
    c, s = np.cos(th), np.sin(th)
    pred = np.empty((len(src), 3))
    pred[:, 0] = state[src, 0] + c * delta[:, 0] - s * delta[:, 1]
    pred[:, 1] = state[src, 1] + s * delta[:, 0] + c * delta[:, 1]
    pred[:, 2] = th + delta[:, 2]
    r = state[dst] - pred
    r[:, 2] = _wrap(r[:, 2])
    return r


# trajectory error ---------------------------------------------------------

def align_rigid_2d(model: np.ndarray, data: np.ndarray):
    """Rotation angle and translation mapping ``model`` onto ``data`` (Nx2)
    in the least-squares sense, no scale."""
    mu_m, mu_d = model.mean(axis=0), data.mean(axis=0)
    m, d = model - mu_m, data - mu_d
    h = m.T @ d
    angle = math.atan2(h[0, 1] - h[1, 0], h[0, 0] + h[1, 1])
    c, s = math.cos(angle), math.sin(angle)
    rot = np.array([[c, -s], [s, c]])
    return angle, mu_d - rot @ mu_m


def ate(poses: Sequence[Pose], ground_truth: Sequence[Pose]) -> dict:
    """Position and heading RMSE after optimal rigid alignment."""
    if len(poses) < 2:
        raise ValueError("need at least 2 experiences for trajectory error")
    if len(poses) != len(ground_truth):
        raise ValueError("pose and ground-truth lengths differ")
    est = np.array([[p.x, p.y] for p in poses])
    gt = np.array([[p.x, p.y] for p in ground_truth])
    angle, trans = align_rigid_2d(est, gt)
    c, s = math.cos(angle), math.sin(angle)
    aligned = est @ np.array([[c, -s], [s, c]]).T + trans
    pos_err = np.sqrt(((aligned - gt) ** 2).sum(axis=1))
    head_err = _wrap(np.array([p.theta + angle - g.theta for p, g in zip(poses, ground_truth)]))
    return {"rmse_position": float(np.sqrt(np.mean(pos_err ** 2))),
            "rmse_heading": float(np.sqrt(np.mean(head_err ** 2)))}


def map_ate(emap: ExperienceMap, ground_truth, created: bool = False) -> dict:
    """Trajectory error of the map against ``ground_truth``.

    ``ground_truth`` maps each experience's creation cycle to its true pose
    (a dict or a sequence of ``(cycle, Pose)``). With ``created`` the poses
    recorded at creation time are scored instead of the relaxed ones.
    """
    truth = dict(ground_truth)
    missing = [e.cycle for e in emap.experiences if e.cycle not in truth]
    if missing:
        raise ValueError(f"no ground truth for cycles {missing[:5]}")
    poses = [e.created_pose if created else e.map_pose for e in emap.experiences]
    return ate(poses, [truth[e.cycle] for e in emap.experiences])
