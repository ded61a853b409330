"""End-to-end runs: simulator (or replayed log) through both sensory
pathways, the pose cells and the experience map; plus run comparison and
report output."""
from __future__ import annotations

import csv
import hashlib
import json
import os
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .config import Config
from .expmap import ExperienceMap, Outcome, ate
from .geometry import IDENTITY, Pose, Twist, integrate
from .posecells import (PoseCellGrid, decode_peak, inject, path_integrate,
                        step_attractor)
from .simulator import SensorFrame, Simulator, replay
from .tactile import TactileTemplateStore, tactile_features
from .templates import MatchResult
from .visual import ViewTemplateStore, extract_view_template, to_grayscale

MODES = ("visual_only", "vita")


class PipelineError(RuntimeError):
    """A module failed mid-run; carries the cycle index."""

    def __init__(self, cycle: int, cause: Exception):
        super().__init__(f"cycle {cycle}: {type(cause).__name__}: {cause}")
        self.cycle = cycle
        self.__cause__ = cause


@dataclass(frozen=True)
class RunConfig:
    mode: str = "vita"
    seed: int = 42
    cycles: Optional[int] = None  # None runs the whole script
    params: Config = field(default_factory=Config)
    out_dir: Optional[str] = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass
class TraceRow:
    cycle: int
    truth: Pose
    decoded: Pose
    experience: int
    outcome: str
    view_id: Optional[int]
    view_kind: str
    tactile_id: Optional[int]
    tactile_kind: str


@dataclass
class RunReport:
    mode: str
    seed: int
    view_template_count: int = 0
    tactile_template_count: int = 0
    loop_closure_events: list = field(default_factory=list)
    ate_before_relax: Optional[dict] = None
    ate_after_relax: Optional[dict] = None
    trace: list = field(default_factory=list)
    view_growth: list = field(default_factory=list)
    tactile_growth: list = field(default_factory=list)
    frame_hashes: list = field(default_factory=list)
    map: ExperienceMap = field(default_factory=ExperienceMap)

    def to_dict(self) -> dict:
        """Plain, JSON-ready form; also used for equality checks."""
        return {
            "mode": self.mode,
            "seed": self.seed,
            "view_template_count": self.view_template_count,
            "tactile_template_count": self.tactile_template_count,
            "loop_closure_events": [[e.current_exp, e.matched_exp, e.cycle]
                                    for e in self.loop_closure_events],
            "ate_before_relax": self.ate_before_relax,
            "ate_after_relax": self.ate_after_relax,
            "trace": [[r.cycle, list(r.truth.as_tuple()), list(r.decoded.as_tuple()),
                       r.experience, r.outcome, r.view_id, r.view_kind,
                       r.tactile_id, r.tactile_kind] for r in self.trace],
            "view_growth": list(self.view_growth),
            "tactile_growth": list(self.tactile_growth),
            "experiences": [[e.id, list(e.map_pose.as_tuple()), e.view_id, e.tactile_id,
                             list(e.cell_coords), e.cycle] for e in self.map.experiences],
            "links": [[l.source, l.target, list(l.delta.as_tuple()), l.cycle]
                      for l in self.map.links],
        }

    def __eq__(self, other):
        if not isinstance(other, RunReport):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.to_dict()).encode()).hexdigest()


def frame_hash(frame: SensorFrame) -> str:
    return hashlib.sha256(json.dumps(frame.to_record()).encode()).hexdigest()[:16]


class VitaSlam:
    """One SLAM instance: template stores, pose cells and experience map,
    advanced one sensor frame at a time."""

    def __init__(self, params: Config, mode: str = "vita", start: Pose = IDENTITY):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        self.params = p = params
        self.mode = mode
        self.views = ViewTemplateStore(p.view_threshold, p.view_max_shift)
        self.touches = TactileTemplateStore(p.tactile_threshold, p.w_pfh, p.w_sda)
        self.grid = PoseCellGrid.at_pose(start, p.pc_dims, p.pc_extent)
        self.map = ExperienceMap(p.pc_dims, p.exp_match_radius)
        # odometry since the active experience; the first experience sits at the start pose
        self.accum = start
        self.dead_reckoned = start
        self.last_odom: Optional[Twist] = None

    @property
    def tactile_enabled(self) -> bool:
        return self.mode == "vita"

    def process(self, frame: SensorFrame) -> TraceRow:
        p = self.params
        if self.last_odom is not None:
            self.grid = path_integrate(self.grid, self.last_odom)
            self.accum = integrate(self.accum, self.last_odom)
            self.dead_reckoned = integrate(self.dead_reckoned, self.last_odom)
        self.last_odom = frame.odom

        prior = decode_peak(self.grid, p.pc_decode_radius).cell_coords
        profile = extract_view_template(to_grayscale(frame.rgb), p.profile_len)
        v_match = self.views.observe(profile, prior)

        t_match: Optional[MatchResult] = None
        if self.tactile_enabled:
            pfh, sda = tactile_features(frame.whisk, self.dead_reckoned, p.normal_k, p.pfh_bins)
            t_match = self.touches.observe(pfh, sda, prior)

        if v_match.is_matched:
            self.grid = inject(self.grid, self.views[v_match.id].learned_pose_cell,
                               p.view_inject_energy, p.pc_inject_sigma)
        if t_match is not None and t_match.is_matched:
            self.grid = inject(self.grid, self.touches[t_match.id].learned_pose_cell,
                               p.tactile_inject_energy, p.pc_inject_sigma)
        self.grid = step_attractor(self.grid, p.pc_inhibition, p.pc_excite_sigma,
                                   p.pc_excite_radius)
        peak = decode_peak(self.grid, p.pc_decode_radius)

        result = self.map.update(v_match, t_match, peak, self.accum, frame.cycle)
        if result.outcome is not Outcome.SAME_EXPERIENCE:
            self.accum = IDENTITY
        if result.outcome is Outcome.LOOP_CLOSURE:
            self.map.relax(p.relax_iterations, p.relax_alpha)

        return TraceRow(frame.cycle, frame.truth, peak.pose, result.experience,
                        result.outcome.value,
                        v_match.id, v_match.kind.value,
                        None if t_match is None else t_match.id,
                        "disabled" if t_match is None else t_match.kind.value)


def run_frames(frames: Iterable[SensorFrame], params: Config, mode: str,
               seed: int = 0) -> RunReport:
    report = RunReport(mode, seed)
    slam = None
    truth_at, odom_at = {}, {}
    for frame in frames:
        if slam is None:
            slam = VitaSlam(params, mode, frame.truth)
        try:
            row = slam.process(frame)
        except Exception as exc:
            raise PipelineError(frame.cycle, exc) from exc
        truth_at[frame.cycle] = frame.truth
        odom_at[frame.cycle] = slam.dead_reckoned
        report.trace.append(row)
        report.view_growth.append(len(slam.views))
        report.tactile_growth.append(len(slam.touches))
        report.frame_hashes.append(frame_hash(frame))
    if slam is None:
        return report
    emap = slam.map
    if emap.links:
        emap.relax(params.relax_final_iterations, params.relax_alpha)
    report.map = emap
    report.view_template_count = len(slam.views)
    report.tactile_template_count = len(slam.touches)
    report.loop_closure_events = list(emap.events)
    if len(emap.experiences) >= 2:
        exps = emap.experiences
        report.ate_before_relax = ate([odom_at[e.cycle] for e in exps],
                                      [truth_at[e.cycle] for e in exps])
        report.ate_after_relax = ate([e.map_pose for e in exps],
                                     [truth_at[e.cycle] for e in exps])
    return report


def run(config: RunConfig) -> RunReport:
    sim = Simulator(config.params, config.seed)
    report = run_frames(sim.frames(config.cycles), config.params, config.mode, config.seed)
    if config.out_dir:
        emit_plots(report, config.out_dir, sim.script.phases)
    return report


def run_log(path, mode: str, out_dir=None) -> RunReport:
    header, frames = replay(path)
    params = Config.from_dict(header.get("config", {}))
    report = run_frames(frames, params, mode, int(header.get("seed", 0)))
    if out_dir:
        emit_plots(report, out_dir)
    return report


# comparison -------------------------------------------------------------------

@dataclass
class ComparisonReport:
    a: RunReport
    b: RunReport

    def table(self) -> list[list]:
        rows = [["metric", self.a.mode, self.b.mode]]
        for name, get in (
            ("view_templates", lambda r: r.view_template_count),
            ("tactile_templates", lambda r: r.tactile_template_count),
            ("experiences", lambda r: len(r.map.experiences)),
            ("loop_closures", lambda r: len(r.loop_closure_events)),
            ("ate_before_m", lambda r: _ate_pos(r.ate_before_relax)),
            ("ate_after_m", lambda r: _ate_pos(r.ate_after_relax)),
        ):
            rows.append([name, get(self.a), get(self.b)])
        return rows

    def growth(self) -> list[list]:
        return [[k, va, vb] for k, (va, vb) in
                enumerate(zip(self.a.view_growth, self.b.view_growth))]


def _ate_pos(ate):
    return None if ate is None else ate["rmse_position"]


def compare(config_a: RunConfig, config_b: RunConfig) -> ComparisonReport:
    if config_a.seed != config_b.seed or config_a.cycles != config_b.cycles:
        raise ValueError("compared runs must share seed and cycle count")
    if config_a.params != config_b.params:
        raise ValueError("compared runs must share the world and script parameters")
    a, b = run(config_a), run(config_b)
    if a.frame_hashes != b.frame_hashes:
        raise RuntimeError("compared runs consumed different sensor streams")
    return ComparisonReport(a, b)


# output -------------------------------------------------------------------------

def _fmt(v):
    return "" if v is None else v


def emit_plots(report: RunReport, out_dir, phases: Sequence[str] | None = None) -> list:
    """Write CSV tables and an SVG experience map; returns the paths."""
    from . import plots

    try:
        os.makedirs(out_dir, exist_ok=True)
        paths = []

        def path(name):
            paths.append(os.path.join(out_dir, name))
            return paths[-1]

        with open(path("report.csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["key", "value"])
            w.writerow(["mode", report.mode])
            w.writerow(["seed", report.seed])
            w.writerow(["view_template_count", report.view_template_count])
            w.writerow(["tactile_template_count", report.tactile_template_count])
            w.writerow(["experience_count", len(report.map.experiences)])
            w.writerow(["loop_closure_count", len(report.loop_closure_events)])
            for tag, err in (("before", report.ate_before_relax), ("after", report.ate_after_relax)):
                err = err or {}
                w.writerow([f"ate_{tag}_relax_position", _fmt(err.get("rmse_position"))])
                w.writerow([f"ate_{tag}_relax_heading", _fmt(err.get("rmse_heading"))])
        with open(path("templates.csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["cycle", "view_templates", "tactile_templates"])
            for row, v, t in zip(report.trace, report.view_growth, report.tactile_growth):
                w.writerow([row.cycle, v, t])
        with open(path("trace.csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["cycle", "phase", "true_x", "true_y", "true_theta", "est_x", "est_y",
                        "est_theta", "experience", "outcome", "view_id", "view_match",
                        "tactile_id", "tactile_match"])
            for r in report.trace:
                phase = phases[r.cycle] if phases is not None and r.cycle < len(phases) else ""
                w.writerow([r.cycle, phase, *r.truth.as_tuple(), *r.decoded.as_tuple(),
                            r.experience, r.outcome, _fmt(r.view_id), r.view_kind,
                            _fmt(r.tactile_id), r.tactile_kind])
        with open(path("loop_closures.csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["cycle", "current_exp", "matched_exp"])
            for e in report.loop_closure_events:
                w.writerow([e.cycle, e.current_exp, e.matched_exp])
        report.map.write_experiences_csv(path("experiences.csv"))
        report.map.write_links_csv(path("links.csv"))
        with open(path("map.svg"), "w") as fh:
            fh.write(plots.map_svg(report))
        return paths
    except OSError as exc:
        raise OSError(f"cannot write outputs to {out_dir}: {exc}") from exc
