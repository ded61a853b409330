import csv
import xml.etree.ElementTree as ET

import pytest

from vitaslam import cli
from vitaslam.config import Config, ConfigError, load_config, parse_config
from vitaslam.expmap import Experience, ExperienceMap, Link
from vitaslam.geometry import Pose
from vitaslam.pipeline import (RunConfig, RunReport, compare, emit_plots, run, run_frames,
                               run_log)
from vitaslam.plots import map_svg
from vitaslam.simulator import record

SVG = "{http://www.w3.org/2000/svg}"


def svg_elems(text, tag, cls):
    root = ET.fromstring(text)
    return [e for e in root.iter(SVG + tag) if cls in e.get("class", "").split()]


def test_zero_cycles_empty_report():
    r = run(RunConfig("vita", 42, 0))
    assert r.view_template_count == 0 and r.tactile_template_count == 0
    assert r.loop_closure_events == [] and r.ate_after_relax is None


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig("lidar")


def test_short_runs_deterministic():
    a = run(RunConfig("vita", 5, 40))
    b = run(RunConfig("vita", 5, 40))
    assert a == b and a.digest() == b.digest()
    assert run(RunConfig("vita", 6, 40)) != a


def test_report_consistency(vita_run):
    r, _ = vita_run
    ids = {e.id for e in r.map.experiences}
    for ev in r.loop_closure_events:
        assert ev.current_exp in ids and ev.matched_exp in ids
    assert r.view_growth[-1] == r.view_template_count
    assert r.tactile_growth[-1] == r.tactile_template_count
    assert all(l.source != l.target for l in r.map.links)


def test_modes_share_stream(visual_run, vita_run):
    assert visual_run[0].frame_hashes == vita_run[0].frame_hashes


def test_compare_end_to_end():
    comp = compare(RunConfig("visual_only", 42), RunConfig("vita", 42))
    a, b = comp.a, comp.b
    assert len(b.loop_closure_events) > len(a.loop_closure_events) == 0
    assert a.view_template_count >= b.view_template_count
    table = comp.table()
    assert table[0] == ["metric", "visual_only", "vita"]
    assert len(comp.growth()) == len(a.trace)


def test_compare_rejects_mismatch():
    with pytest.raises(ValueError):
        compare(RunConfig("visual_only", 1, 5), RunConfig("vita", 2, 5))
    with pytest.raises(ValueError):
        compare(RunConfig("visual_only", 1, 5),
                RunConfig("vita", 1, 5, Config().replace(speed=0.2)))


def test_identical_configs_identical_reports():
    comp = compare(RunConfig("vita", 3, 30), RunConfig("vita", 3, 30))
    assert comp.a == comp.b


def test_replay_twice_identical(tmp_path):
    from vitaslam.simulator import Simulator
    path = tmp_path / "log.jsonl"
    record(Simulator(Config(), 9).frames(60), path, {"config": Config().to_dict(), "seed": 9})
    assert run_log(path, "vita") == run_log(path, "vita")


def test_empty_report_outputs(tmp_path):
    r = run_frames([], Config(), "vita")
    paths = emit_plots(r, tmp_path)
    for p in paths:
        if p.endswith(".csv"):
            rows = list(csv.reader(open(p)))
            assert rows and (p.endswith("report.csv") or len(rows) == 1)
    svg = (tmp_path / "map.svg").read_text()
    assert svg_elems(svg, "rect", "axes")
    assert not svg_elems(svg, "circle", "experience")


def test_svg_three_experiences():
    emap = ExperienceMap()
    emap.experiences = [Experience(i, (i, 0, 0), i, None, Pose(i, 0.5 * i, 0)) for i in range(3)]
    emap.links = [Link(0, 1, Pose(1, 0.5, 0)), Link(1, 2, Pose(1, 0.5, 0))]
    r = RunReport("vita", 0, map=emap)
    svg = map_svg(r)
    assert len(svg_elems(svg, "circle", "experience")) == 3
    assert len(svg_elems(svg, "line", "link")) == 2


def test_svg_seed42_loop_closures(vita_run, tmp_path):
    r, _ = vita_run
    emit_plots(r, tmp_path)
    svg = (tmp_path / "map.svg").read_text()
    assert len(svg_elems(svg, "circle", "loop-closure")) == len(r.loop_closure_events) > 0
    assert svg_elems(svg, "line", "closure")


def test_config_file_parsing(tmp_path):
    cfg = parse_config("# comment\nspeed = 0.2\nview_max_shift = 6\n")
    assert cfg.speed == 0.2 and cfg.view_max_shift == 6
    with pytest.raises(ConfigError):
        parse_config("warp_drive = 9\n")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.cfg")
    path = tmp_path / "c.cfg"
    path.write_text(Config().dumps())
    assert load_config(path) == Config()


def test_cli_run_record_replay(tmp_path, capsys):
    log = tmp_path / "log.jsonl"
    assert cli.main(["run", "--seed", "4", "--cycles", "30", "--record", str(log),
                     "--out", str(tmp_path / "out")]) == 0
    live = capsys.readouterr().out
    assert (tmp_path / "out" / "map.svg").exists()
    assert cli.main(["replay", "--log", str(log)]) == 0
    assert capsys.readouterr().out == live


def test_cli_compare(tmp_path, capsys):
    assert cli.main(["compare", "--seed", "4", "--cycles", "20", "--out", str(tmp_path)]) == 0
    rows = list(csv.reader(open(tmp_path / "comparison.csv")))
    assert rows[0] == ["metric", "visual_only", "vita"]
    assert (tmp_path / "vita" / "map.svg").exists()


def test_cli_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("no_such_key = 1\n")
    assert cli.main(["run", "--config", str(bad), "--cycles", "1"]) == 2
    assert cli.main(["run", "--cycles", "100000"]) == 2
    assert cli.main(["run", "--mode", "sonar"]) == 2
    assert cli.main([]) == 2
    broken = tmp_path / "broken.jsonl"
    broken.write_text('{"type": "header"}\n{"cycle": 0')
    assert cli.main(["replay", "--log", str(broken)]) == 3
    assert cli.main(["replay", "--log", str(tmp_path / "absent.jsonl")]) == 3
    capsys.readouterr()
