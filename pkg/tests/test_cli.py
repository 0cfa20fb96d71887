import json
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from pistab.cli import main
from pistab.config import build_config, parse_angle, parse_complex
from pistab.errors import ConfigError
from pistab.serialize import (read_flow_csv, read_walls_csv, spectrum_from_json, verdict_from_json)
from pistab.stability import Status


def raw(path: Path) -> str:
    with open(path, newline="") as fh:
        return fh.read()


def run(tmp_path, *args, config=None):
    argv = ["--out", str(tmp_path)]
    if config is not None:
        cfg = tmp_path / "config.json"
        cfg.write_text(json.dumps(config))
        argv += ["--config", str(cfg)]
    return main(argv + list(args))


def test_build_quiver_summaries(tmp_path, capsys):
    assert run(tmp_path, "build-quiver", "--order", "3", "--weights", "1,1,1") == 0
    assert capsys.readouterr().out.strip() == "3 nodes, 9 arrows, 9 relations"
    doc = json.loads((tmp_path / "quiver.json").read_text())
    assert doc["quiver"]["nodes"] == 3 and len(doc["quiver"]["relations"]) == 9
    assert run(tmp_path, "build-quiver", "--order", "1", "--weights", "0,0,0") == 0
    assert capsys.readouterr().out.strip() == "1 node, 3 arrows, 3 relations"


def test_build_quiver_invalid(tmp_path, capsys):
    assert run(tmp_path, "build-quiver", "--order", "3", "--weights", "1,1,2") == 2
    err = json.loads(capsys.readouterr().err)["error"]
    assert err["code"] == "E_INVALID_SPEC" and err["path"] == "/orbifold"


def test_pi_mode_two_charge(tmp_path, capsys):
    assert run(tmp_path, "--preset", "two-charge", "check-stability", "--mode", "pi") == 0
    out = json.loads((tmp_path / "verdict.json").read_text())
    assert out["verdict"] == "Stable" and out["phases"]["object"] == 0.25
    assert verdict_from_json(out).status is Status.STABLE


def test_mu_rank_zero_fails(tmp_path, capsys):
    assert run(tmp_path, "check-stability", "--mode", "mu", config={"chern": [0, 1]}) == 1
    err = json.loads(capsys.readouterr().err)["error"]
    assert err == {"code": "E_ZERO_RANK", "message": "slope of a rank-zero object", "path": "/chern"}


def test_theta_normalization_surfaced(tmp_path, capsys):
    cfg = {"quiver": {"nodes": 2, "arrows": [{"src": 0, "dst": 1, "label": 1}], "relations": []},
           "rep": {"dims": [1, 1], "maps": {"0": [["1/1"]]}}, "theta": [1, 1]}
    assert run(tmp_path, "check-stability", "--mode", "theta", config=cfg) == 1
    assert json.loads(capsys.readouterr().err)["error"]["code"] == "E_NORMALIZATION"
    cfg["theta"] = ["1", "-1"]
    assert run(tmp_path, "check-stability", "--mode", "theta", config=cfg) == 0
    assert json.loads((tmp_path / "verdict.json").read_text())["verdict"] == "Stable"


def test_mmms_mode_exact(tmp_path):
    cfg = {"chern": [1, 1, 0], "mmms": {"omega": "3", "ls": 1, "d": 2, "theta": 0}}
    assert run(tmp_path, "check-stability", "--mode", "mmms", config=cfg) == 0
    assert json.loads((tmp_path / "verdict.json").read_text())["value"] == "6/1"


def test_scan_walls_outputs(tmp_path):
    assert run(tmp_path, "--preset", "two-charge", "scan-walls") == 0
    rows = read_walls_csv(raw(tmp_path / "walls.csv"))
    assert len(rows) == 1
    s, q, sub, _ = rows[0]
    assert abs(s - 1) <= 1e-6 and q == (1, 1) and sub == (1, 0)
    assert (tmp_path / "walls.svg").read_text().startswith("<svg")


def test_scan_walls_chamber_interior(tmp_path):
    cfg = {"preset": "two-charge", "path": {"kind": "segment", "start": "0,1", "end": "2,1"}}
    assert run(tmp_path, "scan-walls", config=cfg) == 0
    assert raw(tmp_path / "walls.csv") == "s,charge,subcharge,residual\r\n"


def test_flow_gradings(tmp_path):
    assert run(tmp_path, "--preset", "two-charge", "flow-gradings") == 0
    summary = json.loads((tmp_path / "flow.json").read_text())
    assert summary["shift"] == pytest.approx(2) and summary["monodromy"] == 2
    trace = read_flow_csv(raw(tmp_path / "flow.csv"))
    assert trace.degree[0] == 0 and trace.degree[-1] == pytest.approx(2)

    assert run(tmp_path, "--preset", "two-charge", "flow-gradings", "--source", "0,1", "--target", "0,1") == 0
    trace = read_flow_csv(raw(tmp_path / "flow.csv"))
    assert set(trace.degree) == {0.0}


def test_flow_negative_degree_flag(tmp_path):
    cfg = {"preset": "two-charge", "source": [0, 1], "target": [1, 0],
           "flow_path": {"kind": "arc", "center": "0,0", "radius": 1, "start_angle": 0, "end_angle": "0.4*pi"}}
    assert run(tmp_path, "flow-gradings", config=cfg) == 0
    flags = json.loads((tmp_path / "flow.json").read_text())["flags"]
    assert [f["flag"] for f in flags] == ["NegativeDegree"]


def test_spectrum(tmp_path):
    assert run(tmp_path, "--preset", "c3z3", "spectrum", "--cap", "1,0,0") == 0
    data = json.loads((tmp_path / "spectrum.json").read_text())
    assert data == [{"charge": [1, 0, 0], "dims": [1, 0, 0], "verdict": "Stable", "phase": 0.0, "seed": 1}]
    assert spectrum_from_json(data)[0].to_json() == data[0]


def test_spectrum_partial_failure_exit_zero(tmp_path):
    assert run(tmp_path, "--preset", "c3z3", "spectrum", "--cap", "1,1,0", "--point=-1,0") == 0
    data = json.loads((tmp_path / "spectrum.json").read_text())
    assert [e["verdict"] for e in data if e["charge"] == [1, 1, 0]] == ["Failed"]


def test_same_chamber_identical_json(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(a, "--preset", "c3z3", "spectrum", "--point", "0.3,4") == 0
    assert run(b, "--preset", "c3z3", "spectrum", "--point", "0.5,6") == 0
    strip = lambda p: [(e["charge"], e["verdict"], e.get("witness"))
                       for e in json.loads((p / "spectrum.json").read_text())]
    assert strip(a) == strip(b)


def test_config_errors_carry_paths(tmp_path, capsys):
    bad = {"preset": "two-charge", "periods": {"components": [["1,0"], ["x"]]}}
    assert run(tmp_path, "scan-walls", config=bad) == 2
    err = json.loads(capsys.readouterr().err)["error"]
    assert err["path"] == "/periods/components/1/0" and err["code"] == "E_CONFIG_COMPLEX"
    assert run(tmp_path, "scan-walls", config={"preset": "nope"}) == 2
    assert json.loads(capsys.readouterr().err)["error"]["path"] == "/preset"
    assert run(tmp_path, "scan-walls", config={"bogus": 1}) == 2
    assert json.loads(capsys.readouterr().err)["error"]["path"] == "/bogus"
    (tmp_path / "broken.json").write_text("{")
    assert main(["--config", str(tmp_path / "broken.json"), "--out", str(tmp_path), "spectrum"]) == 2
    assert json.loads(capsys.readouterr().err)["error"]["code"] == "E_CONFIG_SYNTAX"


def test_config_consistency_checks():
    with pytest.raises(ConfigError) as exc:
        build_config({"preset": "c3z3", "charge_map": [[1, 0], [0, 1], [1, 1]]})
    assert exc.value.path == "/charge_map"
    with pytest.raises(ConfigError) as exc:
        build_config({"preset": "c3z3", "theta": [1, -1]})
    assert exc.value.path == "/theta"
    with pytest.raises(ConfigError) as exc:
        build_config({"preset": "two-charge", "charge": [1, 1, 1]})
    assert exc.value.path == "/charge"


def test_scalar_parsers():
    assert parse_complex("1.5,-2", "/x") == complex(1.5, -2)
    assert parse_complex([0, 1], "/x") == 1j
    assert parse_angle("pi/2", "/a") == 0.5 * 3.141592653589793
    assert parse_angle("-3*pi/4", "/a") == pytest.approx(-2.356194490192345)
    with pytest.raises(ConfigError):
        parse_angle("tau", "/a")


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "pistab", "--out", str(tmp_path), "build-quiver",
                          "--order", "2", "--weights", "1,1,0"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "2 nodes, 6 arrows, 6 relations"
