import csv
import io
import json

import numpy as np
import pytest

from pi2.asymptotics import solve_z0
from pi2.cli import ConfigError, main, parse_config, parse_range


def _run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def _table(text):
    body = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


# ---------------------------------------------------------------- parsing

def test_minimal_args_get_defaults():
    cfg = parse_config(["--mode", "asym", "--x", "1000", "--T", "0"])
    assert cfg.mode == "asym"
    assert cfg.x_values == (1000.0,)
    assert cfg.T_values == (0.0,)
    assert cfg.format == "csv"
    assert cfg.bvp.L == 20.0
    assert cfg.rh.neumann_order == 2


def test_unknown_flag_named(capsys):
    with pytest.raises(SystemExit) as info:
        parse_config(["--mode", "asym", "--x", "1", "--foo"])
    assert info.value.code == 2
    assert "--foo" in capsys.readouterr().err


def test_range_form():
    # the range contains x = 0, which only ode mode accepts
    cfg = parse_config(["--mode", "ode", "--x-range", "-100:100:41"])
    assert len(cfg.x_values) == 41
    assert 0.0 in cfg.x_values
    assert np.allclose(np.diff(cfg.x_values), 5.0)
    with pytest.raises(ConfigError):
        parse_range("1:2")
    with pytest.raises(ConfigError):
        parse_range("1:2:0")


def test_negative_exponent_values():
    cfg = parse_config(["--mode", "asym", "--x", "-1e6", "1e6", "--T", "-2"])
    assert cfg.x_values == (-1e6, 1e6)
    assert cfg.T_values == (-2.0,)


def test_config_file_strict(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"mode": "rh", "x": [50], "bogus": 1}))
    with pytest.raises(ConfigError, match="bogus"):
        parse_config(["--config", str(p)])
    p.write_text(json.dumps({"mode": "rh", "x": [50], "rh": {"neumann": 3}}))
    with pytest.raises(ConfigError, match="rh.neumann"):
        parse_config(["--config", str(p)])
    p.write_text('{"mode": "rh",\n "x": [50,]}')
    with pytest.raises(ConfigError, match="line 2"):
        parse_config(["--config", str(p)])
    with pytest.raises(ConfigError, match="not found"):
        parse_config(["--config", str(tmp_path / "missing.json")])


def test_flags_override_file(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"mode": "ode", "T": [1.0], "bvp": {"L": 12.0, "mesh_density": 8},
                             "rh": {"delta": 0.9}}))
    cfg = parse_config(["--config", str(p), "--L", "15", "--T", "0", "0.5"])
    assert cfg.bvp.L == 15.0
    assert cfg.bvp.mesh_density == 8
    assert cfg.rh.delta == 0.9
    assert cfg.T_values == (0.0, 0.5)


def test_validation():
    with pytest.raises(ConfigError, match="x = 0"):
        parse_config(["--mode", "rh", "--x", "0", "50"])
    assert parse_config(["--mode", "ode", "--x", "0"]).x_values == (0.0,)
    with pytest.raises(ConfigError, match="needs x"):
        parse_config(["--mode", "compare"])
    with pytest.raises(ConfigError, match="mode is required"):
        parse_config(["--x", "5"])
    with pytest.raises(ConfigError):
        parse_config(["--mode", "rh", "--x", "50", "--delta", "-1"])
    with pytest.raises(ConfigError):
        parse_config(["--mode", "rh", "--x", "50", "--x-range", "1:2:3"])


def test_config_error_exit_code(capsys):
    code, _, err = _run(["--mode", "rh", "--x", "0"], capsys)
    assert code == 2
    assert json.loads(err)["error"] == "ConfigError"


# ---------------------------------------------------------------- modes

def test_asym_rows(capsys):
    code, out, _ = _run(["--mode", "asym", "--x", "1000", "-1000", "1e6", "-1e6", "--T", "0"],
                        capsys)
    assert code == 0
    assert out.startswith("# version:")
    rows = _table(out)
    assert list(rows[0]) == ["x", "T", "z0", "y_leading"]
    for r in rows:
        x = float(r["x"])
        assert float(r["y_leading"]) == pytest.approx(-np.sign(x) * (6 * abs(x)) ** (1 / 3),
                                                      rel=1e-10)
    assert all(len(r["y_leading"].replace("-", "").replace(".", "").split("e")[0]) >= 16
               for r in rows)


def test_metadata_records_defaults(capsys):
    _, out, _ = _run(["--mode", "asym", "--x", "10"], capsys)
    meta = {ln.split(":", 1)[0][2:]: json.loads(ln.split(":", 1)[1])
            for ln in out.splitlines() if ln.startswith("#")}
    assert meta["bvp"]["L"] == 20.0
    assert meta["rh"]["x_min"] == 10.0
    assert "jobs" not in meta


def test_reg_scan_sign_pattern(capsys):
    code, out, _ = _run(["--mode", "reg-scan", "--x", "1e4", "--T", "0", "--grid", "41"], capsys)
    assert code == 0
    rows = _table(out)
    assert len(rows) == 41 * 41
    G = solve_z0(1e4, 0.0)
    re = np.array([float(r["re"]) for r in rows])
    im = np.array([float(r["im"]) for r in rows])
    sign = np.array([int(r["sign"]) for r in rows])
    right = (im == 0) & (re > G.z0 + 0.5)
    assert np.all(sign[right] == 1)
    lens = np.abs(np.angle(re + 1j * im - G.z0) - 6 * np.pi / 7) < 0.1
    lens &= np.abs(re + 1j * im - G.z0) > 0.5
    assert lens.any() and np.all(sign[lens] == -1)
    # g(conj z) = conj g(z), so the sign map is symmetric about the real axis
    up = {(a, b): s for a, b, s in zip(re, im, sign)}
    assert all(up[(a, b)] == up[(a, -b)] for a, b in up if (a, -b) in up and b != 0)


def test_reg_scan_svg(tmp_path):
    out = tmp_path / "map.svg"
    assert main(["--mode", "reg-scan", "--x", "1e4", "--grid", "21", "--format", "svg",
                 "--output", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("<svg") and text.rstrip().endswith("</svg>")
    assert "<rect" in text


def test_compare_no_overlap(capsys):
    code, out, _ = _run(["--mode", "compare", "--x", "5", "-5", "--T", "0", "--L", "4"], capsys)
    assert code == 0
    rows = _table(out)
    assert [r["status"] for r in rows] == ["no overlap", "no overlap"]
    assert rows[0]["y_ode"] == "nan"


def test_compare_overlap(capsys):
    code, out, _ = _run(["--mode", "compare", "--x", "-20", "20", "25", "--T", "0",
                         "--L", "30"], capsys)
    assert code == 0
    rows = _table(out)
    assert list(rows[0]) == ["x", "T", "y_asym", "y_ode", "y_rh", "abs_ode_rh", "abs_rh_asym",
                             "abs_ode_asym", "slope_rh_asym", "slope_ode_asym", "status"]
    for r in rows:
        assert r["status"] == "ok"
        assert float(r["abs_ode_rh"]) <= 1e-4 * (1 + abs(float(r["y_rh"])))
    assert rows[0]["slope_rh_asym"] == "nan"        # a single negative point
    assert float(rows[1]["slope_rh_asym"]) < -1.5


def test_rh_json_diagnostics(capsys):
    code, out, _ = _run(["--mode", "rh", "--x", "60", "-60", "--T", "0.5", "--format", "json"],
                        capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["metadata"]["mode"] == "rh"
    assert [r["x"] for r in doc["rows"]] == [60.0, -60.0]
    diag = doc["rows"][0]["diagnostics"]
    assert set(diag) >= {"sigma", "R1", "panel_count", "est_error"}


def test_ode_points_and_grid(capsys):
    code, out, _ = _run(["--mode", "ode", "--x", "0", "3", "--T", "0", "--L", "10"], capsys)
    assert code == 0
    rows = _table(out)
    assert float(rows[0]["y"]) == pytest.approx(-0.41517, abs=1e-4)
    code, out, _ = _run(["--mode", "ode", "--T", "0", "--L", "6", "--mesh-density", "4"], capsys)
    rows = _table(out)
    assert list(rows[0]) == ["T", "x", "y", "y_x", "y_xx", "y_xxx", "residual"]
    assert float(rows[0]["x"]) == -6.0


def test_profile_svg(capsys):
    code, out, _ = _run(["--mode", "asym", "--x-range", "1:50:10", "--format", "svg"], capsys)
    assert code == 0
    assert "<polyline" in out


def test_engine_error_record(capsys):
    code, _, err = _run(["--mode", "rh", "--x", "3"], capsys)
    assert code == 3
    rec = json.loads(err)
    assert rec["error"] == "ValueError"
    assert rec["x"] == 3.0


def test_deterministic_and_job_independent(tmp_path):
    outs = []
    for jobs in ("1", "1", "2"):
        p = tmp_path / f"out{len(outs)}.csv"
        assert main(["--mode", "rh", "--x", "50", "80", "-70", "--T", "0", "1",
                     "--jobs", jobs, "--output", str(p)]) == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_log_level_env(monkeypatch, capsys):
    monkeypatch.setenv("PI2_LOG", "debug")
    assert main(["--mode", "asym", "--x", "10"]) == 0
