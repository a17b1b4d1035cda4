import json
import math

import jsonschema
import numpy as np
import pytest

from condpattern.cli import main
from condpattern.coincidence import Pattern
from condpattern.config import ConfigError, parse_config
from condpattern.io import FIT_RESULT_SCHEMA, SUMMARY_SCHEMA, pattern_from_csv, pattern_to_csv, read_pattern
from condpattern.reproduce import FIGURES

STEP = 5 / 200


def run(*argv):
    return main([str(a) for a in argv])


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_csv_round_trip_position_and_angle():
    rng = np.random.default_rng(3)
    xs = np.sort(rng.uniform(4, 9, 40))
    pos = Pattern(xs, rng.uniform(0, 500, 40))
    back = pattern_from_csv(pattern_to_csv(pos))
    assert back.abscissa_kind == "position"
    assert np.allclose(back.abscissa, pos.abscissa, atol=1e-9, rtol=0)
    assert np.allclose(back.counts, pos.counts, atol=1e-9, rtol=0)
    ang = Pattern(np.linspace(0, math.pi, 31), rng.uniform(0, 50, 31), "waveplate_angle")
    text = pattern_to_csv(ang)
    assert text.startswith("theta_deg,counts\n")
    back = pattern_from_csv(text)
    assert back.abscissa_kind == "waveplate_angle"
    assert np.allclose(back.abscissa, ang.abscissa, atol=1e-9, rtol=0)


@pytest.mark.parametrize("text,line", [
    ("x_mm,counts\n1,2\n2,abc\n", 3),
    ("x_mm,counts\n1,2\n2,3,4\n", 3),
    ("pos,counts\n1,2\n", 1),
    ("x_mm,counts\n1,2\n2,nan\n", 3),
])
def test_csv_errors_are_line_anchored(text, line):
    with pytest.raises(Exception, match=rf"<csv>:{line}:"):
        pattern_from_csv(text)


@pytest.mark.parametrize("text,line,fragment", [
    ('{\n  "gamma": 0.5,\n  "alpha": \n}\n', 4, "invalid JSON"),
    ('{\n  "gamma": 0.5,\n  "colour": 1\n}\n', 3, "unknown key"),
    ('{\n  "layout": {\n    "slit_width_mm": 0.2,\n    "fringe_period_mm": -1\n  }\n}\n', 4, "fringe_period"),
    ('{\n  "alpha": 0.6,\n  "beta": 0.8,\n  "gamma": 1.5\n}\n', 4, "gamma"),
    ('{\n  "alpha": 0.6,\n  "beta": 0.8,\n  "pump_hwp_deg": 22.5\n}\n', 4, "not both"),
    ('{\n  "alpha": 0.6,\n  "beta": 0.6\n}\n', 2, "alpha"),
    ('{\n  "scan": {\n    "n_points": 2.5\n  }\n}\n', 3, "integer"),
])
def test_config_errors_name_the_line(text, line, fragment):
    with pytest.raises(ConfigError, match=rf"<config>:{line}:.*{fragment}"):
        parse_config(text)


def test_config_units_are_converted():
    cfg = parse_config(json.dumps({
        "layout": {"lambda_down_nm": 884, "slit_width_mm": 0.1, "z_detector_m": 2},
        "pump_hwp_deg": 22.5, "gamma": 0.3, "scan": {"theta_deg": 45, "x_start_mm": 5},
    }))
    assert cfg.layout.lambda_down == pytest.approx(884e-9)
    assert cfg.layout.slit_width == pytest.approx(1e-4)
    assert cfg.layout.z_detector == 2
    assert cfg.scan.theta_signal == pytest.approx(math.pi / 4)
    assert (cfg.alpha, cfg.beta) == pytest.approx((math.sqrt(0.5), math.sqrt(0.5)))


def test_bad_config_exits_one(tmp_path, capsys):
    cfg = write(tmp_path, "bad.json", '{\n  "gamma": 2\n}\n')
    assert run("simulate", "scan", "--config", cfg, "--out", tmp_path / "o.csv") == 1
    assert "bad.json:2:" in capsys.readouterr().err
    assert not (tmp_path / "o.csv").exists()
    assert run("simulate", "scan", "--config", tmp_path / "missing.json", "--out", tmp_path / "o.csv") == 1


def _window(pattern, lo=6.0, hi=6.6):
    sel = (pattern.abscissa >= lo) & (pattern.abscissa <= hi)
    return pattern.abscissa[sel], pattern.counts[sel]


@pytest.mark.parametrize("theta,pick", [(45, np.argmin), (0, np.argmax)])
def test_simulate_scan_extremum(tmp_path, theta, pick):
    out = tmp_path / "scan.csv"
    assert run("simulate", "scan", "--theta-deg", theta, "--out", out) == 0
    xs, ys = _window(read_pattern(out))
    assert xs[pick(ys)] == pytest.approx(6.3, abs=STEP)


def test_simulate_single_crystal_gaussian(tmp_path):
    cfg = write(tmp_path, "c.json", json.dumps({"alpha": 1, "beta": 0, "scan": {"theta_deg": 0}}))
    out = tmp_path / "scan.csv"
    assert run("simulate", "scan", "--config", cfg, "--out", out) == 0
    p = read_pattern(out)
    x, y = p.abscissa, p.counts
    assert x[np.argmax(y)] == pytest.approx(6.2, abs=STEP)
    # a single Gaussian: log counts are a concave parabola with no fringe ripple
    sel = y > 1e-3 * y.max()
    coef = np.polyfit(x[sel], np.log(y[sel]), 2)
    assert coef[0] < 0
    assert np.max(np.abs(np.polyval(coef, x[sel]) - np.log(y[sel]))) < 1e-3


def test_simulate_bell_scan(tmp_path):
    out = tmp_path / "bell.csv"
    assert run("simulate", "bell-scan", "--out", out) == 0
    p = read_pattern(out)
    assert p.abscissa_kind == "waveplate_angle"
    assert p.abscissa[-1] == pytest.approx(math.pi)


def test_fit_gaussian_cli(tmp_path):
    cfg = write(tmp_path, "c.json", json.dumps({"alpha": 1, "beta": 0, "scan": {"theta_deg": 0, "noise": True,
                                                                                 "shots_scale": 400}}))
    data, res = tmp_path / "d.csv", tmp_path / "fit.json"
    assert run("simulate", "scan", "--config", cfg, "--out", data) == 0
    assert run("fit", "gaussian", "--in", data, "--out", res) == 0
    doc = json.loads(res.read_text())
    jsonschema.validate(doc, FIT_RESULT_SCHEMA)
    assert doc["converged"] and doc["params"]["x_c"] == pytest.approx(6.2, abs=0.1)


def test_fit_double_slit_returns_configured_gamma(tmp_path):
    # point detector: the finite slit would lower the contrast by its averaging factor
    cfg = write(tmp_path, "c.json", json.dumps({"gamma": 0.64, "scan": {"theta_deg": 45, "slit_samples": 1}}))
    data, res = tmp_path / "d.csv", tmp_path / "fit.json"
    assert run("simulate", "scan", "--config", cfg, "--out", data) == 0
    assert run("fit", "double-slit", "--in", data, "--out", res, "--config", cfg) == 0
    assert json.loads(res.read_text())["params"]["V"] == pytest.approx(0.64, abs=0.02)


def test_fit_underdetermined_exits_one(tmp_path):
    data = write(tmp_path, "d.csv", "x_mm,counts\n1,2\n2,5\n3,1\n")
    assert run("fit", "gaussian", "--in", data, "--out", tmp_path / "fit.json") == 1
    assert not (tmp_path / "fit.json").exists()


def test_fit_malformed_exits_one(tmp_path):
    data = write(tmp_path, "d.csv", "x_mm,counts\n1,2\n2,oops\n")
    assert run("fit", "fringe", "--in", data, "--out", tmp_path / "fit.json") == 1


def test_fit_non_convergence_exits_two_and_writes(tmp_path):
    rows = "".join(f"{x},5\n" for x in np.linspace(4, 9, 30))
    data = write(tmp_path, "flat.csv", "x_mm,counts\n" + rows)
    res = tmp_path / "fit.json"
    assert run("fit", "gaussian", "--in", data, "--out", res) == 2
    doc = json.loads(res.read_text())
    jsonschema.validate(doc, FIT_RESULT_SCHEMA)
    assert doc["converged"] is False


def test_analyze_chsh(capsys):
    assert run("analyze", "chsh", "--visibility", 0.75) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["S_visibility"] == pytest.approx(2.12132, abs=1e-5) and out["violated"] is True
    assert out["S_state"] == pytest.approx(math.sqrt(2) * 1.75, abs=1e-12)
    assert run("analyze", "chsh", "--visibility", 0.5) == 0
    assert json.loads(capsys.readouterr().out)["violated"] is False
    assert run("analyze", "chsh", "--visibility", 1.5) == 1


def test_analyze_chsh_from_bell_scan(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", json.dumps({"gamma": 0.75}))
    data = tmp_path / "bell.csv"
    assert run("simulate", "bell-scan", "--config", cfg, "--out", data) == 0
    assert run("analyze", "chsh", "--in", data) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["visibility"] == pytest.approx(0.75, abs=1e-9) and out["violated"] is True


def test_analyze_visibility(tmp_path, capsys):
    const = write(tmp_path, "c.csv", "x_mm,counts\n1,7\n2,7\n3,7\n")
    assert run("analyze", "visibility", "--in", const) == 0
    assert json.loads(capsys.readouterr().out) == {"visibility": 0.0}
    two = write(tmp_path, "t.csv", "x_mm,counts\n1,330\n2,72\n3,1000\n")
    assert run("analyze", "visibility", "--in", two, "--x-max", 2.5) == 0
    assert json.loads(capsys.readouterr().out)["visibility"] == pytest.approx(0.64179, abs=1e-5)


@pytest.mark.parametrize("fig", FIGURES)
def test_reproduce_outputs_validate(tmp_path, fig):
    assert run("reproduce", fig, "--outdir", tmp_path) == 0
    fit_doc = json.loads((tmp_path / f"{fig}_fit.json").read_text())
    summary = json.loads((tmp_path / f"{fig}_summary.json").read_text())
    jsonschema.validate(fit_doc, FIT_RESULT_SCHEMA)
    jsonschema.validate(summary, SUMMARY_SCHEMA)
    read_pattern(tmp_path / f"{fig}.csv")
    key = "peak_mm" if fig in ("fig2", "fig3") else "visibility"
    assert summary[key] == pytest.approx(summary["reported"][key], abs=0.02)


def test_reproduce_extrema(tmp_path):
    for fig, kind in (("fig4", "minimum"), ("fig5", "maximum")):
        assert run("reproduce", fig, "--outdir", tmp_path) == 0
        summary = json.loads((tmp_path / f"{fig}_summary.json").read_text())
        assert summary["extremum_kind"] == kind
        assert summary["extremum_mm"] == pytest.approx(6.3, abs=STEP)


def _tree(path):
    return {p.name: p.read_bytes() for p in sorted(path.iterdir())}


@pytest.mark.parametrize("argv", [
    ("simulate", "scan", "--noise", "on", "--seed", 17, "--theta-deg", 45),
    ("simulate", "bell-scan", "--noise", "on", "--seed", 3),
])
def test_simulate_is_byte_deterministic(tmp_path, argv):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(*argv, "--out", a) == 0
    assert run(*argv, "--out", b) == 0
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.csv"
    assert run(*[v if v != 17 and v != 3 else v + 1 for v in argv], "--out", c) == 0
    assert c.read_bytes() != a.read_bytes()


@pytest.mark.parametrize("fig", ["fig2", "fig4", "fig6"])
def test_reproduce_is_byte_deterministic(tmp_path, fig):
    for d in ("a", "b"):
        assert run("reproduce", fig, "--outdir", tmp_path / d, "--noise", "on", "--seed", 5) == 0
    assert _tree(tmp_path / "a") == _tree(tmp_path / "b")


def test_no_temporary_files_left(tmp_path):
    assert run("reproduce", "fig3", "--outdir", tmp_path) == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["fig3.csv", "fig3_fit.json", "fig3_summary.json"]
