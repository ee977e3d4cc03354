import json
import math

import numpy as np
import pytest

from hgflow.cli import FIELD_HEADER, SUMMARY_HEADER, main, run_scenario, sweep, write_summary
from hgflow.config import PRESETS, padding_cells, parse_config, prepare, with_override
from hgflow.errors import ConfigurationError

TORUS = """
[domain]
kind = torus
x_min = 0
x_max = 6.283185307179586
n = 64

[time]
t_end = 0.5
snapshot_stride = 5

[initial]
u0 = "1 + 0.3*cos(x)"
u1 = "0.2 + 0.1*sin(x)"

[output]
dir = {out}
"""


def _write(tmp_path, text, name="scenario.ini"):
    path = tmp_path / name
    path.write_text(text.replace("{out}", str(tmp_path / "out")))
    return str(path)


def test_parse_torus_example():
    sc = parse_config(TORUS.replace("{out}", "o"))
    assert sc.kind == "torus" and sc.n == 64 and sc.solver.t_end == 0.5
    assert sc.solver.snapshot_stride == 5 and sc.out_dir == "o"
    assert padding_cells(sc) == (0, 0)


@pytest.mark.parametrize("edit,needle", [
    (("t_end = 0.5", ""), "t_end"),
    (('u1 = "0.2 + 0.1*sin(x)"', ""), "u1"),
    (("x_max = 6.283185307179586", ""), "x_max"),
    (("kind = torus", "kind = sphere"), "kind"),
    (("n = 64", "n = 64\ncolor = red"), "color"),
    (("n = 64", "n = 6.5"), "int"),
    (("[output]", "[plots]"), "plots"),
    (('u0 = "1 + 0.3*cos(x)"', 'u0 = "cos(x)"'), "positive"),
    (('u0 = "1 + 0.3*cos(x)"', 'u0 = "1 + y"'), "y"),
    (("t_end = 0.5", "t_end = 0.5\nlimiter = superbee"), "limiter"),
])
def test_config_errors_name_the_problem(edit, needle):
    text = TORUS.replace("{out}", "o").replace(*edit)
    with pytest.raises(Exception) as info:
        parse_config(text)
    assert needle in str(info.value)


def test_preset_rules():
    base = "[time]\nt_end = 0.1\n[initial]\npreset = {}\n"
    sc = parse_config(base.format("traveling_wave"))
    assert sc.kind == "line" and sc.params["wave_speed"] == 0.5
    with pytest.raises(ConfigurationError, match="unknown preset"):
        parse_config(base.format("donut"))
    with pytest.raises(ConfigurationError, match="does not use"):
        parse_config(base.format("flat") + "epsilon = 1\n")
    with pytest.raises(ConfigurationError, match="not both"):
        parse_config(base.format("flat") + "u0 = 1\n")
    assert set(PRESETS) == {"flat", "sine_admissible", "sine_blowup", "separable",
                            "traveling_wave"}


def test_line_padding_keeps_window_clear():
    sc = parse_config("[domain]\nkind = line\nx_min = -1\nx_max = 1\nn = 100\n"
                      "[time]\nt_end = 0.5\n[initial]\nu0 = 4\nu1 = 0\n")
    left, right = padding_cells(sc)
    # speed 1/2, so 0.25 of travel = 12.5 cells
    assert left == right == 13
    setup = prepare(sc)
    assert np.allclose(setup.grid.centers[setup.window], sc.window.centers)


def test_radial_inner_padding_respects_ten_cells():
    sc = parse_config("[domain]\nkind = radial\nr_min = 1\nr_max = 2\nn = 100\n"
                      "[time]\nt_end = 0.5\n[initial]\nu0 = 1\nu1 = 0\n")
    setup = prepare(sc)
    assert setup.grid.x_min >= 10 * setup.grid.dx - 1e-12


def test_override():
    sc = parse_config(TORUS.replace("{out}", "o"))
    assert with_override(sc, "n", "32").n == 32
    with pytest.raises(ConfigurationError):
        with_override(sc, "t_end", "1")


def test_cli_run_writes_deterministic_csv(tmp_path, capsys):
    cfg = _write(tmp_path, TORUS)
    assert main(["-q", "run", cfg]) == 0
    fields = (tmp_path / "out" / "fields.csv").read_bytes()
    volume = (tmp_path / "out" / "volume.csv").read_text()
    assert fields.splitlines()[0].decode() == FIELD_HEADER
    row = fields.splitlines()[1].decode().split(",")
    assert len(row) == 8 and row[2].count("e") == 1 and len(row[2].split("e")[0].lstrip("-")) == 13
    assert volume.startswith("t,V\n")
    assert main(["-q", "run", cfg]) == 0
    assert (tmp_path / "out" / "fields.csv").read_bytes() == fields


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["-q", "run", _write(tmp_path, TORUS.replace("1 + 0.3*cos(x)", "cos(x)"))]) == 2
    assert "config error" in capsys.readouterr().err
    assert main(["-q", "run", str(tmp_path / "missing.ini")]) == 2
    blow = _write(tmp_path, "[initial]\npreset = sine_blowup\n[domain]\nn = 512\n"
                            "[output]\ndir = {out}\n", "blow.ini")
    assert main(["-q", "run", blow]) == 10
    rep = json.loads((tmp_path / "out" / "blowup_report.json").read_text())
    assert rep["signal_kind"] == "gradient"
    assert abs(rep["detected_t"] / rep["predicted_tmax"] - 1) < 0.1
    capsys.readouterr()
    assert main(["-q", "predict", blow]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(2.91894, abs=1e-3)
    assert main(["presets"]) == 0
    assert "sine_blowup" in capsys.readouterr().out


def test_sweep_rows_sorted_and_failures_recorded(tmp_path):
    sc = parse_config(TORUS.replace("{out}", str(tmp_path)))
    rows = sweep(sc, "n", ["64", "32", "5"], jobs=2)
    assert [v for v, _ in rows] == ["5", "32", "64"]
    assert rows[0][1]["error"] and not rows[1][1]["error"]
    assert rows[1][1]["volume_slope"] == pytest.approx(0.2 * 2 * math.pi, rel=1e-3)
    assert sweep(sc, "n", ["", " "]) == []
    path = tmp_path / "sweep.csv"
    write_summary(path, rows)
    lines = path.read_text().splitlines()
    assert lines[0] == SUMMARY_HEADER and len(lines) == 4


def test_run_scenario_without_writing(tmp_path):
    sc = parse_config(TORUS.replace("{out}", str(tmp_path / "nothing")))
    res = run_scenario(sc, write=False)
    assert res.status == 0 and res.files == [] and not (tmp_path / "nothing").exists()
