"""Tests for the rotorsim command line."""
import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from rotorsim.cli import build_parser, main
from rotorsim.cli.svg import Plot, write_svg
from rotorsim.cli.trace_io import read_trace, write_trace
from rotorsim.exceptions import DataError
from rotorsim.fitting import rabi_model, ramsey_model
from rotorsim.physics import RotorGeometry

STATE = {"f_rot_hz": 100e3, "sigma_l": 46.0}
GEOMETRY = {"theta_deg": 82.4}
SPECTRUM = {
    "geometry": GEOMETRY,
    "state": STATE,
    "experiment": {
        "omega_rabi_hz": 2e3,
        "probe_time_s": 250e-6,
        "detuning_grid_hz": {"start": -250e3, "stop": 250e3, "points": 501},
    },
}
SPINUP = {
    "experiment": {
        "f_target_hz": 100e3,
        "t_spin_s": 20e-6,
        "t_release_s": 100e-6,
        "omega_tilt_hz": 280e3,
        "calibrate": False,
        "nbar": 10.0,
        "n_traj": 4,
        "trajectory_samples": 11,
        "waveform_points": 101,
    }
}


def run(write_config, tmp_path, command, payload, *extra):
    payload = {**payload, "output": {"dir": str(tmp_path / "out"), **payload.get("output", {})}}
    return main([command, "--config", write_config(payload), *extra])


def svg_polylines(path):
    return [element for element in ET.parse(path).getroot().iter() if element.tag.endswith("polyline")]


def test_parser_lists_every_command():
    parser = build_parser()
    args = parser.parse_args(["fit", "--config", "c.json", "--seed", "7", "-q"])
    assert args.command == "fit"
    assert args.seed == 7
    assert args.quiet and not args.verbose


def test_usage_errors_exit_one(capsys):
    assert main([]) == 1
    assert main(["orbit", "--config", "c.json"]) == 1
    assert main(["rabi"]) == 1
    assert main(["rabi", "--config", "c.json", "-v", "-q"]) == 1
    assert "usage" in capsys.readouterr().err


def test_missing_config_exits_two(tmp_path, capsys):
    assert main(["rabi", "--config", str(tmp_path / "nope.json")]) == 2
    assert "nope.json" in capsys.readouterr().err


def test_invalid_config_names_the_field(write_config, tmp_path, capsys):
    payload = {
        "state": {"f_rot_hz": 1e3, "sigma_l": -2.0},
        "experiment": {"omega_rabi_hz": 5e3, "delta_l": 2, "time_grid_s": {"stop": 1e-3, "points": 5}},
    }
    assert run(write_config, tmp_path, "rabi", payload) == 1
    assert "state.sigma_l" in capsys.readouterr().err


def test_spectrum_command(write_config, tmp_path, capsys):
    assert run(write_config, tmp_path, "spectrum", SPECTRUM, "--svg") == 0
    detuning, excitation, errors = read_trace(tmp_path / "out" / "spectrum.csv", "spectrum")
    assert detuning.size == 501
    assert detuning[0] == pytest.approx(-250e3)
    assert errors is None
    assert np.all((excitation >= 0) & (excitation <= 1))
    assert excitation[np.argmin(np.abs(detuning - 100e3))] > excitation[np.argmin(np.abs(detuning - 50e3))]

    assert len(svg_polylines(tmp_path / "out" / "spectrum.svg")) == 1
    err = capsys.readouterr().err
    assert "Wrote" in err
    assert "spectrum.csv" in err


def test_rabi_command_with_out_override(write_config, tmp_path):
    payload = {
        "geometry": GEOMETRY,
        "state": STATE,
        "experiment": {"omega_rabi_hz": 5e3, "delta_l": 2, "time_grid_s": {"stop": 1e-3, "points": 50}},
        "output": {"basename": "flop"},
    }
    assert run(write_config, tmp_path, "rabi", payload, "--out", str(tmp_path / "elsewhere")) == 0
    times, excitation, _ = read_trace(tmp_path / "elsewhere" / "flop.csv", "rabi")
    assert times.size == 50
    assert excitation[0] == pytest.approx(0.0, abs=1e-12)
    assert not (tmp_path / "out").exists()


def test_ramsey_command_quiet(write_config, tmp_path, capsys):
    payload = {
        "geometry": GEOMETRY,
        "state": STATE,
        "experiment": {
            "omega_rabi_hz": 25e3,
            "delta_l": 1,
            "detuning_hz": 6e3,
            "wait_grid_s": {"values": [0.0, 1e-4, 2e-4, 3e-4]},
        },
        "output": {"svg": True},
    }
    assert run(write_config, tmp_path, "ramsey", payload, "-q") == 0
    waits, _, _ = read_trace(tmp_path / "out" / "ramsey.csv", "ramsey")
    np.testing.assert_allclose(waits, [0.0, 1e-4, 2e-4, 3e-4])
    assert (tmp_path / "out" / "ramsey.svg").is_file()
    assert "INFO" not in capsys.readouterr().err


def test_lines_command(write_config, tmp_path):
    payload = {"state": {"f_rot_hz": 100e3, "sigma_l": 5.0}, "experiment": {"orders": [0, 1]}}
    assert run(write_config, tmp_path, "lines", payload) == 0
    rows = (tmp_path / "out" / "lines.csv").read_text(encoding="utf-8").splitlines()
    assert rows[0] == "l,delta_l,frequency_hz,group_offset_hz,height"
    table = np.array([[float(cell) for cell in row.split(",")] for row in rows[1:]])
    assert set(table[:, 1]) == {0.0, 1.0}
    assert np.all(table[table[:, 1] == 0.0, 2] == 0.0)
    assert np.sum(table[table[:, 1] == 1.0, 4]) == pytest.approx(1.0, rel=1e-9)


def test_empty_grid_is_a_data_error(write_config, tmp_path, capsys):
    payload = {
        "state": STATE,
        "experiment": {"omega_rabi_hz": 5e3, "delta_l": 2, "time_grid_s": {"stop": 1e-3, "points": 0}},
    }
    assert run(write_config, tmp_path, "rabi", payload) == 2
    assert "experiment.time_grid_s" in capsys.readouterr().err


def test_spinup_command(write_config, tmp_path):
    assert run(write_config, tmp_path, "spinup", SPINUP, "--seed", "3", "--threads", "1") == 0
    out = tmp_path / "out"
    report = json.loads((out / "spinup_report.json").read_text(encoding="utf-8"))
    assert report["seed"] == 3
    assert report["waveform"]["omega_tilt_hz"] == pytest.approx(280e3)
    assert report["ensemble"]["trajectories_kept"] == 4
    assert report["occupation"]["nbar"] == pytest.approx(10.0)

    waveform_rows = (out / "spinup_waveform.csv").read_text(encoding="utf-8").splitlines()
    assert waveform_rows[0].split(",")[:3] == ["time_s", "alpha0_rad", "amplitude_norm"]
    assert len(waveform_rows) == 102
    trajectory_rows = (out / "spinup_trajectory.csv").read_text(encoding="utf-8").splitlines()
    assert trajectory_rows[0].endswith("l_quanta")
    assert len(trajectory_rows) - 1 >= 11


@pytest.mark.parametrize(
    "command, payload, extra",
    [("spectrum", SPECTRUM, ("--svg",)), ("spinup", SPINUP, ("--seed", "3", "--threads", "1"))],
)
def test_rerun_writes_identical_files(write_config, tmp_path, command, payload, extra):
    for name in ("first", "second"):
        assert run(write_config, tmp_path, command, payload, *extra, "--out", str(tmp_path / name)) == 0
    first = sorted(path.name for path in (tmp_path / "first").iterdir())
    assert first
    assert first == sorted(path.name for path in (tmp_path / "second").iterdir())
    for name in first:
        assert (tmp_path / "first" / name).read_bytes() == (tmp_path / "second" / name).read_bytes(), name


def write_rabi_trace(path, omega_hz=5e3, sigma_l=100.0):
    geometry = RotorGeometry.from_trap()
    times = np.linspace(20e-6, 400e-6, 80)
    excitation = rabi_model(geometry, times, omega=2.0 * math.pi * omega_hz, delta_l=2, sigma_l=sigma_l)
    write_trace(path, "rabi", times, excitation, np.full(times.size, 0.01))


def test_fit_command(write_config, tmp_path):
    write_rabi_trace(tmp_path / "flop.csv")
    payload = {
        "experiment": {
            "parameters": [
                {"name": "omega", "quantity": "omega_rabi_hz", "initial": 5.1e3},
                {"name": "width", "quantity": "sigma_l", "initial": 95.0},
            ],
            "datasets": [
                {"path": "flop.csv", "kind": "rabi", "parameters": ["omega", "width"], "fixed": {"delta_l": 2}}
            ],
        }
    }
    assert run(write_config, tmp_path, "fit", payload, "--svg") == 0
    out = tmp_path / "out"
    report = json.loads((out / "fit_report.json").read_text(encoding="utf-8"))
    assert report["converged"] is True
    assert report["datasets"][0]["n_points"] == 80
    assert report["datasets"][0]["name"] == "flop"
    omega = report["config_units"]["omega"]
    assert omega["quantity"] == "omega_rabi_hz"
    assert omega["value"] == pytest.approx(5e3, rel=1e-6)
    assert report["config_units"]["width"]["value"] == pytest.approx(100.0, rel=1e-5)
    assert len(svg_polylines(out / "fit_0.svg")) == 2


def test_unconverged_fit_still_reports(write_config, tmp_path, capsys):
    geometry = RotorGeometry.from_trap()
    waits = np.linspace(0.0, 3e-4, 60)
    fringe = ramsey_model(
        geometry, waits, detuning=2.0 * math.pi * 6e3, omega=1.0, delta_l=1, sigma_l=40.0, ideal_pulses=True
    )
    write_trace(tmp_path / "fringe.csv", "ramsey", waits, fringe)
    payload = {
        "experiment": {
            "parameters": [
                {"name": "detuning", "quantity": "detuning_hz", "initial": 6e3},
                {"name": "omega", "quantity": "omega_rabi_hz", "initial": 10e3},
                {"name": "sigma_l", "quantity": "sigma_l", "initial": 40.0},
            ],
            "datasets": [
                {
                    "path": "fringe.csv",
                    "kind": "ramsey",
                    "parameters": ["detuning", "omega", "sigma_l"],
                    "fixed": {"delta_l": 1, "ideal_pulses": True},
                }
            ],
        }
    }
    assert run(write_config, tmp_path, "fit", payload) == 3
    report = json.loads((tmp_path / "out" / "fit_report.json").read_text(encoding="utf-8"))
    assert report["converged"] is False
    assert "converged = false" in capsys.readouterr().err


def test_fit_with_missing_trace_exits_two(write_config, tmp_path, capsys):
    payload = {
        "experiment": {
            "parameters": [{"name": "omega", "quantity": "omega_rabi_hz", "initial": 5e3}],
            "datasets": [
                {"path": "absent.csv", "kind": "rabi", "parameters": ["omega"], "fixed": {"delta_l": 1, "sigma_l": 3}}
            ],
        }
    }
    assert run(write_config, tmp_path, "fit", payload) == 2
    assert "absent.csv" in capsys.readouterr().err


def test_read_trace_skips_blank_rows_and_reads_errors(tmp_path):
    path = tmp_path / "trace.csv"
    path.write_text("time_s,excitation,excitation_err\n0,0.1,0.01\n\n1e-4,0.2,0.02\n, ,\n", encoding="utf-8")
    x, y, y_err = read_trace(path, "rabi")
    np.testing.assert_allclose(x, [0.0, 1e-4])
    np.testing.assert_allclose(y, [0.1, 0.2])
    np.testing.assert_allclose(y_err, [0.01, 0.02])


@pytest.mark.parametrize(
    "text, location",
    [
        ("detuning_hz,excitation\n0,0.1\n", ":1"),
        ("", ":1"),
        ("time_s,excitation\n0,0.1\n1e-4\n", ":3"),
        ("time_s,excitation\n0,0.1\n1e-4,high\n", ":3"),
        ("time_s,excitation\n0,nan\n", ":2"),
    ],
)
def test_malformed_traces_name_the_line(tmp_path, text, location):
    path = tmp_path / "bad.csv"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(DataError) as err:
        read_trace(path, "rabi")
    assert err.value.path == str(path)
    assert str(err.value).startswith(f"{path}{location}")


def test_trace_without_rows(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("time_s,excitation\n", encoding="utf-8")
    with pytest.raises(DataError, match="no data rows"):
        read_trace(path, "rabi")


def test_svg_plot(tmp_path):
    plot = Plot("Check", "x", "y")
    plot.add("line", [0.0, 1.0, 2.0], [0.0, 0.5, np.nan])
    plot.add("dashed", [0.0, 2.0], [1.0, 1.0], dashed=True)
    plot.annotations = [(1.0, "+1"), (10.0, "outside")]
    path = write_svg(plot, tmp_path / "check.svg")
    root = ET.parse(path).getroot()
    lines = svg_polylines(path)
    assert [line.get("data-label") for line in lines] == ["line", "dashed"]
    assert len(lines[0].get("points").split()) == 2
    assert lines[1].get("stroke-dasharray") == "5,3"
    texts = [element.text for element in root.iter() if element.tag.endswith("text")]
    assert "+1" in texts
    assert "outside" not in texts
