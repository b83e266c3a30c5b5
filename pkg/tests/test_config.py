"""Tests for RunConfig validation and builders."""
import math

import numpy as np
import pytest

from rotorsim.cli.config import (
    build_binding,
    build_distribution,
    build_geometry,
    build_parameters,
    grid_values,
    load_config,
    output_dir,
    theta,
    validate_config,
)
from rotorsim.exceptions import ConfigError, DataError

STATE = {"f_rot_hz": 100e3, "sigma_l": 46.0}
RABI = {"omega_rabi_hz": 5e3, "delta_l": 2, "time_grid_s": {"stop": 1e-3, "points": 11}}


def test_defaults_are_filled():
    config = validate_config("rabi", {"state": STATE, "experiment": RABI})
    assert config["version"] == 1
    assert config["geometry"]["omega_x_hz"] == 845e3
    assert config["geometry"]["wavelength_nm"] == 729.0
    assert config["geometry"]["theta_deg"] == 0.0
    assert config["state"]["n_cut"] == 6.0
    assert config["experiment"]["detuning_hz"] == 0.0
    assert config["experiment"]["time_grid_s"]["start"] == 0.0
    assert config["output"] == {"dir": "rotorsim_out", "basename": "rabi", "svg": False}


def test_lines_needs_no_experiment_block():
    config = validate_config("lines", {"state": STATE})
    assert config["experiment"]["orders"] == [-1, 0, 1]


@pytest.mark.parametrize(
    "raw, field_path",
    [
        ({"state": {"f_rot_hz": 1e3, "sigma_l": -1.0}, "experiment": RABI}, "state.sigma_l"),
        ({"state": {"f_rot_hz": 1e3}, "experiment": RABI}, "state"),
        ({"state": {"f_rot_hz": 1e3, "sigma_l": 1.0, "temperature_mk": 1.0}, "experiment": RABI}, "state"),
        ({"geometry": {"theta_deg": 95.0}, "state": STATE, "experiment": RABI}, "geometry.theta_deg"),
        ({"state": STATE, "experiment": {**RABI, "time_grid_s": {"stop": 1e-3}}}, "experiment.time_grid_s"),
        (
            {"state": STATE, "experiment": {**RABI, "time_grid_s": {"values": [0.0], "points": 3}}},
            "experiment.time_grid_s",
        ),
        ({"state": STATE}, "experiment"),
        ({"experiment": RABI}, "state"),
        ({"version": 2, "state": STATE, "experiment": RABI}, "version"),
    ],
)
def test_invalid_fields_are_named(raw, field_path):
    with pytest.raises(ConfigError) as err:
        validate_config("rabi", raw)
    assert err.value.field_path == field_path
    assert str(err.value).startswith(field_path)


def test_spinup_occupations_are_exclusive():
    experiment = {
        "f_target_hz": 100e3,
        "t_spin_s": 50e-6,
        "t_release_s": 1e-3,
        "omega_tilt_hz": 280e3,
        "nbar": 10.0,
        "tilt_temperature_mk": 0.5,
    }
    with pytest.raises(ConfigError):
        validate_config("spinup", {"experiment": experiment})
    del experiment["tilt_temperature_mk"]
    config = validate_config("spinup", {"experiment": experiment})
    assert config["experiment"]["ramp_profile"] == "constant_acceleration"
    assert config["experiment"]["calibrate"] is True


def test_unknown_command():
    with pytest.raises(ConfigError):
        validate_config("orbit", {})


def test_load_config(write_config, tmp_path):
    config = load_config("rabi", write_config({"state": STATE, "experiment": RABI}))
    assert config["state"]["sigma_l"] == STATE["sigma_l"]
    assert "_base_dir" not in config

    with pytest.raises(DataError):
        load_config("rabi", tmp_path / "missing.json")

    broken = tmp_path / "broken.json"
    broken.write_text("{\"state\": ", encoding="utf-8")
    with pytest.raises(ConfigError, match="invalid JSON"):
        load_config("rabi", broken)


def test_fit_trace_paths_follow_the_config_file(write_config, tmp_path):
    elsewhere = tmp_path / "elsewhere" / "b.csv"
    payload = {
        "experiment": {
            "parameters": [{"name": "omega", "quantity": "omega_rabi_hz", "initial": 5e3}],
            "datasets": [
                {"path": "a.csv", "kind": "rabi", "parameters": ["omega"]},
                {"path": str(elsewhere), "kind": "rabi", "parameters": ["omega"]},
            ],
        }
    }
    config = load_config("fit", write_config(payload))
    datasets = config["experiment"]["datasets"]
    assert datasets[0]["path"] == str(tmp_path / "a.csv")
    assert datasets[1]["path"] == str(elsewhere)
    assert "_base_dir" not in config


def test_grid_values():
    np.testing.assert_allclose(grid_values({"start": 1.0, "stop": 2.0, "points": 3}, "g"), [1.0, 1.5, 2.0])
    np.testing.assert_allclose(grid_values({"start": 0.0, "values": [3.0, 1.0]}, "g"), [3.0, 1.0])
    with pytest.raises(DataError, match="experiment.time_grid_s"):
        grid_values({"start": 0.0, "stop": 1.0, "points": 0}, "experiment.time_grid_s")
    with pytest.raises(DataError):
        grid_values({"start": 0.0, "values": []}, "g")


def test_state_builders():
    config = validate_config(
        "rabi", {"geometry": {"theta_deg": 90}, "state": {"f_rot_hz": 0.0, "sigma_l": 10.0}, "experiment": RABI}
    )
    geometry = build_geometry(config)
    assert geometry.omega_x == pytest.approx(2.0 * math.pi * 845e3)
    assert theta(config) == math.pi / 2.0
    dist = build_distribution(config, geometry)
    assert dist.sigma_l == pytest.approx(10.0)


def fit_config(parameters, datasets):
    return validate_config("fit", {"experiment": {"parameters": parameters, "datasets": datasets}})


def test_parameters_are_scaled_to_internal_units():
    config = fit_config(
        [
            {"name": "omega", "quantity": "omega_rabi_hz", "initial": 5e3, "lower": 1e3, "upper": 1e4},
            {"name": "theta", "quantity": "theta_deg", "initial": 80.0},
            {"name": "detuning", "quantity": "detuning_hz", "initial": [1e3, None], "shared": False},
        ],
        [{"path": "a.csv", "kind": "rabi", "parameters": ["omega"]}],
    )
    omega, angle, detuning = build_parameters(config["experiment"])
    assert omega.quantity == "omega"
    assert omega.initial == pytest.approx(2.0 * math.pi * 5e3)
    assert omega.lower == pytest.approx(2.0 * math.pi * 1e3)
    assert omega.upper == pytest.approx(2.0 * math.pi * 1e4)
    assert angle.initial == pytest.approx(math.radians(80.0))
    assert detuning.initial == [pytest.approx(2.0 * math.pi * 1e3), None]
    assert not detuning.shared


def test_list_initial_needs_unshared_parameter():
    config = fit_config(
        [{"name": "detuning", "quantity": "detuning_hz", "initial": [1e3, 2e3]}],
        [{"path": "a.csv", "kind": "ramsey", "parameters": ["detuning"]}],
    )
    with pytest.raises(ConfigError) as err:
        build_parameters(config["experiment"])
    assert err.value.field_path == "experiment.parameters.0.initial"


def test_bindings():
    config = fit_config(
        [
            {"name": "angle", "quantity": "theta_deg"},
            {"name": "rate", "quantity": "f_rot_hz"},
            {"name": "other_rate", "quantity": "f_rot_hz"},
        ],
        [
            {
                "path": "s.csv",
                "kind": "spectrum",
                "parameters": ["angle", "rate"],
                "fixed": {"omega_rabi_hz": 2e3, "probe_time_s": 250e-6, "sigma_l": 46, "max_order": 6},
            },
            {"path": "s.csv", "kind": "spectrum", "parameters": ["missing"]},
            {"path": "s.csv", "kind": "spectrum", "parameters": ["rate", "other_rate"]},
        ],
    )
    by_name = {parameter.name: parameter for parameter in build_parameters(config["experiment"])}
    datasets = config["experiment"]["datasets"]

    binding = build_binding(datasets[0], by_name, config, 0)
    assert binding.parameters == {"theta": "angle", "f_rot": "rate"}
    assert binding.fixed["omega"] == pytest.approx(2.0 * math.pi * 2e3)
    assert binding.fixed["max_order"] == 6
    assert binding.fixed["wavelength"] == pytest.approx(729e-9)

    with pytest.raises(ConfigError, match="undeclared") as err:
        build_binding(datasets[1], by_name, config, 1)
    assert err.value.field_path == "experiment.datasets.1.parameters"
    with pytest.raises(ConfigError, match="f_rot"):
        build_binding(datasets[2], by_name, config, 2)


def test_output_dir_is_created(tmp_path):
    config = validate_config("lines", {"state": STATE, "output": {"dir": str(tmp_path / "a" / "b")}})
    assert output_dir(config).is_dir()
    assert output_dir(config, str(tmp_path / "c")) == tmp_path / "c"
    assert (tmp_path / "c").is_dir()
