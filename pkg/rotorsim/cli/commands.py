"""Subcommand implementations."""
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from ..const import (
    COMMAND_FIT,
    COMMAND_LINES,
    COMMAND_RABI,
    COMMAND_RAMSEY,
    COMMAND_SPECTRUM,
    COMMAND_SPINUP,
    CONF_BASENAME,
    CONF_CALIBRATE,
    CONF_DATASETS,
    CONF_DELTA_L,
    CONF_DETUNING_GRID_HZ,
    CONF_DETUNING_HZ,
    CONF_DT_S,
    CONF_EXPERIMENT,
    CONF_F_ROT_HZ,
    CONF_F_TARGET_HZ,
    CONF_IDEAL_PULSES,
    CONF_KIND,
    CONF_MAX_ITERATIONS,
    CONF_MAX_ORDER,
    CONF_MULTI_START,
    CONF_N_TRAJ,
    CONF_NAME,
    CONF_NBAR,
    CONF_OMEGA_RABI_HZ,
    CONF_OMEGA_TILT_HZ,
    CONF_ORDERS,
    CONF_OUTPUT,
    CONF_PATH,
    CONF_PROBE_TIME_S,
    CONF_PULSE_DURATION_S,
    CONF_RAMP_PROFILE,
    CONF_SEEDS,
    CONF_SHOTS,
    CONF_STATE,
    CONF_SVG,
    CONF_T_FREE_S,
    CONF_T_PIN_S,
    CONF_T_RELEASE_S,
    CONF_T_SPIN_S,
    CONF_TILT_TEMPERATURE_MK,
    CONF_TIME_GRID_S,
    CONF_TRAJECTORY_SAMPLES,
    CONF_WAIT_GRID_S,
    CONF_WAVEFORM_POINTS,
    DEFAULT_NBAR,
    EXIT_NUMERICAL,
    EXIT_OK,
    FIT_PARAMETER_UNITS,
    KIND_RABI,
    KIND_RAMSEY,
    KIND_SPECTRUM,
    LOGGER_NAME,
    VERSION,
)
from ..dynamics.ramsey import RamseyConfig, envelope_decay_time, ramsey_trace
from ..dynamics.rabi import rabi_trace
from ..dynamics.spectrum import SpectrumScan, spectrum_scan
from ..exceptions import DataError, FitError
from ..fitting.dataset import Dataset
from ..fitting.fit import fit, fitted_curve
from ..fitting.models import auto_max_order
from ..fitting.problem import FitProblem
from ..physics.drive import LaserDrive
from ..physics.lines import transition_lines
from ..spinup.ensemble import monte_carlo_release, trajectory_seed
from ..spinup.export import export_trajectory_csv, export_waveform_csv
from ..spinup.integrator import integrate_trajectory
from ..spinup.thermal import ThermalOccupation, sample_thermal_tilt
from ..spinup.waveform import build_waveform
from ..utils import derive_seed, to_angular, to_hz
from .config import (
    build_binding,
    build_distribution,
    build_geometry,
    build_parameters,
    grid_values,
    output_dir,
    theta,
    wavelength,
)
from .svg import Plot, write_svg
from .trace_io import read_trace, write_table, write_trace

_LOGGER = logging.getLogger(LOGGER_NAME)

MODEL_CURVE_POINTS = 400
LINE_COLUMNS = ["l", "delta_l", "frequency_hz", "group_offset_hz", "height"]


@dataclass
class CommandOptions:
    """Command-line overrides shared by every subcommand."""

    seed: int = 0
    out: Optional[str] = None
    svg: bool = False
    threads: Optional[int] = None


@dataclass
class CommandOutcome:
    """Files written and the exit code of a command."""

    written: List[Path] = field(default_factory=list)
    exit_code: int = EXIT_OK
    summary: Dict[str, Any] = field(default_factory=dict)


def _target(config: Dict[str, Any], options: CommandOptions, suffix: str) -> Path:
    return output_dir(config, options.out) / f"{config[CONF_OUTPUT][CONF_BASENAME]}{suffix}"


def _wants_svg(config: Dict[str, Any], options: CommandOptions) -> bool:
    return options.svg or config[CONF_OUTPUT][CONF_SVG]


def write_json(path: Path, payload: Dict[str, Any]) -> Path:
    """Write a report with sorted keys."""
    try:
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as err:
        raise DataError(f"cannot write: {err.strerror or err}", path=str(path)) from err
    return path


def cmd_spectrum(config: Dict[str, Any], options: CommandOptions) -> CommandOutcome:
    """Simulated sideband spectrum over a detuning grid."""
    geometry = build_geometry(config)
    dist = build_distribution(config, geometry)
    experiment = config[CONF_EXPERIMENT]
    f_rot = config[CONF_STATE][CONF_F_ROT_HZ]

    detuning_hz = grid_values(experiment[CONF_DETUNING_GRID_HZ], f"{CONF_EXPERIMENT}.{CONF_DETUNING_GRID_HZ}")
    laser = LaserDrive(
        omega_rabi=to_angular(experiment[CONF_OMEGA_RABI_HZ]), theta=theta(config), wavelength=wavelength(config)
    )
    max_order = experiment.get(CONF_MAX_ORDER)
    if max_order is None:
        max_order = auto_max_order(laser, geometry.r_e)
    scan = SpectrumScan.symmetric(max_order, experiment[CONF_PROBE_TIME_S], to_angular(detuning_hz))
    scan = spectrum_scan(geometry, dist, laser, scan, f_rot=f_rot)

    outcome = CommandOutcome(
        summary={"groups_overlap": scan.groups_overlap, "resolvable_order": scan.resolvable_order}
    )
    csv_path = _target(config, options, ".csv")
    outcome.written.append(write_trace(csv_path, KIND_SPECTRUM, detuning_hz, scan.excitation))
    if _wants_svg(config, options):
        plot = Plot("Sideband spectrum", "detuning (Hz)", "excitation")
        plot.add("simulation", detuning_hz, scan.excitation)
        plot.annotations = [(order * f_rot, f"{order:+d}") for order in scan.included_orders]
        outcome.written.append(write_svg(plot, _target(config, options, ".svg")))
    _LOGGER.info("Spectrum over %d detunings with orders up to %d", detuning_hz.size, max_order)
    return outcome


def cmd_rabi(config: Dict[str, Any], options: CommandOptions) -> CommandOutcome:
    """Rabi flop of one sideband."""
    geometry = build_geometry(config)
    dist = build_distribution(config, geometry)
    experiment = config[CONF_EXPERIMENT]

    times = grid_values(experiment[CONF_TIME_GRID_S], f"{CONF_EXPERIMENT}.{CONF_TIME_GRID_S}")
    drive = LaserDrive(
        omega_rabi=to_angular(experiment[CONF_OMEGA_RABI_HZ]),
        theta=theta(config),
        wavelength=wavelength(config),
        delta_l=experiment[CONF_DELTA_L],
        detuning=to_angular(experiment[CONF_DETUNING_HZ]),
    )
    excitation = rabi_trace(geometry, dist, drive, times)

    outcome = CommandOutcome(summary={"max_excitation": float(np.max(excitation))})
    outcome.written.append(write_trace(_target(config, options, ".csv"), KIND_RABI, times, excitation))
    if _wants_svg(config, options):
        plot = Plot(f"Rabi oscillation, delta_l = {drive.delta_l}", "time (s)", "excitation")
        plot.add("simulation", times, excitation)
        outcome.written.append(write_svg(plot, _target(config, options, ".svg")))
    _LOGGER.info("Rabi trace over %d times on %d manifolds", times.size, len(dist))
    return outcome


def cmd_ramsey(config: Dict[str, Any], options: CommandOptions) -> CommandOutcome:
    """Ramsey fringe of one sideband."""
    geometry = build_geometry(config)
    dist = build_distribution(config, geometry)
    experiment = config[CONF_EXPERIMENT]

    waits = grid_values(experiment[CONF_WAIT_GRID_S], f"{CONF_EXPERIMENT}.{CONF_WAIT_GRID_S}")
    ramsey = RamseyConfig(
        delta_l=experiment[CONF_DELTA_L],
        omega_rabi=to_angular(experiment[CONF_OMEGA_RABI_HZ]),
        overall_detuning=to_angular(experiment[CONF_DETUNING_HZ]),
        wait_grid=waits,
        pulse_duration=experiment.get(CONF_PULSE_DURATION_S),
        ideal_pulses=experiment[CONF_IDEAL_PULSES],
    )
    excitation = ramsey_trace(geometry, dist, ramsey)
    decay = envelope_decay_time(geometry, dist.sigma_l, ramsey.delta_l)

    outcome = CommandOutcome(summary={"envelope_decay_time_s": decay})
    outcome.written.append(write_trace(_target(config, options, ".csv"), KIND_RAMSEY, waits, excitation))
    if _wants_svg(config, options):
        plot = Plot(f"Ramsey fringe, delta_l = {ramsey.delta_l}", "wait time (s)", "excitation")
        plot.add("simulation", waits, excitation)
        outcome.written.append(write_svg(plot, _target(config, options, ".svg")))
    _LOGGER.info("Ramsey trace over %d waits, envelope 1/e time %.4g s", waits.size, decay)
    return outcome


def cmd_lines(config: Dict[str, Any], options: CommandOptions) -> CommandOutcome:
    """Table of individual transition lines."""
    geometry = build_geometry(config)
    dist = build_distribution(config, geometry)
    f_rot = config[CONF_STATE][CONF_F_ROT_HZ]
    lines = transition_lines(geometry, dist, config[CONF_EXPERIMENT][CONF_ORDERS], f_rot=f_rot or None)

    columns = [
        np.array([line.l for line in lines], dtype=float),
        np.array([line.delta_l for line in lines], dtype=float),
        np.array([line.frequency_hz for line in lines]),
        np.array([line.group_offset_hz for line in lines]),
        np.array([line.height for line in lines]),
    ]
    outcome = CommandOutcome(summary={"lines": len(lines)})
    outcome.written.append(write_table(_target(config, options, ".csv"), LINE_COLUMNS, columns))
    if _wants_svg(config, options):
        plot = Plot("Transition lines", "frequency (Hz)", "population")
        for order in config[CONF_EXPERIMENT][CONF_ORDERS]:
            mask = columns[1] == order
            plot.add(f"delta_l = {order}", columns[2][mask], columns[4][mask])
        outcome.written.append(write_svg(plot, _target(config, options, ".svg")))
    _LOGGER.info("Listed %d transition lines", len(lines))
    return outcome


def cmd_spinup(config: Dict[str, Any], options: CommandOptions) -> CommandOutcome:
    """Monte-Carlo spin-up and release with waveform and exemplar trajectory exports."""
    geometry = build_geometry(config)
    experiment = config[CONF_EXPERIMENT]
    waveform = build_waveform(
        f_target=experiment[CONF_F_TARGET_HZ],
        t_spin=experiment[CONF_T_SPIN_S],
        t_release=experiment[CONF_T_RELEASE_S],
        omega_tilt=to_angular(experiment[CONF_OMEGA_TILT_HZ]),
        geometry=geometry if experiment[CONF_CALIBRATE] else None,
        t_pin=experiment[CONF_T_PIN_S],
        t_free=experiment[CONF_T_FREE_S],
        ramp_profile=experiment[CONF_RAMP_PROFILE],
    )
    if CONF_TILT_TEMPERATURE_MK in experiment:
        occupation = ThermalOccupation(temperature=experiment[CONF_TILT_TEMPERATURE_MK] * 1e-3)
    else:
        occupation = ThermalOccupation(nbar=experiment.get(CONF_NBAR, DEFAULT_NBAR))

    seed = derive_seed(options.seed, COMMAND_SPINUP)
    seeds = experiment.get(CONF_SEEDS)
    dt = experiment.get(CONF_DT_S)
    result = monte_carlo_release(
        experiment[CONF_N_TRAJ], occupation, waveform, geometry, dt=dt, seed=seed, seeds=seeds, threads=options.threads
    )

    outcome = CommandOutcome(summary={"l0_est": result.l0_est, "frequency_offset": result.frequency_offset})
    report = {
        "command": COMMAND_SPINUP,
        "version": VERSION,
        "seed": options.seed,
        "waveform": {
            "f_target_hz": waveform.f_target,
            "t_pin_s": waveform.t_pin,
            "t_spin_s": waveform.t_spin,
            "t_release_s": waveform.t_release,
            "t_free_s": waveform.t_free,
            "omega_tilt_hz": to_hz(waveform.omega_tilt),
            "quad_strength_s2": waveform.quad_strength,
            "ramp_profile": waveform.ramp_profile,
        },
        "occupation": {"nbar": occupation.mean_occupation(waveform.omega_tilt)},
        "ensemble": result.as_dict(),
    }
    outcome.written.append(write_json(_target(config, options, "_report.json"), report))

    step = waveform.duration / (experiment[CONF_WAVEFORM_POINTS] - 1)
    outcome.written.append(export_waveform_csv(waveform, _target(config, options, "_waveform.csv"), step))

    initial = sample_thermal_tilt(
        occupation, waveform.omega_tilt, geometry, trajectory_seed(seed, 0, seeds), waveform.quad_strength
    )
    exemplar = integrate_trajectory(
        initial, waveform, geometry, dt, waveform.duration, experiment[CONF_TRAJECTORY_SAMPLES]
    )
    outcome.written.append(export_trajectory_csv(exemplar, geometry, _target(config, options, "_trajectory.csv")))

    if _wants_svg(config, options):
        times = np.linspace(0.0, waveform.duration, experiment[CONF_WAVEFORM_POINTS])
        plot = Plot("Spin-up waveform", "time (s)", "normalized amplitude")
        plot.add("amplitude", times, [waveform.amplitude(t) for t in times])
        plot.add("alpha0 rate / target", times, [_rate_fraction(waveform, t) for t in times], dashed=True)
        outcome.written.append(write_svg(plot, _target(config, options, ".svg")))
    return outcome


def _rate_fraction(waveform, t: float) -> float:
    if waveform.target_rate == 0:
        return 0.0
    return waveform.alpha0_rate(t) / waveform.target_rate


def _load_dataset(entry: Dict[str, Any]) -> Dataset:
    path = Path(entry[CONF_PATH])
    kind = entry[CONF_KIND]
    x, y, y_err = read_trace(path, kind)
    if kind == KIND_SPECTRUM:
        x = to_angular(x)
    try:
        return Dataset(kind, x, y, y_err=y_err, shots=entry.get(CONF_SHOTS), name=entry.get(CONF_NAME, path.stem))
    except FitError as err:
        raise DataError(str(err), path=str(path)) from err


def _config_units(problem: FitProblem, result) -> Dict[str, Dict[str, Any]]:
    """Best fit in the units of the config quantities."""
    by_argument = {argument: (name, scale) for name, (argument, scale) in FIT_PARAMETER_UNITS.items()}
    converted = {}
    for label in result.labels:
        parameter = problem.parameters[label.split("[", 1)[0]]
        quantity, scale = by_argument[parameter.quantity]
        converted[label] = {
            "quantity": quantity,
            "value": result.best_fit[label] / scale,
            "uncertainty": result.uncertainties[label] / scale
            if math.isfinite(result.uncertainties[label])
            else None,
        }
    return converted


def cmd_fit(config: Dict[str, Any], options: CommandOptions) -> CommandOutcome:
    """Joint fit of trace files; the report is written even when the fit fails to converge."""
    geometry = build_geometry(config)
    experiment = config[CONF_EXPERIMENT]

    parameters = build_parameters(experiment)
    by_name = {parameter.name: parameter for parameter in parameters}
    datasets = []
    bindings = []
    for index, entry in enumerate(experiment[CONF_DATASETS]):
        datasets.append(_load_dataset(entry))
        bindings.append(build_binding(entry, by_name, config, index))
    problem = FitProblem(datasets, parameters, bindings, geometry)
    result = fit(
        problem,
        multi_start=experiment[CONF_MULTI_START],
        seed=options.seed,
        max_iterations=experiment[CONF_MAX_ITERATIONS],
    )

    report = result.as_dict()
    report.update(
        {
            "command": COMMAND_FIT,
            "version": VERSION,
            "seed": options.seed,
            "datasets": [
                {"name": dataset.name, "kind": dataset.kind, "path": entry[CONF_PATH], "n_points": len(dataset)}
                for dataset, entry in zip(datasets, experiment[CONF_DATASETS])
            ],
            "config_units": _config_units(problem, result),
        }
    )
    outcome = CommandOutcome(
        exit_code=EXIT_OK if result.converged else EXIT_NUMERICAL,
        summary={"converged": result.converged, "chi2": result.chi2},
    )
    outcome.written.append(write_json(_target(config, options, "_report.json"), report))

    if _wants_svg(config, options):
        for index, dataset in enumerate(datasets):
            dense = np.linspace(float(np.min(dataset.x)), float(np.max(dataset.x)), MODEL_CURVE_POINTS)
            curve = fitted_curve(problem, result, index, dense)
            scale = 1.0 / (2.0 * math.pi) if dataset.kind == KIND_SPECTRUM else 1.0
            x_label = "detuning (Hz)" if dataset.kind == KIND_SPECTRUM else "time (s)"
            order = np.argsort(dataset.x, kind="stable")
            plot = Plot(f"Fit of {dataset.name}", x_label, "excitation")
            plot.add("data", dataset.x[order] * scale, dataset.y[order])
            plot.add("model", dense * scale, curve, dashed=True)
            outcome.written.append(write_svg(plot, _target(config, options, f"_{index}.svg")))

    if not result.converged:
        _LOGGER.warning("Fit report written with converged = false: %s", result.message)
    return outcome


COMMAND_HANDLERS: Dict[str, Callable[[Dict[str, Any], CommandOptions], CommandOutcome]] = {
    COMMAND_SPECTRUM: cmd_spectrum,
    COMMAND_RABI: cmd_rabi,
    COMMAND_RAMSEY: cmd_ramsey,
    COMMAND_LINES: cmd_lines,
    COMMAND_SPINUP: cmd_spinup,
    COMMAND_FIT: cmd_fit,
}
