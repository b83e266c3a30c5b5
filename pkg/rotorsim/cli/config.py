"""Run configuration schemas and builders."""
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import voluptuous as vol

from ..const import (
    CA40_ATOMIC_MASS_U,
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
    CONF_DIR,
    CONF_DT_S,
    CONF_EXPERIMENT,
    CONF_F_ROT_HZ,
    CONF_F_TARGET_HZ,
    CONF_FIXED,
    CONF_GEOMETRY,
    CONF_IDEAL_PULSES,
    CONF_INITIAL,
    CONF_KIND,
    CONF_L0,
    CONF_LOWER,
    CONF_MASS_U,
    CONF_MAX_ITERATIONS,
    CONF_MAX_ORDER,
    CONF_MULTI_START,
    CONF_N_CUT,
    CONF_N_TRAJ,
    CONF_NAME,
    CONF_NBAR,
    CONF_OMEGA_RABI_HZ,
    CONF_OMEGA_TILT_HZ,
    CONF_OMEGA_X_HZ,
    CONF_OMEGA_Z_HZ,
    CONF_ORDERS,
    CONF_OUTPUT,
    CONF_PARAMETERS,
    CONF_PATH,
    CONF_POINTS,
    CONF_PROBE_TIME_S,
    CONF_PULSE_DURATION_S,
    CONF_QUANTITY,
    CONF_RAMP_PROFILE,
    CONF_SEEDS,
    CONF_SHARED,
    CONF_SHOTS,
    CONF_SIGMA_L,
    CONF_START,
    CONF_STATE,
    CONF_STOP,
    CONF_SVG,
    CONF_T_FREE_S,
    CONF_T_PIN_S,
    CONF_T_RELEASE_S,
    CONF_T_SPIN_S,
    CONF_TEMPERATURE_MK,
    CONF_THETA_DEG,
    CONF_TILT_TEMPERATURE_MK,
    CONF_TIME_GRID_S,
    CONF_TRAJECTORY_SAMPLES,
    CONF_UPPER,
    CONF_VALUES,
    CONF_VARY,
    CONF_WAIT_GRID_S,
    CONF_WAVEFORM_POINTS,
    CONF_WAVELENGTH_NM,
    CONFIG_VERSION,
    DATASET_KINDS,
    DEFAULT_N_CUT,
    DEFAULT_N_TRAJ,
    DEFAULT_OMEGA_X_HZ,
    DEFAULT_OUTPUT_DIR,
    DEFAULT_TRAJECTORY_SAMPLES,
    DEFAULT_WAVEFORM_POINTS,
    DEFAULT_WAVELENGTH_NM,
    FIT_MAX_ITERATIONS,
    FIT_PARAMETER_UNITS,
    KIND_SPECTRUM,
    LOGGER_NAME,
    RAMP_CONSTANT_ACCELERATION,
    RAMP_PROFILES,
)
from ..exceptions import ConfigError, DataError
from ..fitting.problem import ModelBinding, Parameter
from ..physics.distribution import AngularDistribution
from ..physics.geometry import RotorGeometry

_LOGGER = logging.getLogger(LOGGER_NAME)

_number = vol.All(vol.Coerce(float), vol.Range(min=-1e300, max=1e300))
_positive = vol.All(vol.Coerce(float), vol.Range(min=0, min_included=False, max=1e300))
_non_negative = vol.All(vol.Coerce(float), vol.Range(min=0, max=1e300))
_integer = vol.All(vol.Coerce(int))
_non_negative_int = vol.All(vol.Coerce(int), vol.Range(min=0))


def _complete_grid(grid: Dict[str, Any]) -> Dict[str, Any]:
    """Either explicit values or stop and points."""
    if CONF_VALUES in grid:
        if any(key in grid for key in (CONF_STOP, CONF_POINTS)):
            raise vol.Invalid(f"give either {CONF_VALUES} or {CONF_STOP} and {CONF_POINTS}")
        return grid
    if CONF_STOP not in grid or CONF_POINTS not in grid:
        raise vol.Invalid(f"give {CONF_VALUES} or both {CONF_STOP} and {CONF_POINTS}")
    return grid


GRID_SCHEMA = vol.All(
    vol.Schema(
        {
            vol.Optional(CONF_START, default=0.0): _number,
            vol.Optional(CONF_STOP): _number,
            vol.Optional(CONF_POINTS): _non_negative_int,
            vol.Optional(CONF_VALUES): [_number],
        }
    ),
    _complete_grid,
)

GEOMETRY_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_MASS_U, default=CA40_ATOMIC_MASS_U): _positive,
        vol.Optional(CONF_OMEGA_X_HZ, default=DEFAULT_OMEGA_X_HZ): _positive,
        vol.Optional(CONF_OMEGA_Z_HZ): _positive,
        vol.Optional(CONF_WAVELENGTH_NM, default=DEFAULT_WAVELENGTH_NM): _positive,
        vol.Optional(CONF_THETA_DEG, default=0.0): vol.All(vol.Coerce(float), vol.Range(min=0, max=90)),
    }
)


def _exactly_one_width(state: Dict[str, Any]) -> Dict[str, Any]:
    if (CONF_SIGMA_L in state) == (CONF_TEMPERATURE_MK in state):
        raise vol.Invalid(f"give exactly one of {CONF_SIGMA_L} or {CONF_TEMPERATURE_MK}")
    return state


STATE_SCHEMA = vol.All(
    vol.Schema(
        {
            vol.Required(CONF_F_ROT_HZ): _non_negative,
            vol.Optional(CONF_SIGMA_L): _non_negative,
            vol.Optional(CONF_TEMPERATURE_MK): _positive,
            vol.Optional(CONF_N_CUT, default=DEFAULT_N_CUT): _positive,
        }
    ),
    _exactly_one_width,
)

OUTPUT_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_DIR, default=DEFAULT_OUTPUT_DIR): str,
        vol.Optional(CONF_BASENAME): vol.All(str, vol.Length(min=1)),
        vol.Optional(CONF_SVG, default=False): bool,
    }
)

SPECTRUM_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_OMEGA_RABI_HZ): _positive,
        vol.Required(CONF_PROBE_TIME_S): _positive,
        vol.Required(CONF_DETUNING_GRID_HZ): GRID_SCHEMA,
        vol.Optional(CONF_MAX_ORDER): _non_negative_int,
    }
)

RABI_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_OMEGA_RABI_HZ): _positive,
        vol.Required(CONF_DELTA_L): _integer,
        vol.Optional(CONF_DETUNING_HZ, default=0.0): _number,
        vol.Required(CONF_TIME_GRID_S): GRID_SCHEMA,
    }
)

RAMSEY_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_OMEGA_RABI_HZ): _positive,
        vol.Required(CONF_DELTA_L): _integer,
        vol.Optional(CONF_DETUNING_HZ, default=0.0): _number,
        vol.Required(CONF_WAIT_GRID_S): GRID_SCHEMA,
        vol.Optional(CONF_PULSE_DURATION_S): _non_negative,
        vol.Optional(CONF_IDEAL_PULSES, default=False): bool,
    }
)

LINES_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_ORDERS, default=[-1, 0, 1]): vol.All([_integer], vol.Length(min=1)),
    }
)

SPINUP_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_F_TARGET_HZ): _non_negative,
        vol.Required(CONF_T_SPIN_S): _positive,
        vol.Required(CONF_T_RELEASE_S): _positive,
        vol.Required(CONF_OMEGA_TILT_HZ): _positive,
        vol.Optional(CONF_T_PIN_S, default=0.0): _non_negative,
        vol.Optional(CONF_T_FREE_S, default=0.0): _non_negative,
        vol.Optional(CONF_RAMP_PROFILE, default=RAMP_CONSTANT_ACCELERATION): vol.In(RAMP_PROFILES),
        vol.Exclusive(CONF_NBAR, "occupation"): _non_negative,
        vol.Exclusive(CONF_TILT_TEMPERATURE_MK, "occupation"): _positive,
        vol.Optional(CONF_N_TRAJ, default=DEFAULT_N_TRAJ): vol.All(vol.Coerce(int), vol.Range(min=2)),
        vol.Optional(CONF_DT_S): _positive,
        vol.Optional(CONF_CALIBRATE, default=True): bool,
        vol.Optional(CONF_TRAJECTORY_SAMPLES, default=DEFAULT_TRAJECTORY_SAMPLES): vol.All(
            vol.Coerce(int), vol.Range(min=2)
        ),
        vol.Optional(CONF_WAVEFORM_POINTS, default=DEFAULT_WAVEFORM_POINTS): vol.All(
            vol.Coerce(int), vol.Range(min=2)
        ),
        vol.Optional(CONF_SEEDS): [vol.Any(_integer, [_integer])],
    }
)

_initial_value = vol.Any(None, _number)

PARAMETER_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_NAME): vol.All(str, vol.Length(min=1)),
        vol.Required(CONF_QUANTITY): vol.In(list(FIT_PARAMETER_UNITS)),
        vol.Optional(CONF_INITIAL): vol.Any(_initial_value, [_initial_value]),
        vol.Optional(CONF_LOWER): _number,
        vol.Optional(CONF_UPPER): _number,
        vol.Optional(CONF_SHARED, default=True): bool,
        vol.Optional(CONF_VARY, default=True): bool,
    }
)

# Fixed model arguments outside the unit table
FIXED_RAW_ARGUMENTS = {
    CONF_DELTA_L: _integer,
    CONF_MAX_ORDER: _non_negative_int,
    CONF_IDEAL_PULSES: bool,
    CONF_L0: _number,
}

FIXED_SCHEMA = vol.Schema(
    {
        **{vol.Optional(key): _number for key in FIT_PARAMETER_UNITS},
        **{vol.Optional(key): validator for key, validator in FIXED_RAW_ARGUMENTS.items()},
    }
)

DATASET_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_PATH): vol.All(str, vol.Length(min=1)),
        vol.Required(CONF_KIND): vol.In(DATASET_KINDS),
        vol.Optional(CONF_NAME): str,
        vol.Optional(CONF_SHOTS): vol.All(vol.Coerce(int), vol.Range(min=1)),
        vol.Required(CONF_PARAMETERS): [vol.All(str, vol.Length(min=1))],
        vol.Optional(CONF_FIXED, default={}): FIXED_SCHEMA,
    }
)

FIT_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_PARAMETERS): vol.All([PARAMETER_SCHEMA], vol.Length(min=1)),
        vol.Required(CONF_DATASETS): vol.All([DATASET_SCHEMA], vol.Length(min=1)),
        vol.Optional(CONF_MULTI_START, default=False): bool,
        vol.Optional(CONF_MAX_ITERATIONS, default=FIT_MAX_ITERATIONS): vol.All(vol.Coerce(int), vol.Range(min=1)),
    }
)

EXPERIMENT_SCHEMAS = {
    COMMAND_SPECTRUM: SPECTRUM_SCHEMA,
    COMMAND_RABI: RABI_SCHEMA,
    COMMAND_RAMSEY: RAMSEY_SCHEMA,
    COMMAND_LINES: LINES_SCHEMA,
    COMMAND_SPINUP: SPINUP_SCHEMA,
    COMMAND_FIT: FIT_SCHEMA,
}

# Commands that simulate a prepared rotor state
STATE_COMMANDS = [COMMAND_SPECTRUM, COMMAND_RABI, COMMAND_RAMSEY, COMMAND_LINES]


def run_config_schema(command: str) -> vol.Schema:
    """Top-level RunConfig schema of a subcommand."""
    state_key = vol.Required(CONF_STATE) if command in STATE_COMMANDS else vol.Optional(CONF_STATE)
    experiment_key = vol.Optional(CONF_EXPERIMENT, default={}) if command == COMMAND_LINES else vol.Required(
        CONF_EXPERIMENT
    )
    return vol.Schema(
        {
            vol.Optional("version", default=CONFIG_VERSION): vol.In([CONFIG_VERSION]),
            vol.Optional(CONF_GEOMETRY, default={}): GEOMETRY_SCHEMA,
            state_key: STATE_SCHEMA,
            experiment_key: EXPERIMENT_SCHEMAS[command],
            vol.Optional(CONF_OUTPUT, default={}): OUTPUT_SCHEMA,
        }
    )


def _field_path(path: List[Any]) -> str:
    return ".".join(str(part) for part in path)


def validate_config(command: str, raw: Any) -> Dict[str, Any]:
    """Validate a raw RunConfig, raising ConfigError with the dotted field path."""
    if command not in EXPERIMENT_SCHEMAS:
        raise ConfigError(f"unknown command {command!r}")
    try:
        config = run_config_schema(command)(raw)
    except vol.MultipleInvalid as err:
        first = err.errors[0]
        raise ConfigError(first.error_message, _field_path(first.path)) from err
    except vol.Invalid as err:
        raise ConfigError(err.error_message, _field_path(err.path)) from err
    config[CONF_OUTPUT].setdefault(CONF_BASENAME, command)
    return config


def load_config(command: str, path: Union[str, Path]) -> Dict[str, Any]:
    """Read and validate a JSON RunConfig file.

    Relative trace paths of a fit resolve against the config file directory.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise DataError(f"cannot read config: {err.strerror or err}", path=str(path)) from err
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}: invalid JSON at line {err.lineno}: {err.msg}") from err
    config = validate_config(command, raw)
    if command == COMMAND_FIT:
        for entry in config[CONF_EXPERIMENT][CONF_DATASETS]:
            entry[CONF_PATH] = str(path.parent / entry[CONF_PATH])
    _LOGGER.debug("Loaded %s config from %s", command, path)
    return config


def build_geometry(config: Dict[str, Any]) -> RotorGeometry:
    """Rotor geometry from the geometry block."""
    geometry = config[CONF_GEOMETRY]
    return RotorGeometry.from_atomic_mass(
        geometry[CONF_MASS_U], geometry[CONF_OMEGA_X_HZ], geometry.get(CONF_OMEGA_Z_HZ)
    )


def wavelength(config: Dict[str, Any]) -> float:
    """Probe wavelength in m."""
    return config[CONF_GEOMETRY][CONF_WAVELENGTH_NM] * 1e-9


def theta(config: Dict[str, Any]) -> float:
    """Probe angle in rad."""
    degrees = config[CONF_GEOMETRY][CONF_THETA_DEG]
    if degrees == 90.0:
        return math.pi / 2.0
    return math.radians(degrees)


def build_distribution(config: Dict[str, Any], geometry: RotorGeometry) -> AngularDistribution:
    """Angular momentum distribution from the state block."""
    state = config[CONF_STATE]
    temperature = state.get(CONF_TEMPERATURE_MK)
    return AngularDistribution.from_rotation(
        geometry,
        state[CONF_F_ROT_HZ],
        sigma_l=state.get(CONF_SIGMA_L),
        temperature=None if temperature is None else temperature * 1e-3,
        n_cut=state[CONF_N_CUT],
    )


def grid_values(grid: Dict[str, Any], field_path: str) -> np.ndarray:
    """Grid points of a grid block; an empty grid is a data error."""
    if CONF_VALUES in grid:
        values = np.asarray(grid[CONF_VALUES], dtype=float)
    else:
        values = np.linspace(grid[CONF_START], grid[CONF_STOP], grid[CONF_POINTS])
    if values.size == 0:
        raise DataError(f"{field_path}: grid has no points")
    return values


def _scale_initial(initial, scale: float):
    if isinstance(initial, list):
        return [None if value is None else value * scale for value in initial]
    return None if initial is None else initial * scale


def build_parameters(fit_config: Dict[str, Any]) -> List[Parameter]:
    """Fit parameters in internal units."""
    parameters = []
    for index, entry in enumerate(fit_config[CONF_PARAMETERS]):
        argument, scale = FIT_PARAMETER_UNITS[entry[CONF_QUANTITY]]
        lower = entry.get(CONF_LOWER)
        upper = entry.get(CONF_UPPER)
        initial = entry.get(CONF_INITIAL)
        if isinstance(initial, list) and entry[CONF_SHARED]:
            raise ConfigError(
                "per-dataset initial values need shared = false",
                _field_path([CONF_EXPERIMENT, CONF_PARAMETERS, index, CONF_INITIAL]),
            )
        parameters.append(
            Parameter(
                name=entry[CONF_NAME],
                initial=_scale_initial(initial, scale),
                lower=None if lower is None else lower * scale,
                upper=None if upper is None else upper * scale,
                shared=entry[CONF_SHARED],
                vary=entry[CONF_VARY],
                quantity=argument,
            )
        )
    return parameters


def build_binding(
    dataset_config: Dict[str, Any], parameters: Dict[str, Parameter], config: Dict[str, Any], index: int
) -> ModelBinding:
    """Model binding of one dataset entry."""
    path = [CONF_EXPERIMENT, CONF_DATASETS, index]
    bound = {}
    for name in dataset_config[CONF_PARAMETERS]:
        if name not in parameters:
            raise ConfigError(f"undeclared parameter {name!r}", _field_path(path + [CONF_PARAMETERS]))
        argument = parameters[name].quantity
        if argument in bound:
            raise ConfigError(f"two parameters bound to {argument}", _field_path(path + [CONF_PARAMETERS]))
        bound[argument] = name

    fixed = {}
    for key, value in dataset_config[CONF_FIXED].items():
        if key in FIT_PARAMETER_UNITS:
            argument, scale = FIT_PARAMETER_UNITS[key]
            fixed[argument] = value * scale
        else:
            fixed[key] = value
    if dataset_config[CONF_KIND] == KIND_SPECTRUM:
        fixed.setdefault("wavelength", wavelength(config))
    return ModelBinding(dataset_config[CONF_KIND], bound, fixed)


def output_dir(config: Dict[str, Any], override: Optional[str] = None) -> Path:
    """Output directory, created if missing."""
    directory = Path(override if override is not None else config[CONF_OUTPUT][CONF_DIR])
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as err:
        raise DataError(f"cannot create output directory: {err.strerror or err}", path=str(directory)) from err
    return directory
