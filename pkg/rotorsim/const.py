"""Constants for the rotorsim package."""
import math

DOMAIN = "rotorsim"
VERSION = "0.3.0"
CONFIG_VERSION = 1

# Logger
LOGGER_NAME = "rotorsim"

# Physical constants (CODATA 2018)
ELEMENTARY_CHARGE = 1.602176634e-19  # C
VACUUM_PERMITTIVITY = 8.8541878128e-12  # F/m
HBAR = 1.054571817e-34  # J s
BOLTZMANN = 1.380649e-23  # J/K
ATOMIC_MASS_UNIT = 1.66053906660e-27  # kg
ELECTRON_MASS = 9.1093837015e-31  # kg

# e^2 / (4 pi eps0)
COULOMB_STRENGTH = ELEMENTARY_CHARGE ** 2 / (4.0 * math.pi * VACUUM_PERMITTIVITY)

# 40Ca+
CA40_ATOMIC_MASS_U = 39.9626
CA40_ION_MASS = CA40_ATOMIC_MASS_U * ATOMIC_MASS_UNIT - ELECTRON_MASS
CA40_DOPPLER_LIMIT = 0.52e-3  # K
QUBIT_WAVELENGTH = 729e-9  # m, S1/2 -> D5/2

# Defaults
DEFAULT_OMEGA_X = 2.0 * math.pi * 845e3
DEFAULT_N_CUT = 6.0
DEFAULT_MANIFOLD_CHUNK = 2048
MAX_RESOLVABLE_ORDER_CAP = 100000

# Bessel evaluation
BESSEL_MILLER_SEED = 1e-30
BESSEL_RESCALE_THRESHOLD = 1e200
BESSEL_EXTRA_ORDERS = 20
BESSEL_ACCURACY_DIGITS = 40

# Spin-up protocol
ELECTRODE_COUNT = 8
ELECTRODE_PHASE_STEP = math.pi / 4.0
DEFAULT_STEPS_PER_PERIOD = 500
MIN_STEPS_PER_PERIOD = 200
DEFAULT_TRAJECTORY_CHUNK = 64
COLLAPSE_FRACTION = 1e-3
FREE_SEGMENT_DRIFT_LIMIT = 0.01
HESSIAN_RELATIVE_STEP = 1e-6
ENV_THREADS = "ROTORSIM_THREADS"
DEFAULT_TRAJECTORY_SAMPLES = 201
RAMP_CONSTANT_ACCELERATION = "constant_acceleration"
RAMP_SMOOTHSTEP = "smoothstep"
RAMP_PROFILES = [RAMP_CONSTANT_ACCELERATION, RAMP_SMOOTHSTEP]

# Fitting
FIT_RELATIVE_STEP = 1e-6
FIT_CHI2_TOLERANCE = 1e-10
FIT_STEP_TOLERANCE = 1e-10
FIT_PATIENCE = 3
FIT_MAX_ITERATIONS = 200
FIT_INITIAL_LAMBDA = 1e-3
FIT_LAMBDA_UP = 10.0
FIT_LAMBDA_DOWN = 0.1
FIT_LAMBDA_MAX = 1e16
FIT_CHI2_FLOOR = 1e-28
FIT_STATIONARY_TOLERANCE = 1e-8
FIT_MULTI_START_COUNT = 5
FIT_MULTI_START_JITTER = 0.1
FIT_ROUNDOFF_RESIDUAL = 1e-13
FIT_SINGULAR_CONDITION = 1e12

# Default parameter bounds, internal units
DEFAULT_BOUNDS = {
    "sigma_l": (0.0, 1e4),
    "gamma_per_order": (0.0, 2.0 * math.pi * 1e6),
    "theta": (0.0, math.pi / 2.0),
    "omega": (1e-9, 2.0 * math.pi * 1e6),
    "f_rot": (0.0, 1e7),
    "detuning": (-2.0 * math.pi * 1e6, 2.0 * math.pi * 1e6),
    "pulse_duration": (0.0, 1.0),
    "probe_time": (0.0, 1.0),
}

# Dataset kinds
KIND_SPECTRUM = "spectrum"
KIND_RABI = "rabi"
KIND_RAMSEY = "ramsey"
DATASET_KINDS = [KIND_SPECTRUM, KIND_RABI, KIND_RAMSEY]

# Trace file columns
COLUMN_TIME = "time_s"
COLUMN_DETUNING = "detuning_hz"
COLUMN_EXCITATION = "excitation"
COLUMN_EXCITATION_ERR = "excitation_err"
CSV_SIGNIFICANT_DIGITS = 12

# Configuration blocks
CONF_GEOMETRY = "geometry"
CONF_STATE = "state"
CONF_EXPERIMENT = "experiment"
CONF_OUTPUT = "output"

# Geometry keys
CONF_MASS_U = "mass_u"
CONF_OMEGA_X_HZ = "omega_x_hz"
CONF_OMEGA_Z_HZ = "omega_z_hz"
CONF_WAVELENGTH_NM = "wavelength_nm"
CONF_THETA_DEG = "theta_deg"

# State keys
CONF_F_ROT_HZ = "f_rot_hz"
CONF_SIGMA_L = "sigma_l"
CONF_TEMPERATURE_MK = "temperature_mk"

# Output keys
CONF_DIR = "dir"
CONF_BASENAME = "basename"
CONF_SVG = "svg"

DEFAULT_OUTPUT_DIR = "rotorsim_out"

# Fit parameter names as they appear in configs: name -> (model argument, scale to internal units)
FIT_PARAMETER_UNITS = {
    "omega_rabi_hz": ("omega", 2.0 * math.pi),
    "theta_deg": ("theta", math.pi / 180.0),
    "f_rot_hz": ("f_rot", 1.0),
    "detuning_hz": ("detuning", 2.0 * math.pi),
    "sigma_l": ("sigma_l", 1.0),
    "gamma_per_order_hz": ("gamma_per_order", 2.0 * math.pi),
    "pulse_duration_s": ("pulse_duration", 1.0),
    "probe_time_s": ("probe_time", 1.0),
}

# Exit codes
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_NUMERICAL = 3

# Experiment keys
CONF_OMEGA_RABI_HZ = "omega_rabi_hz"
CONF_PROBE_TIME_S = "probe_time_s"
CONF_DETUNING_HZ = "detuning_hz"
CONF_DELTA_L = "delta_l"
CONF_MAX_ORDER = "max_order"
CONF_N_CUT = "n_cut"
CONF_PULSE_DURATION_S = "pulse_duration_s"
CONF_IDEAL_PULSES = "ideal_pulses"
CONF_DETUNING_GRID_HZ = "detuning_grid_hz"
CONF_TIME_GRID_S = "time_grid_s"
CONF_WAIT_GRID_S = "wait_grid_s"
CONF_ORDERS = "orders"
CONF_START = "start"
CONF_STOP = "stop"
CONF_POINTS = "points"
CONF_VALUES = "values"

# Spin-up keys
CONF_F_TARGET_HZ = "f_target_hz"
CONF_T_SPIN_S = "t_spin_s"
CONF_T_RELEASE_S = "t_release_s"
CONF_T_PIN_S = "t_pin_s"
CONF_T_FREE_S = "t_free_s"
CONF_OMEGA_TILT_HZ = "omega_tilt_hz"
CONF_RAMP_PROFILE = "ramp_profile"
CONF_NBAR = "nbar"
CONF_TILT_TEMPERATURE_MK = "tilt_temperature_mk"
CONF_N_TRAJ = "n_traj"
CONF_DT_S = "dt_s"
CONF_CALIBRATE = "calibrate"
CONF_TRAJECTORY_SAMPLES = "trajectory_samples"
CONF_WAVEFORM_POINTS = "waveform_points"
CONF_SEEDS = "seeds"

# Fit keys
CONF_PARAMETERS = "parameters"
CONF_DATASETS = "datasets"
CONF_NAME = "name"
CONF_QUANTITY = "quantity"
CONF_INITIAL = "initial"
CONF_LOWER = "lower"
CONF_UPPER = "upper"
CONF_SHARED = "shared"
CONF_VARY = "vary"
CONF_PATH = "path"
CONF_KIND = "kind"
CONF_SHOTS = "shots"
CONF_FIXED = "fixed"
CONF_L0 = "l0"
CONF_MULTI_START = "multi_start"
CONF_MAX_ITERATIONS = "max_iterations"

DEFAULT_WAVELENGTH_NM = 729.0
DEFAULT_OMEGA_X_HZ = 845e3
DEFAULT_NBAR = 0.0
DEFAULT_N_TRAJ = 64
DEFAULT_WAVEFORM_POINTS = 2001

# Subcommands
COMMAND_SPECTRUM = "spectrum"
COMMAND_RABI = "rabi"
COMMAND_RAMSEY = "ramsey"
COMMAND_SPINUP = "spinup"
COMMAND_FIT = "fit"
COMMAND_LINES = "lines"
COMMANDS = [COMMAND_SPECTRUM, COMMAND_RABI, COMMAND_RAMSEY, COMMAND_SPINUP, COMMAND_FIT, COMMAND_LINES]
