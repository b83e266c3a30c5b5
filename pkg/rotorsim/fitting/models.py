"""Model adapters binding fit parameters to the dynamics."""
import logging
import math
from typing import Callable, Dict, Optional

import numpy as np

from ..const import KIND_RABI, KIND_RAMSEY, KIND_SPECTRUM, LOGGER_NAME, QUBIT_WAVELENGTH
from ..dynamics.rabi import rabi_trace
from ..dynamics.ramsey import RamseyConfig, ramsey_trace
from ..dynamics.spectrum import SpectrumScan, spectrum_scan
from ..exceptions import DomainError
from ..physics.distribution import AngularDistribution
from ..physics.drive import LaserDrive, max_coupled_order
from ..physics.geometry import RotorGeometry

_LOGGER = logging.getLogger(LOGGER_NAME)

WIDTH_ARGUMENTS = ("sigma_l", "gamma_per_order")

# kind -> (required arguments, optional arguments with defaults, arguments that must stay fixed)
MODEL_ARGUMENTS = {
    KIND_SPECTRUM: (
        ("theta", "f_rot", "omega", "probe_time"),
        {"l0": 0.0, "max_order": None, "wavelength": QUBIT_WAVELENGTH},
        ("max_order", "wavelength"),
    ),
    KIND_RABI: (
        ("omega", "delta_l"),
        {"l0": 0.0, "detuning": 0.0},
        ("delta_l",),
    ),
    KIND_RAMSEY: (
        ("detuning", "omega", "delta_l"),
        {"l0": 0.0, "pulse_duration": None, "ideal_pulses": False},
        ("delta_l", "ideal_pulses"),
    ),
}


def resolve_sigma(geometry: RotorGeometry, sigma_l: Optional[float], gamma_per_order: Optional[float]) -> float:
    """sigma_l directly, or from the group width per order gamma / (4 omega_r)."""
    if (sigma_l is None) == (gamma_per_order is None):
        raise DomainError("give exactly one of sigma_l or gamma_per_order")
    sigma = sigma_l if sigma_l is not None else gamma_per_order / (4.0 * geometry.omega_r)
    if not (math.isfinite(sigma) and sigma >= 0):
        raise DomainError(f"sigma_l must be non-negative, got {sigma!r}")
    return float(sigma)


def auto_max_order(drive: LaserDrive, r_e: float) -> int:
    """Orders past k_x r_e + 3 (k_x r_e)^(1/3) + 4 carry negligible coupling."""
    argument = drive.lamb_dicke_argument(r_e)
    return max(1, max_coupled_order(drive, r_e) + int(math.ceil(3.0 * argument ** (1.0 / 3.0))) + 4)


def spectrum_model(
    geometry: RotorGeometry,
    x,
    theta: float,
    f_rot: float,
    omega: float,
    probe_time: float,
    sigma_l: Optional[float] = None,
    gamma_per_order: Optional[float] = None,
    l0: float = 0.0,
    max_order: Optional[int] = None,
    wavelength: float = QUBIT_WAVELENGTH,
) -> np.ndarray:
    """Sideband spectrum at arbitrary detunings x (rad/s)."""
    sigma = resolve_sigma(geometry, sigma_l, gamma_per_order)
    drive = LaserDrive(omega_rabi=abs(omega), theta=theta, wavelength=wavelength)
    if max_order is None:
        max_order = auto_max_order(drive, geometry.r_e)

    x = np.asarray(x, dtype=float)
    grid, inverse = np.unique(x, return_inverse=True)
    scan = SpectrumScan.symmetric(int(max_order), probe_time, grid)
    dist = AngularDistribution.gaussian(l0, sigma)
    excitation = spectrum_scan(geometry, dist, drive, scan, f_rot=f_rot).excitation
    return excitation[inverse].reshape(x.shape)


def rabi_model(
    geometry: RotorGeometry,
    x,
    omega: float,
    delta_l: int,
    sigma_l: Optional[float] = None,
    gamma_per_order: Optional[float] = None,
    l0: float = 0.0,
    detuning: float = 0.0,
) -> np.ndarray:
    """Rabi flop of the delta_l sideband at times x (s)."""
    sigma = resolve_sigma(geometry, sigma_l, gamma_per_order)
    drive = LaserDrive(omega_rabi=abs(omega), theta=0.0, delta_l=int(delta_l), detuning=detuning)
    return rabi_trace(geometry, AngularDistribution.gaussian(l0, sigma), drive, x)


def ramsey_model(
    geometry: RotorGeometry,
    x,
    detuning: float,
    omega: float,
    delta_l: int,
    sigma_l: Optional[float] = None,
    gamma_per_order: Optional[float] = None,
    l0: float = 0.0,
    pulse_duration: Optional[float] = None,
    ideal_pulses: bool = False,
) -> np.ndarray:
    """Ramsey fringe of the delta_l sideband at wait times x (s)."""
    sigma = resolve_sigma(geometry, sigma_l, gamma_per_order)
    config = RamseyConfig(
        delta_l=int(delta_l),
        omega_rabi=abs(omega),
        overall_detuning=detuning,
        wait_grid=x,
        pulse_duration=pulse_duration,
        ideal_pulses=bool(ideal_pulses),
    )
    return ramsey_trace(geometry, AngularDistribution.gaussian(l0, sigma), config)


MODELS: Dict[str, Callable[..., np.ndarray]] = {
    KIND_SPECTRUM: spectrum_model,
    KIND_RABI: rabi_model,
    KIND_RAMSEY: ramsey_model,
}


def evaluate_model(kind: str, geometry: RotorGeometry, x, arguments: Dict[str, float]) -> np.ndarray:
    """Evaluate the model of a dataset kind with bound arguments."""
    return MODELS[kind](geometry, x, **arguments)
