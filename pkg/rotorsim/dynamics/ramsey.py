"""Ramsey interferometry on rotational sidebands."""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..const import DEFAULT_MANIFOLD_CHUNK, LOGGER_NAME
from ..exceptions import DomainError
from ..physics.distribution import AngularDistribution
from ..physics.geometry import RotorGeometry
from .rabi import as_time_grid, manifold_detunings

_LOGGER = logging.getLogger(LOGGER_NAME)


@dataclass
class RamseyConfig:
    """Two pi/2 pulses separated by a variable free evolution."""

    delta_l: int
    omega_rabi: float
    overall_detuning: float = 0.0
    wait_grid: np.ndarray = field(default_factory=lambda: np.zeros(0))
    pulse_duration: Optional[float] = None
    ideal_pulses: bool = False

    def __post_init__(self):
        """Validate the sequence and fill in the pi/2 duration."""
        self.delta_l = int(self.delta_l)
        self.wait_grid = as_time_grid(self.wait_grid)
        if not math.isfinite(self.overall_detuning):
            raise DomainError(f"overall_detuning must be finite, got {self.overall_detuning!r}")
        if self.ideal_pulses:
            self.pulse_duration = 0.0
            return

        if not (math.isfinite(self.omega_rabi) and self.omega_rabi > 0):
            raise DomainError(f"omega_rabi must be positive, got {self.omega_rabi!r}")
        if self.pulse_duration is None:
            self.pulse_duration = math.pi / (2.0 * self.omega_rabi)
        if not (math.isfinite(self.pulse_duration) and self.pulse_duration >= 0):
            raise DomainError(f"pulse_duration must be non-negative, got {self.pulse_duration!r}")


def _finite_pulse_chunk(detuning, weights, omega, tau, times):
    """Weighted excitation of a chunk of manifolds for square pi/2 pulses."""
    generalized = np.sqrt(omega * omega + detuning * detuning)
    half = 0.5 * generalized * tau
    cos_half = np.cos(half)
    sin_half = np.sin(half)

    u_gg = cos_half + 1j * sin_half * detuning / generalized
    u_eg = -1j * sin_half * omega / generalized
    u_ee = cos_half - 1j * sin_half * detuning / generalized

    phase = np.exp(0.5j * np.outer(detuning, times))
    excited = (u_eg * u_gg)[:, None] * phase + (u_ee * u_eg)[:, None] * np.conj(phase)
    return weights @ (np.abs(excited) ** 2)


def ramsey_trace(
    geometry: RotorGeometry,
    dist: AngularDistribution,
    config: RamseyConfig,
    chunk_size: int = DEFAULT_MANIFOLD_CHUNK,
) -> np.ndarray:
    """Excitation after pulse, wait t, pulse for every t in the wait grid.

    Each manifold is a two-level system detuned by delta_l + overall_detuning.
    Ideal pulses give 1/2 (1 + sum p cos(d t)).
    """
    if len(dist) == 0:
        raise DomainError("distribution is empty")
    if chunk_size < 1:
        raise DomainError(f"chunk_size must be positive, got {chunk_size!r}")

    times = config.wait_grid
    detunings = manifold_detunings(geometry, dist, config.delta_l, config.overall_detuning)
    total = np.zeros(times.size)

    for start in range(0, detunings.size, chunk_size):
        chunk = detunings[start : start + chunk_size]
        weights = dist.probabilities[start : start + chunk_size]
        if config.ideal_pulses:
            total += weights @ np.cos(np.outer(chunk, times))
        else:
            total += _finite_pulse_chunk(chunk, weights, config.omega_rabi, config.pulse_duration, times)

    if config.ideal_pulses:
        total = 0.5 * (1.0 + total)
    return np.clip(total, 0.0, 1.0)


def dephasing_rate(geometry: RotorGeometry, sigma_l: float, delta_l: int) -> float:
    """Gaussian dephasing rate s = 2 omega_r sigma_l delta_l."""
    if sigma_l < 0:
        raise DomainError(f"sigma_l must be non-negative, got {sigma_l!r}")
    return 2.0 * geometry.omega_r * sigma_l * abs(delta_l)


def contrast_envelope(geometry: RotorGeometry, sigma_l: float, delta_l: int, t):
    """Continuum envelope exp(-s^2 t^2 / 2) of the ideal-pulse fringe."""
    rate = dephasing_rate(geometry, sigma_l, delta_l)
    t = np.asarray(t, dtype=float) if np.ndim(t) else float(t)
    return np.exp(-0.5 * (rate * t) ** 2)


def envelope_decay_time(geometry: RotorGeometry, sigma_l: float, delta_l: int) -> float:
    """Time at which the contrast envelope falls to 1/e."""
    rate = dephasing_rate(geometry, sigma_l, delta_l)
    if rate == 0:
        return math.inf
    return math.sqrt(2.0) / rate


def revival_time(geometry: RotorGeometry, delta_l: int) -> float:
    """Time pi / (omega_r |delta_l|) at which all manifold phases realign."""
    if delta_l == 0:
        raise DomainError("revival time is undefined on the carrier (delta_l = 0)")
    return math.pi / (geometry.omega_r * abs(delta_l))


def symmetrized_revival_time(geometry: RotorGeometry, delta_l: int) -> float:
    """Half revival seen when only one exchange parity is populated."""
    return 0.5 * revival_time(geometry, delta_l)
