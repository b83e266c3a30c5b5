"""Rabi oscillations summed over rotational manifolds."""
import logging

import numpy as np

from ..const import DEFAULT_MANIFOLD_CHUNK, LOGGER_NAME
from ..exceptions import DomainError
from ..physics.distribution import AngularDistribution
from ..physics.drive import LaserDrive
from ..physics.geometry import RotorGeometry, transition_detuning

_LOGGER = logging.getLogger(LOGGER_NAME)


def detuned_rabi(omega: float, detuning, times):
    """Excitation of one two-level system, Omega^2/W^2 sin^2(W t / 2)."""
    detuning = np.asarray(detuning, dtype=float)
    times = np.asarray(times, dtype=float)
    generalized_sq = omega * omega + detuning * detuning
    with np.errstate(invalid="ignore", divide="ignore"):
        amplitude = np.where(generalized_sq > 0, omega * omega / generalized_sq, 0.0)
    return amplitude * np.sin(0.5 * np.sqrt(generalized_sq) * times) ** 2


def as_time_grid(time_grid) -> np.ndarray:
    """Validate a caller-supplied time grid."""
    times = np.asarray(time_grid, dtype=float).reshape(-1)
    if np.any(~np.isfinite(times)):
        raise DomainError("time grid contains non-finite values")
    if np.any(times < 0):
        raise DomainError("time grid contains negative times")
    return times


def manifold_detunings(geometry: RotorGeometry, dist: AngularDistribution, delta_l: int, offset: float):
    """Detuning of every populated manifold for a drive detuned by offset."""
    return transition_detuning(geometry, dist.ls, dist.l0, delta_l) + offset


def rabi_trace(
    geometry: RotorGeometry,
    dist: AngularDistribution,
    drive: LaserDrive,
    time_grid,
    chunk_size: int = DEFAULT_MANIFOLD_CHUNK,
) -> np.ndarray:
    """Excitation probability of a Rabi flop on the drive's sideband order.

    Sums Omega^2/(Omega^2 + d^2) sin^2(sqrt(Omega^2 + d^2) t / 2) over the
    populated manifolds, d = 2 omega_r (l0 - l) delta_l + drive.detuning.
    """
    if drive.omega_rabi <= 0:
        raise DomainError(f"omega_rabi must be positive, got {drive.omega_rabi!r}")
    if len(dist) == 0:
        raise DomainError("distribution is empty")
    if chunk_size < 1:
        raise DomainError(f"chunk_size must be positive, got {chunk_size!r}")

    times = as_time_grid(time_grid)
    detunings = manifold_detunings(geometry, dist, drive.delta_l, drive.detuning)
    omega_sq = drive.omega_rabi ** 2

    total = np.zeros(times.size)
    for start in range(0, detunings.size, chunk_size):
        chunk = detunings[start : start + chunk_size]
        weights = dist.probabilities[start : start + chunk_size]
        generalized = np.sqrt(omega_sq + chunk * chunk)
        amplitude = weights * omega_sq / (generalized * generalized)
        total += amplitude @ (np.sin(0.5 * np.outer(generalized, times)) ** 2)

    return np.clip(total, 0.0, 1.0)
