"""Classical in-plane forces on the two-ion crystal."""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import eigh
from scipy.optimize import brentq

from ..const import COULOMB_STRENGTH, HESSIAN_RELATIVE_STEP, LOGGER_NAME
from ..exceptions import DomainError, IntegratorError
from ..physics.geometry import RotorGeometry, rotation_radius

_LOGGER = logging.getLogger(LOGGER_NAME)


@dataclass
class ClassicalState:
    """Positions and velocities of both ions, shape (2, 2) each, at a time."""

    positions: np.ndarray
    velocities: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        """Validate shapes, finiteness and ion separation."""
        self.positions = np.array(self.positions, dtype=float).reshape(2, 2)
        self.velocities = np.array(self.velocities, dtype=float).reshape(2, 2)
        if not (np.all(np.isfinite(self.positions)) and np.all(np.isfinite(self.velocities))):
            raise DomainError("classical state must be finite")
        if self.separation <= 0:
            raise DomainError("ions coincide")

    @property
    def separation(self) -> float:
        """Distance between the ions."""
        return float(np.linalg.norm(self.positions[0] - self.positions[1]))

    def copy(self) -> "ClassicalState":
        """Independent copy of the state."""
        return ClassicalState(self.positions.copy(), self.velocities.copy(), self.time)


def quadrupole_accelerations(positions: np.ndarray, strength, alpha0) -> np.ndarray:
    """Acceleration from 1/2 eps [(x^2 - y^2) cos 2a + 2 x y sin 2a] per unit mass."""
    cos2 = np.cos(2.0 * alpha0)
    sin2 = np.sin(2.0 * alpha0)
    x = positions[..., 0]
    y = positions[..., 1]
    result = np.empty_like(positions)
    result[..., 0] = -strength * (x * cos2 + y * sin2)
    result[..., 1] = -strength * (x * sin2 - y * cos2)
    return result


def coulomb_accelerations(positions: np.ndarray, ion_mass: float) -> np.ndarray:
    """Mutual Coulomb repulsion on each ion, batch shape (..., 2, 2)."""
    difference = positions[..., 0, :] - positions[..., 1, :]
    distance_sq = np.sum(difference * difference, axis=-1, keepdims=True)
    push = (COULOMB_STRENGTH / ion_mass) * difference / (distance_sq * np.sqrt(distance_sq))
    return np.stack((push, -push), axis=-2)


def accelerations(positions: np.ndarray, geometry: RotorGeometry, strength: float, alpha0: float) -> np.ndarray:
    """Total acceleration of every ion from trap, quadrupole and Coulomb terms."""
    result = -(geometry.omega_x ** 2) * positions
    if strength != 0:
        result += quadrupole_accelerations(positions, strength, alpha0)
    result += coulomb_accelerations(positions, geometry.ion_mass)
    return result


def force_field(state: ClassicalState, waveform, t: float, geometry: RotorGeometry) -> np.ndarray:
    """Accelerations of both ions at time t under the spin-up waveform."""
    if state.separation <= 0:
        raise IntegratorError("ions coincide; Coulomb force is singular")
    strength = waveform.quad_strength * waveform.amplitude(t)
    return accelerations(state.positions, geometry, strength, waveform.alpha0(t))


def potential_energy(positions: np.ndarray, geometry: RotorGeometry, strength: float, alpha0: float):
    """Potential energy of the crystal, batch shape (..., 2, 2)."""
    mass = geometry.ion_mass
    x = positions[..., 0]
    y = positions[..., 1]
    trap = 0.5 * mass * geometry.omega_x ** 2 * np.sum(x * x + y * y, axis=-1)
    quad = 0.5 * mass * strength * np.sum(
        (x * x - y * y) * np.cos(2.0 * alpha0) + 2.0 * x * y * np.sin(2.0 * alpha0), axis=-1
    )
    difference = positions[..., 0, :] - positions[..., 1, :]
    coulomb = COULOMB_STRENGTH / np.sqrt(np.sum(difference * difference, axis=-1))
    return trap + quad + coulomb


def kinetic_energy(velocities: np.ndarray, ion_mass: float):
    """Kinetic energy of the crystal, batch shape (..., 2, 2)."""
    return 0.5 * ion_mass * np.sum(velocities * velocities, axis=(-2, -1))


def total_energy(positions, velocities, geometry: RotorGeometry, strength: float = 0.0, alpha0: float = 0.0):
    """Kinetic plus potential energy."""
    return kinetic_energy(velocities, geometry.ion_mass) + potential_energy(positions, geometry, strength, alpha0)


def angular_momentum(positions, velocities, ion_mass: float):
    """Total angular momentum about the trap axis, batch shape (..., 2, 2)."""
    cross = positions[..., 0] * velocities[..., 1] - positions[..., 1] * velocities[..., 0]
    return ion_mass * np.sum(cross, axis=-1)


def rotating_state(
    geometry: RotorGeometry, f_rot: float, angle: float = 0.0, radius: Optional[float] = None
) -> ClassicalState:
    """Crystal in rigid rotation at f_rot (Hz), ions at +-radius along angle."""
    if radius is None:
        radius = rotation_radius(geometry, f_rot)
    direction = np.array([math.cos(angle), math.sin(angle)])
    tangent = np.array([-math.sin(angle), math.cos(angle)])
    speed = 2.0 * math.pi * f_rot * radius
    positions = np.array([radius * direction, -radius * direction])
    velocities = np.array([speed * tangent, -speed * tangent])
    return ClassicalState(positions, velocities, 0.0)


def pinned_radius(geometry: RotorGeometry, quad_strength: float) -> float:
    """Ion distance from the centre when pinned along the weak quadrupole axis."""
    soft = geometry.omega_x ** 2 - quad_strength
    if soft <= 0:
        raise DomainError("quadrupole strength exceeds the in-plane confinement")
    return (COULOMB_STRENGTH / (4.0 * geometry.ion_mass * soft)) ** (1.0 / 3.0)


def pinned_equilibrium(geometry: RotorGeometry, quad_strength: float, alpha0: float = 0.0) -> ClassicalState:
    """Static crystal aligned with the weak axis at alpha0 + pi/2."""
    radius = pinned_radius(geometry, quad_strength)
    return rotating_state(geometry, 0.0, angle=alpha0 + math.pi / 2.0, radius=radius)


def rotation_generator(positions: np.ndarray) -> np.ndarray:
    """Unit vector in R^4 of an infinitesimal rigid rotation of the crystal."""
    generator = np.stack((-positions[:, 1], positions[:, 0]), axis=-1).reshape(4)
    return generator / np.linalg.norm(generator)


def pinned_normal_modes(geometry: RotorGeometry, quad_strength: float) -> Tuple[np.ndarray, np.ndarray, int]:
    """Normal modes of the pinned crystal.

    Returns the angular frequencies, the eigenvectors as columns in the
    (x1, y1, x2, y2) basis and the index of the tilt mode.
    """
    equilibrium = pinned_equilibrium(geometry, quad_strength).positions
    step = HESSIAN_RELATIVE_STEP * pinned_radius(geometry, quad_strength)

    flat = equilibrium.reshape(4)
    hessian = np.empty((4, 4))
    for column in range(4):
        shift = np.zeros(4)
        shift[column] = step
        forward = accelerations((flat + shift).reshape(2, 2), geometry, quad_strength, 0.0).reshape(4)
        backward = accelerations((flat - shift).reshape(2, 2), geometry, quad_strength, 0.0).reshape(4)
        hessian[:, column] = -(forward - backward) / (2.0 * step)

    eigenvalues, vectors = eigh(0.5 * (hessian + hessian.T))
    if np.any(eigenvalues < 0):
        _LOGGER.warning("Pinned crystal has unstable directions: %s", eigenvalues)
    frequencies = np.sqrt(np.clip(eigenvalues, 0.0, None))
    overlap = np.abs(vectors.T @ rotation_generator(equilibrium))
    return frequencies, vectors, int(np.argmax(overlap))


def tilt_frequency(geometry: RotorGeometry, quad_strength: float) -> float:
    """Angular frequency of the tilt mode of the pinned crystal."""
    frequencies, _, tilt = pinned_normal_modes(geometry, quad_strength)
    return float(frequencies[tilt])


def calibrate_quadrupole(geometry: RotorGeometry, omega_tilt: float) -> float:
    """Quadrupole strength whose pinned tilt frequency equals omega_tilt."""
    if not (math.isfinite(omega_tilt) and omega_tilt > 0):
        raise DomainError(f"omega_tilt must be positive, got {omega_tilt!r}")
    estimate = 0.5 * omega_tilt ** 2
    ceiling = geometry.omega_x ** 2 * (1.0 - 1e-9)
    if estimate >= ceiling:
        raise DomainError(
            f"omega_tilt {omega_tilt!r} rad/s would need a quadrupole stronger than the trap"
        )

    strength = brentq(
        lambda eps: tilt_frequency(geometry, eps) - omega_tilt,
        0.5 * estimate,
        min(2.0 * estimate, ceiling),
        rtol=1e-12,
    )
    _LOGGER.debug("Calibrated quadrupole strength %.6g s^-2 for omega_tilt %.6g rad/s", strength, omega_tilt)
    return strength
