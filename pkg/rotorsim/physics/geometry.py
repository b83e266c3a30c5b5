"""Geometry and energy scales of the two-ion rotor."""
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from ..const import (
    ATOMIC_MASS_UNIT,
    BOLTZMANN,
    CA40_DOPPLER_LIMIT,
    CA40_ION_MASS,
    COULOMB_STRENGTH,
    DEFAULT_OMEGA_X,
    ELECTRON_MASS,
    HBAR,
    LOGGER_NAME,
    MAX_RESOLVABLE_ORDER_CAP,
)
from ..exceptions import DomainError

_LOGGER = logging.getLogger(LOGGER_NAME)


def _require_positive(name: str, value: float) -> None:
    """Raise DomainError unless value is a finite positive number."""
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be positive, got {value!r}")


def _require_non_negative(name: str, value: float) -> None:
    """Raise DomainError unless value is a finite non-negative number."""
    if not (math.isfinite(value) and value >= 0):
        raise DomainError(f"{name} must be non-negative, got {value!r}")


def equilibrium_radius(ion_mass: float, omega_x: float) -> float:
    """Return the equilibrium radius of a static two-ion ring in metres."""
    _require_positive("ion_mass", ion_mass)
    _require_positive("omega_x", omega_x)
    return (COULOMB_STRENGTH / (4.0 * ion_mass * omega_x ** 2)) ** (1.0 / 3.0)


def rotor_constant(ion_mass: float, r_e: float) -> float:
    """Return the rotor constant hbar / (4 m r_e^2) in rad/s."""
    _require_positive("ion_mass", ion_mass)
    _require_positive("r_e", r_e)
    return HBAR / (4.0 * ion_mass * r_e ** 2)


@dataclass(frozen=True)
class RotorGeometry:
    """Physical backbone of the rotor: mass, trap frequencies and derived scales."""

    ion_mass: float
    omega_x: float
    omega_z: float
    r_e: float
    omega_r: float
    moment_of_inertia: float

    def __post_init__(self):
        """Validate the stored invariants."""
        _require_positive("ion_mass", self.ion_mass)
        _require_positive("omega_x", self.omega_x)
        _require_positive("r_e", self.r_e)
        _require_positive("omega_r", self.omega_r)
        if self.moment_of_inertia != 2.0 * self.ion_mass * self.r_e ** 2:
            raise DomainError("moment_of_inertia must equal 2 m r_e^2")

    @classmethod
    def from_trap(
        cls,
        ion_mass: float = CA40_ION_MASS,
        omega_x: float = DEFAULT_OMEGA_X,
        omega_z: Optional[float] = None,
    ) -> "RotorGeometry":
        """Build the geometry from the ion mass and in-plane secular frequency."""
        r_e = equilibrium_radius(ion_mass, omega_x)
        return cls(
            ion_mass=ion_mass,
            omega_x=omega_x,
            omega_z=2.0 * omega_x if omega_z is None else omega_z,
            r_e=r_e,
            omega_r=rotor_constant(ion_mass, r_e),
            moment_of_inertia=2.0 * ion_mass * r_e ** 2,
        )

    @classmethod
    def from_atomic_mass(
        cls, mass_u: float, omega_x_hz: float, omega_z_hz: Optional[float] = None
    ) -> "RotorGeometry":
        """Build the geometry of a singly charged ion from its atomic mass in u."""
        _require_positive("mass_u", mass_u)
        ion_mass = mass_u * ATOMIC_MASS_UNIT - ELECTRON_MASS
        omega_z = None if omega_z_hz is None else 2.0 * math.pi * omega_z_hz
        return cls.from_trap(ion_mass, 2.0 * math.pi * omega_x_hz, omega_z)

    @property
    def separation(self) -> float:
        """Distance between the two ions at rest."""
        return 2.0 * self.r_e


def rotational_energy(geometry: RotorGeometry, l):
    """Return E_l = hbar omega_r l^2 in joules."""
    l = np.asarray(l, dtype=float) if np.ndim(l) else float(l)
    return HBAR * geometry.omega_r * l * l


def transition_detuning(geometry: RotorGeometry, l, l0: float, delta_l: int):
    """Detuning of the |l> -> |l + delta_l> line from the group centre at l0, rad/s."""
    l = np.asarray(l, dtype=float) if np.ndim(l) else float(l)
    return 2.0 * geometry.omega_r * (l0 - l) * delta_l


def mean_quantum_number(geometry: RotorGeometry, f_rot: float) -> float:
    """Mean angular momentum quantum number of a ring rotating at f_rot (Hz)."""
    _require_non_negative("f_rot", f_rot)
    return 2.0 * math.pi * f_rot / (2.0 * geometry.omega_r)


def thermal_sigma(geometry: RotorGeometry, temperature: float) -> float:
    """Angular momentum width of a thermal rotor at the given temperature (K)."""
    _require_non_negative("temperature", temperature)
    return math.sqrt(BOLTZMANN * temperature / (2.0 * HBAR * geometry.omega_r))


def doppler_limit_sigma(geometry: RotorGeometry) -> float:
    """Thermal angular momentum width at the 40Ca+ Doppler limit."""
    return thermal_sigma(geometry, CA40_DOPPLER_LIMIT)


def stretch_frequency(omega_x: float) -> float:
    """Frequency of the radial stretch mode of the ring."""
    return math.sqrt(3.0) * omega_x


def group_width(geometry: RotorGeometry, sigma_l: float, delta_l: int) -> float:
    """Spectral width 4 omega_r sigma_l |delta_l| of an order-delta_l group, rad/s."""
    _require_non_negative("sigma_l", sigma_l)
    return 4.0 * geometry.omega_r * sigma_l * abs(delta_l)


def max_resolvable_order(
    geometry: RotorGeometry,
    sigma_l: float,
    f_rot: float,
    cap: int = MAX_RESOLVABLE_ORDER_CAP,
) -> int:
    """Largest order whose group stays two standard deviations clear of the next one.

    Groups n and n+1 are resolved when 2(2 omega_r n sigma) + 2(2 omega_r (n+1) sigma)
    fits inside the group spacing 2 pi f_rot.
    """
    _require_non_negative("sigma_l", sigma_l)
    _require_positive("f_rot", f_rot)
    if sigma_l == 0:
        return cap

    ratio = 2.0 * math.pi * f_rot / (4.0 * geometry.omega_r * sigma_l)
    order = math.floor((ratio - 1.0) / 2.0)
    return int(min(max(order, 0), cap))


def rotation_radius(geometry: RotorGeometry, f_rot: float) -> float:
    """Force-balance radius of a ring rotating rigidly at f_rot (Hz)."""
    omega = 2.0 * math.pi * abs(f_rot)
    if omega >= geometry.omega_x:
        raise DomainError(
            f"rotation at {f_rot!r} Hz exceeds the in-plane trap frequency; ring unbound"
        )
    return (COULOMB_STRENGTH / (4.0 * geometry.ion_mass * (geometry.omega_x ** 2 - omega ** 2))) ** (
        1.0 / 3.0
    )


def rigid_angular_momentum(geometry: RotorGeometry, f_rot: float) -> float:
    """Angular momentum 2 m r(f)^2 2 pi f of a steadily rotating ring."""
    radius = rotation_radius(geometry, f_rot)
    return 2.0 * geometry.ion_mass * radius ** 2 * 2.0 * math.pi * f_rot


def angular_momentum_to_frequency(geometry: RotorGeometry, angular_momentum: float) -> float:
    """Invert the steady-rotation relation L(f) for the rotation frequency in Hz."""
    if not math.isfinite(angular_momentum):
        raise DomainError(f"angular momentum must be finite, got {angular_momentum!r}")
    if angular_momentum == 0:
        return 0.0

    target = abs(angular_momentum)
    f_max = geometry.omega_x / (2.0 * math.pi) * (1.0 - 1e-9)
    if rigid_angular_momentum(geometry, f_max) <= target:
        raise DomainError(f"angular momentum {angular_momentum!r} exceeds any bound rotation")

    f_rot = brentq(
        lambda f: rigid_angular_momentum(geometry, f) - target,
        0.0,
        f_max,
        xtol=1e-12,
        rtol=1e-14,
    )
    return math.copysign(f_rot, angular_momentum)
