"""Thermal initial conditions of the pinned crystal."""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from ..const import BOLTZMANN, HBAR, LOGGER_NAME
from ..exceptions import DomainError
from ..physics.geometry import RotorGeometry
from .forces import ClassicalState, pinned_equilibrium, rotation_generator

_LOGGER = logging.getLogger(LOGGER_NAME)


@dataclass(frozen=True)
class ThermalOccupation:
    """Tilt mode occupation, given either as nbar or as a temperature in K."""

    nbar: Optional[float] = None
    temperature: Optional[float] = None

    def __post_init__(self):
        """Require exactly one non-negative description."""
        if (self.nbar is None) == (self.temperature is None):
            raise DomainError("give exactly one of nbar or temperature")
        value = self.nbar if self.nbar is not None else self.temperature
        if not (math.isfinite(value) and value >= 0):
            raise DomainError(f"occupation must be non-negative, got {value!r}")

    def mean_occupation(self, omega: float) -> float:
        """Mean phonon number of a mode at angular frequency omega."""
        if self.nbar is not None:
            return float(self.nbar)
        if self.temperature == 0:
            return 0.0
        return 1.0 / math.expm1(HBAR * omega / (BOLTZMANN * self.temperature))


OccupationLike = Union[ThermalOccupation, float, int]


def as_occupation(value: OccupationLike) -> ThermalOccupation:
    """Accept a bare number as nbar."""
    if isinstance(value, ThermalOccupation):
        return value
    return ThermalOccupation(nbar=float(value))


def tilt_variances(occupation: OccupationLike, omega_tilt: float, geometry: RotorGeometry):
    """Variances of the tilt mode coordinate and its velocity.

    The mode coordinate moves both ions along the unit rotation vector, so its
    effective mass is the ion mass.
    """
    if not (math.isfinite(omega_tilt) and omega_tilt > 0):
        raise DomainError(f"omega_tilt must be positive, got {omega_tilt!r}")
    nbar = as_occupation(occupation).mean_occupation(omega_tilt)
    energy_quanta = nbar + 0.5
    position = energy_quanta * HBAR / (geometry.ion_mass * omega_tilt)
    velocity = energy_quanta * HBAR * omega_tilt / geometry.ion_mass
    return position, velocity


def sample_thermal_tilt(
    occupation: OccupationLike,
    omega_tilt: float,
    geometry: RotorGeometry,
    seed: Union[int, Sequence[int], None],
    quad_strength: Optional[float] = None,
    alpha0: float = 0.0,
) -> ClassicalState:
    """Pinned equilibrium plus a classical thermal draw of the tilt mode."""
    if quad_strength is None:
        quad_strength = 0.5 * omega_tilt ** 2
    var_q, var_v = tilt_variances(occupation, omega_tilt, geometry)

    rng = np.random.default_rng(seed)
    q, q_dot = rng.standard_normal(2) * np.sqrt([var_q, var_v])

    base = pinned_equilibrium(geometry, quad_strength, alpha0)
    direction = rotation_generator(base.positions).reshape(2, 2)
    return ClassicalState(base.positions + q * direction, q_dot * direction, 0.0)
