"""Laser drive of the rotational sidebands."""
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

import numpy as np

from ..const import LOGGER_NAME, QUBIT_WAVELENGTH
from ..exceptions import DomainError
from .bessel import bessel_jn, bessel_jn_sequence

_LOGGER = logging.getLogger(LOGGER_NAME)


@dataclass(frozen=True)
class LaserDrive:
    """Qubit laser addressing the Delta l sideband of the rotor."""

    omega_rabi: float
    theta: float
    wavelength: float = QUBIT_WAVELENGTH
    delta_l: int = 0
    detuning: float = 0.0
    kx: float = field(init=False)

    def __post_init__(self):
        """Validate the drive and derive the in-plane wavevector."""
        if not (math.isfinite(self.wavelength) and self.wavelength > 0):
            raise DomainError(f"wavelength must be positive, got {self.wavelength!r}")
        if not (0.0 <= self.theta <= math.pi / 2.0):
            raise DomainError(f"theta must lie in [0, pi/2], got {self.theta!r}")
        if not (math.isfinite(self.omega_rabi) and self.omega_rabi >= 0):
            raise DomainError(f"omega_rabi must be non-negative, got {self.omega_rabi!r}")
        if not math.isfinite(self.detuning):
            raise DomainError(f"detuning must be finite, got {self.detuning!r}")
        if int(self.delta_l) != self.delta_l:
            raise DomainError(f"delta_l must be an integer, got {self.delta_l!r}")

        object.__setattr__(self, "delta_l", int(self.delta_l))
        # cos(pi/2) is not exactly zero in floating point
        kx = 0.0 if self.theta == math.pi / 2.0 else self.k * math.cos(self.theta)
        object.__setattr__(self, "kx", kx)

    @property
    def k(self) -> float:
        """Magnitude of the wavevector."""
        return 2.0 * math.pi / self.wavelength

    def with_order(self, delta_l: int, detuning: Optional[float] = None) -> "LaserDrive":
        """Copy of this drive tuned to another sideband order."""
        return replace(self, delta_l=delta_l, detuning=self.detuning if detuning is None else detuning)

    def lamb_dicke_argument(self, r_e: float) -> float:
        """Bessel argument k_x r_e."""
        return self.kx * r_e


def coupling_strength(drive: LaserDrive, r_e: float) -> float:
    """Relative coupling J_{delta_l}(k_x r_e) of the addressed sideband."""
    return bessel_jn(drive.delta_l, drive.lamb_dicke_argument(r_e))


def coupling_strengths(drive: LaserDrive, r_e: float, orders: Iterable[int]) -> np.ndarray:
    """Relative couplings for several sideband orders from one recurrence."""
    orders = [int(order) for order in orders]
    if not orders:
        return np.zeros(0)
    sequence = bessel_jn_sequence(max(abs(order) for order in orders), drive.lamb_dicke_argument(r_e))
    result = np.empty(len(orders))
    for index, order in enumerate(orders):
        value = sequence[abs(order)]
        result[index] = -value if order < 0 and order % 2 else value
    return result


def max_coupled_order(drive: LaserDrive, r_e: float) -> int:
    """Highest sideband order with appreciable coupling, round(k_x r_e)."""
    return int(math.floor(drive.lamb_dicke_argument(r_e) + 0.5))
