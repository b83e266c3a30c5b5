"""Rotational sideband spectra."""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..const import DEFAULT_MANIFOLD_CHUNK, LOGGER_NAME
from ..exceptions import DomainError
from ..physics.bessel import bessel_jn_sequence
from ..physics.distribution import AngularDistribution
from ..physics.drive import LaserDrive
from ..physics.geometry import RotorGeometry, max_resolvable_order, transition_detuning
from ..utils import is_strictly_increasing

_LOGGER = logging.getLogger(LOGGER_NAME)

CARRIER_FLOOR = 1e-12


@dataclass
class SpectrumScan:
    """Detuning scan of the qubit laser across the sideband groups."""

    detuning_grid: np.ndarray
    probe_time: float
    included_orders: List[int]
    excitation: Optional[np.ndarray] = None
    groups_overlap: bool = False
    resolvable_order: Optional[int] = None
    order_rabi_frequencies: dict = field(default_factory=dict)

    def __post_init__(self):
        """Validate the grid and probe time."""
        self.detuning_grid = np.asarray(self.detuning_grid, dtype=float).reshape(-1)
        self.included_orders = [int(order) for order in self.included_orders]
        if not (math.isfinite(self.probe_time) and self.probe_time > 0):
            raise DomainError(f"probe_time must be positive, got {self.probe_time!r}")
        if np.any(~np.isfinite(self.detuning_grid)):
            raise DomainError("detuning grid contains non-finite values")
        if not is_strictly_increasing(self.detuning_grid):
            raise DomainError("detuning grid must be strictly increasing")
        if not self.included_orders:
            raise DomainError("at least one sideband order must be included")

    @classmethod
    def symmetric(cls, max_order: int, probe_time: float, detuning_grid) -> "SpectrumScan":
        """Scan including every order from -max_order to max_order."""
        return cls(detuning_grid, probe_time, list(range(-abs(max_order), abs(max_order) + 1)))


def order_rabi_frequency(laser: LaserDrive, r_e: float, orders) -> dict:
    """Carrier-referenced Rabi frequency Omega |J_n / J_0| of every order."""
    argument = laser.lamb_dicke_argument(r_e)
    sequence = bessel_jn_sequence(max(abs(order) for order in orders), argument)
    carrier = sequence[0]
    if abs(carrier) < CARRIER_FLOOR:
        raise DomainError(
            f"carrier coupling J_0({argument:.6g}) vanishes; carrier-referenced Rabi frequencies undefined"
        )
    return {order: laser.omega_rabi * abs(sequence[abs(order)] / carrier) for order in orders}


def groups_resolved(geometry: RotorGeometry, sigma_l: float, f_rot: float) -> Optional[int]:
    """Highest resolvable order, or None when every group collapses onto the carrier."""
    if f_rot <= 0:
        return None
    return max_resolvable_order(geometry, sigma_l, f_rot)


def spectrum_scan(
    geometry: RotorGeometry,
    dist: AngularDistribution,
    laser: LaserDrive,
    scan: SpectrumScan,
    f_rot: Optional[float] = None,
    chunk_size: int = DEFAULT_MANIFOLD_CHUNK,
) -> SpectrumScan:
    """Fill scan.excitation with the summed excitation of all included orders.

    Every order is an independent set of two-level manifolds driven at
    Omega |J_n / J_0| and detuned by scan - 2 pi f_rot n - delta_l(n).
    f_rot defaults to the rotation frequency of dist.l0.
    """
    if laser.omega_rabi <= 0:
        raise DomainError(f"omega_rabi must be positive, got {laser.omega_rabi!r}")
    if chunk_size < 1:
        raise DomainError(f"chunk_size must be positive, got {chunk_size!r}")
    if f_rot is None:
        f_rot = 2.0 * geometry.omega_r * dist.l0 / (2.0 * math.pi)

    rabi = order_rabi_frequency(laser, geometry.r_e, scan.included_orders)
    grid = scan.detuning_grid
    total = np.zeros(grid.size)

    for order in scan.included_orders:
        omega = rabi[order]
        if omega == 0:
            continue
        omega_sq = omega * omega
        line_offsets = transition_detuning(geometry, dist.ls, dist.l0, order)
        for start in range(0, line_offsets.size, chunk_size):
            offsets = line_offsets[start : start + chunk_size]
            weights = dist.probabilities[start : start + chunk_size]
            detuning = grid[None, :] - 2.0 * math.pi * f_rot * order - offsets[:, None]
            generalized_sq = omega_sq + detuning * detuning
            lines = omega_sq / generalized_sq * np.sin(0.5 * np.sqrt(generalized_sq) * scan.probe_time) ** 2
            total += weights @ lines

    scan.excitation = np.clip(total, 0.0, 1.0)
    scan.order_rabi_frequencies = rabi

    highest = max(abs(order) for order in scan.included_orders)
    resolvable = groups_resolved(geometry, dist.sigma_l, f_rot)
    scan.resolvable_order = resolvable
    scan.groups_overlap = highest > 0 and (resolvable is None or highest > resolvable)
    if scan.groups_overlap:
        _LOGGER.warning(
            "Sideband groups overlap: orders up to %d included, resolvable up to %s at f_rot=%.6g Hz",
            highest,
            resolvable,
            f_rot,
        )
    return scan
