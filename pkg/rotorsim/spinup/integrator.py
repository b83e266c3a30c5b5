"""Velocity-Verlet propagation of the two-ion crystal."""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ..const import (
    COLLAPSE_FRACTION,
    DEFAULT_STEPS_PER_PERIOD,
    DEFAULT_TRAJECTORY_SAMPLES,
    FREE_SEGMENT_DRIFT_LIMIT,
    LOGGER_NAME,
    MIN_STEPS_PER_PERIOD,
)
from ..exceptions import DomainError, IntegratorError
from ..physics.geometry import RotorGeometry
from .forces import ClassicalState, accelerations, total_energy
from .waveform import SpinUpWaveform

_LOGGER = logging.getLogger(LOGGER_NAME)

CHECK_INTERVAL_STEPS = 1024


def max_time_step(waveform: SpinUpWaveform, geometry: RotorGeometry) -> float:
    """Largest admissible step, 1 / (200 f_fast)."""
    return 1.0 / (MIN_STEPS_PER_PERIOD * waveform.fastest_frequency(geometry))


def default_time_step(waveform: SpinUpWaveform, geometry: RotorGeometry) -> float:
    """Default step, 1 / (500 f_fast)."""
    return 1.0 / (DEFAULT_STEPS_PER_PERIOD * waveform.fastest_frequency(geometry))


@dataclass
class Trajectory:
    """Sampled batch of trajectories.

    positions and velocities have shape (samples, trajectories, 2, 2).
    """

    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    dt: float

    @property
    def n_trajectories(self) -> int:
        """Number of trajectories in the batch."""
        return int(self.positions.shape[1])

    def state(self, sample: int, index: int = 0) -> ClassicalState:
        """State of one trajectory at one sample."""
        return ClassicalState(
            self.positions[sample, index].copy(), self.velocities[sample, index].copy(), float(self.times[sample])
        )

    def states(self, index: int = 0) -> List[ClassicalState]:
        """All sampled states of one trajectory."""
        return [self.state(sample, index) for sample in range(self.times.size)]

    @property
    def final(self) -> ClassicalState:
        """Final state of the first trajectory."""
        return self.state(self.times.size - 1, 0)

    def final_states(self) -> List[ClassicalState]:
        """Final state of every trajectory."""
        return [self.state(self.times.size - 1, index) for index in range(self.n_trajectories)]


class VelocityVerletIntegrator:
    """Fixed-step velocity-Verlet integrator for a batch of two-ion crystals."""

    def __init__(self, waveform: SpinUpWaveform, geometry: RotorGeometry, dt: Optional[float] = None):
        """Initialize the integrator and check the step against the fastest motion."""
        if dt is None:
            dt = default_time_step(waveform, geometry)
        if not (math.isfinite(dt) and dt > 0):
            raise DomainError(f"dt must be positive, got {dt!r}")
        limit = max_time_step(waveform, geometry)
        if dt > limit * (1.0 + 1e-12):
            raise DomainError(f"dt {dt!r} s exceeds the stability limit {limit!r} s")

        self.waveform = waveform
        self.geometry = geometry
        self.dt = dt
        self._collapse = COLLAPSE_FRACTION * geometry.r_e

    def _accelerations(self, positions: np.ndarray, t: float) -> np.ndarray:
        return accelerations(
            positions, self.geometry, self.waveform.quadrupole(t), self.waveform.alpha0(t)
        )

    def _energy(self, positions: np.ndarray, velocities: np.ndarray, t: float) -> np.ndarray:
        return total_energy(
            positions, velocities, self.geometry, self.waveform.quadrupole(t), self.waveform.alpha0(t)
        )

    def _check(self, positions: np.ndarray, velocities: np.ndarray, t: float) -> None:
        finite = np.all(np.isfinite(positions), axis=(-2, -1)) & np.all(np.isfinite(velocities), axis=(-2, -1))
        if not np.all(finite):
            index = int(np.argmin(finite))
            raise IntegratorError(f"state became non-finite at t={t:.6g} s", trajectory_index=index)

        separation = np.linalg.norm(positions[:, 0, :] - positions[:, 1, :], axis=-1)
        if np.any(separation < self._collapse):
            index = int(np.argmin(separation))
            raise IntegratorError(
                f"ions collapsed to {separation[index]:.3g} m at t={t:.6g} s", trajectory_index=index
            )

    def _static_windows(self, t_start: float, n_steps: int, dt: float):
        """Step-index windows lying inside static segments of the waveform."""
        windows = []
        for start, end in self.waveform.static_segments():
            first = max(0, int(math.ceil((start - t_start) / dt - 1e-9)))
            last = min(n_steps, int(math.floor((end - t_start) / dt + 1e-9)))
            if last > first:
                windows.append((first, last))
        return windows

    def integrate(
        self,
        positions: np.ndarray,
        velocities: np.ndarray,
        t_start: float,
        t_end: float,
        n_samples: int = DEFAULT_TRAJECTORY_SAMPLES,
    ) -> Trajectory:
        """Propagate a batch of shape (n, 2, 2) from t_start to t_end."""
        positions = np.array(positions, dtype=float)
        velocities = np.array(velocities, dtype=float)
        if positions.ndim == 2:
            positions = positions[None]
            velocities = velocities[None]
        if positions.shape != velocities.shape or positions.shape[1:] != (2, 2):
            raise DomainError(f"expected batch shape (n, 2, 2), got {positions.shape}")
        if not t_end > t_start:
            raise DomainError(f"t_end {t_end!r} must exceed the start time {t_start!r}")

        n_steps = int(math.ceil((t_end - t_start) / self.dt - 1e-9))
        dt = (t_end - t_start) / n_steps
        stride = max(1, n_steps // max(1, n_samples - 1))
        check_stride = min(stride, CHECK_INTERVAL_STEPS)
        windows = self._static_windows(t_start, n_steps, dt)
        self._check(positions, velocities, t_start)
        reference = {
            first: self._energy(positions, velocities, t_start) for first, _ in windows if first == 0
        }
        sample_times = [t_start]
        sample_positions = [positions.copy()]
        sample_velocities = [velocities.copy()]

        half_dt = 0.5 * dt
        acceleration = self._accelerations(positions, t_start)
        for step in range(1, n_steps + 1):
            t = t_start + step * dt
            velocities += half_dt * acceleration
            positions += dt * velocities
            acceleration = self._accelerations(positions, t)
            velocities += half_dt * acceleration

            sampled = step % stride == 0 or step == n_steps
            if sampled or step % check_stride == 0:
                self._check(positions, velocities, t)
            if sampled:
                sample_times.append(t)
                sample_positions.append(positions.copy())
                sample_velocities.append(velocities.copy())

            for first, last in windows:
                if step == first:
                    reference[first] = self._energy(positions, velocities, t)
                elif first < step <= last and (sampled or step == last) and first in reference:
                    energy = self._energy(positions, velocities, t)
                    drift = np.abs(energy - reference[first]) / np.abs(reference[first])
                    if np.any(drift > FREE_SEGMENT_DRIFT_LIMIT):
                        index = int(np.argmax(drift))
                        raise IntegratorError(
                            f"energy drifted by {drift[index]:.3g} in a static segment at t={t:.6g} s",
                            trajectory_index=index,
                        )

        _LOGGER.debug(
            "Integrated %d trajectories over %d steps of %.3g s", positions.shape[0], n_steps, dt
        )
        return Trajectory(
            times=np.asarray(sample_times),
            positions=np.stack(sample_positions),
            velocities=np.stack(sample_velocities),
            dt=dt,
        )


def integrate_trajectory(
    initial: ClassicalState,
    waveform: SpinUpWaveform,
    geometry: RotorGeometry,
    dt: Optional[float],
    t_end: float,
    n_samples: int = DEFAULT_TRAJECTORY_SAMPLES,
) -> Trajectory:
    """Propagate one crystal from initial.time to t_end."""
    integrator = VelocityVerletIntegrator(waveform, geometry, dt)
    return integrator.integrate(initial.positions, initial.velocities, initial.time, t_end, n_samples)
