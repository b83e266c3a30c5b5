"""Monte-Carlo release ensembles of the spin-up protocol."""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from scipy.stats import kurtosis, skew

from ..const import DEFAULT_TRAJECTORY_CHUNK, HBAR, LOGGER_NAME
from ..exceptions import DomainError, IntegratorError
from ..physics.geometry import RotorGeometry, angular_momentum_to_frequency
from ..utils import thread_count
from .forces import angular_momentum
from .integrator import VelocityVerletIntegrator
from .thermal import OccupationLike, sample_thermal_tilt
from .waveform import SpinUpWaveform

_LOGGER = logging.getLogger(LOGGER_NAME)


@dataclass
class ReleaseEnsembleResult:
    """Statistics of the freely rotating crystals after release."""

    final_f_rot_mean: float
    final_f_rot_std: float
    l0_est: float
    sigma_l_est: float
    trajectories_kept: int
    skewness: float
    excess_kurtosis: float
    target_f_rot: float
    l_values: List[float] = field(default_factory=list)
    f_rot_values: List[float] = field(default_factory=list)
    seeds: List[Any] = field(default_factory=list)
    free_angular_momentum_drift: Optional[float] = None

    @property
    def frequency_offset(self) -> float:
        """Relative offset of the mean final rotation from the target."""
        if self.target_f_rot == 0:
            return self.final_f_rot_mean
        return (self.final_f_rot_mean - self.target_f_rot) / self.target_f_rot

    def as_dict(self) -> Dict[str, Any]:
        """Plain dictionary for reports."""
        data = asdict(self)
        data["frequency_offset"] = self.frequency_offset
        return data


def trajectory_seed(seed: int, index: int, seeds: Optional[Sequence] = None):
    """RNG seed of trajectory index, (seed, index) unless given explicitly."""
    if seeds is not None:
        return seeds[index]
    return [int(seed), int(index)]


def _gaussianity(values: np.ndarray):
    if values.size < 3 or float(np.std(values)) == 0.0:
        return 0.0, 0.0
    return float(skew(values)), float(kurtosis(values))


class _ChunkRunner:
    """Propagates one fixed chunk of the ensemble."""

    def __init__(self, waveform: SpinUpWaveform, geometry: RotorGeometry, dt: Optional[float]):
        """Initialize the shared protocol."""
        self.waveform = waveform
        self.geometry = geometry
        self.dt = dt

    def __call__(self, positions: np.ndarray, velocities: np.ndarray):
        integrator = VelocityVerletIntegrator(self.waveform, self.geometry, self.dt)
        waveform = self.waveform
        if waveform.t_free > 0:
            released = integrator.integrate(positions, velocities, 0.0, waveform.release_end, n_samples=2)
            start_p = released.positions[-1]
            start_v = released.velocities[-1]
            final = integrator.integrate(start_p, start_v, waveform.release_end, waveform.duration, n_samples=2)
            l_start = angular_momentum(start_p, start_v, self.geometry.ion_mass)
        else:
            final = integrator.integrate(positions, velocities, 0.0, waveform.duration, n_samples=2)
            l_start = None
        l_end = angular_momentum(final.positions[-1], final.velocities[-1], self.geometry.ion_mass)
        return l_start, l_end


def monte_carlo_release(
    n_traj: int,
    occupation: OccupationLike,
    waveform: SpinUpWaveform,
    geometry: RotorGeometry,
    dt: Optional[float] = None,
    seed: int = 0,
    seeds: Optional[Sequence] = None,
    threads: Optional[int] = None,
    chunk_size: int = DEFAULT_TRAJECTORY_CHUNK,
) -> ReleaseEnsembleResult:
    """Run n_traj thermally seeded trajectories through the whole protocol.

    Trajectory i draws its tilt mode from default_rng([seed, i]) unless
    seeds gives it explicitly. Chunks are fixed by index so the result does
    not depend on the thread count.
    """
    if n_traj < 2:
        raise DomainError(f"n_traj must be at least 2, got {n_traj!r}")
    if seeds is not None and len(seeds) != n_traj:
        raise DomainError(f"got {len(seeds)} seeds for {n_traj} trajectories")
    if chunk_size < 1:
        raise DomainError(f"chunk_size must be positive, got {chunk_size!r}")

    trajectory_seeds = [trajectory_seed(seed, index, seeds) for index in range(n_traj)]
    initial = [
        sample_thermal_tilt(occupation, waveform.omega_tilt, geometry, value, waveform.quad_strength)
        for value in trajectory_seeds
    ]
    positions = np.stack([state.positions for state in initial])
    velocities = np.stack([state.velocities for state in initial])

    runner = _ChunkRunner(waveform, geometry, dt)
    starts = list(range(0, n_traj, chunk_size))
    workers = min(thread_count(threads), len(starts))
    _LOGGER.info(
        "Releasing %d trajectories in %d chunks on %d threads (f_target=%.6g Hz)",
        n_traj,
        len(starts),
        workers,
        waveform.f_target,
    )

    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = [
            executor.submit(runner, positions[start : start + chunk_size], velocities[start : start + chunk_size])
            for start in starts
        ]
        outcomes = []
        for start, future in zip(starts, futures):
            try:
                outcomes.append(future.result())
            except IntegratorError as err:
                index = start + (err.trajectory_index or 0)
                raise IntegratorError(err.reason, index, trajectory_seeds[index]) from err

    l_momentum = np.concatenate([outcome[1] for outcome in outcomes])
    drift = None
    if waveform.t_free > 0:
        l_released = np.concatenate([outcome[0] for outcome in outcomes])
        scale = np.where(l_released != 0, np.abs(l_released), 1.0)
        drift = float(np.max(np.abs(l_momentum - l_released) / scale)) / (waveform.t_free / 1e-3)

    l_values = l_momentum / HBAR
    f_values = np.array([angular_momentum_to_frequency(geometry, value) for value in l_momentum])
    skewness, excess_kurtosis = _gaussianity(l_values)

    result = ReleaseEnsembleResult(
        final_f_rot_mean=float(np.mean(f_values)),
        final_f_rot_std=float(np.std(f_values, ddof=1)),
        l0_est=float(np.mean(l_values)),
        sigma_l_est=float(np.std(l_values, ddof=1)),
        trajectories_kept=int(l_values.size),
        skewness=skewness,
        excess_kurtosis=excess_kurtosis,
        target_f_rot=waveform.f_target,
        l_values=[float(value) for value in l_values],
        f_rot_values=[float(value) for value in f_values],
        seeds=trajectory_seeds,
        free_angular_momentum_drift=drift,
    )
    _LOGGER.info(
        "Release ensemble: f_rot=%.6g +- %.3g Hz, l0=%.6g, sigma_l=%.4g",
        result.final_f_rot_mean,
        result.final_f_rot_std,
        result.l0_est,
        result.sigma_l_est,
    )
    return result
