"""CSV export of waveforms and trajectories."""
import csv
import logging
from pathlib import Path
from typing import Union

from ..const import CSV_SIGNIFICANT_DIGITS, ELECTRODE_COUNT, HBAR, LOGGER_NAME
from ..exceptions import DataError
from ..physics.geometry import RotorGeometry
from ..utils import format_significant
from .forces import angular_momentum
from .integrator import Trajectory
from .waveform import SpinUpWaveform, sample_waveform

_LOGGER = logging.getLogger(LOGGER_NAME)

WAVEFORM_COLUMNS = ["time_s", "alpha0_rad", "amplitude_norm"] + [
    f"v_{i}" for i in range(1, ELECTRODE_COUNT + 1)
]
TRAJECTORY_COLUMNS = [
    "time_s",
    "x1_m",
    "y1_m",
    "x2_m",
    "y2_m",
    "vx1_m_s",
    "vy1_m_s",
    "vx2_m_s",
    "vy2_m_s",
    "l_quanta",
]


def _fmt(value) -> str:
    return format_significant(value, CSV_SIGNIFICANT_DIGITS)


def _write_rows(path: Union[str, Path], header, rows) -> Path:
    path = Path(path)
    try:
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as err:
        raise DataError(f"cannot write: {err.strerror or err}", path=str(path)) from err
    return path


def export_waveform_csv(waveform: SpinUpWaveform, path: Union[str, Path], dt: float) -> Path:
    """Write the electrode schedule sampled every dt."""
    times, alpha0, amplitude, voltages = sample_waveform(waveform, dt)
    rows = (
        [_fmt(t), _fmt(a), _fmt(amp)] + [_fmt(v) for v in volts]
        for t, a, amp, volts in zip(times, alpha0, amplitude, voltages)
    )
    written = _write_rows(path, WAVEFORM_COLUMNS, rows)
    _LOGGER.debug("Wrote %d waveform samples to %s", times.size, written)
    return written


def export_trajectory_csv(
    trajectory: Trajectory, geometry: RotorGeometry, path: Union[str, Path], index: int = 0
) -> Path:
    """Write one sampled trajectory with its angular momentum in units of hbar."""
    positions = trajectory.positions[:, index]
    velocities = trajectory.velocities[:, index]
    quanta = angular_momentum(positions, velocities, geometry.ion_mass) / HBAR
    rows = (
        [_fmt(t)] + [_fmt(v) for v in p.reshape(4)] + [_fmt(v) for v in u.reshape(4)] + [_fmt(l)]
        for t, p, u, l in zip(trajectory.times, positions, velocities, quanta)
    )
    written = _write_rows(path, TRAJECTORY_COLUMNS, rows)
    _LOGGER.debug("Wrote %d trajectory samples to %s", trajectory.times.size, written)
    return written
