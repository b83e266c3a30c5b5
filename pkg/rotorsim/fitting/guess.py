"""Deterministic initial guesses from data."""
import logging
import math
from typing import Dict

import numpy as np
from scipy.optimize import brentq
from scipy.signal import find_peaks, hilbert

from ..const import DEFAULT_BOUNDS, LOGGER_NAME, QUBIT_WAVELENGTH
from ..dynamics.rabi import manifold_detunings
from ..exceptions import FitError
from ..physics.distribution import AngularDistribution
from ..physics.geometry import RotorGeometry

_LOGGER = logging.getLogger(LOGGER_NAME)

SMOOTHING_POINTS = 5
# first autocorrelation peak within this fraction of the strongest is the group spacing
FUNDAMENTAL_FRACTION = 0.5


def _sorted(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 4:
        raise FitError("need at least four points to guess parameters")
    order = np.argsort(x, kind="stable")
    return x[order], y[order]


def _uniform(x: np.ndarray, y: np.ndarray):
    """Resample onto a uniform grid with the same number of points."""
    grid = np.linspace(x[0], x[-1], x.size)
    return grid, np.interp(grid, x, y)


def _smooth(y: np.ndarray) -> np.ndarray:
    width = min(SMOOTHING_POINTS, y.size)
    kernel = np.ones(width) / width
    padded = np.pad(y, (width // 2, width - 1 - width // 2), mode="edge")
    return np.convolve(padded, kernel, mode="valid")


def saturation_level(geometry: RotorGeometry, omega: float, sigma_l: float, delta_l: int) -> float:
    """Long-time mean excitation 1/2 sum p Omega^2 / (Omega^2 + d^2)."""
    dist = AngularDistribution.gaussian(0.0, sigma_l)
    detunings = manifold_detunings(geometry, dist, delta_l, 0.0)
    return 0.5 * float(dist.probabilities @ (omega * omega / (omega * omega + detunings * detunings)))


def guess_rabi(x, y, geometry: RotorGeometry, delta_l: int) -> Dict[str, float]:
    """Omega from the first peak time, sigma_l from the saturation level."""
    times, values = _sorted(x, y)
    smoothed = _smooth(values)
    peaks, _ = find_peaks(smoothed, prominence=0.1 * float(np.ptp(smoothed)) or None)
    first = int(peaks[0]) if peaks.size else int(np.argmax(smoothed))
    if times[first] <= 0:
        raise FitError("cannot locate the first Rabi maximum")
    omega = math.pi / times[first]

    tail = float(np.mean(values[values.size // 2 :]))
    upper = DEFAULT_BOUNDS["sigma_l"][1]
    ceiling = saturation_level(geometry, omega, 0.0, delta_l)
    if tail >= ceiling:
        sigma = 0.0
    elif tail <= saturation_level(geometry, omega, upper, delta_l):
        sigma = upper
    else:
        sigma = brentq(lambda s: saturation_level(geometry, omega, s, delta_l) - tail, 0.0, upper, xtol=1e-3)
    _LOGGER.debug("Rabi guess: omega=%.6g rad/s sigma_l=%.4g", omega, sigma)
    return {"omega": omega, "sigma_l": float(sigma)}


def guess_ramsey(x, y, geometry: RotorGeometry, delta_l: int) -> Dict[str, float]:
    """Detuning from the fringe FFT peak, sigma_l from the envelope 1/e time."""
    times, values = _sorted(x, y)
    grid, uniform = _uniform(times, values)
    spacing = grid[1] - grid[0]
    centred = uniform - np.mean(uniform)

    spectrum = np.abs(np.fft.rfft(centred, n=8 * centred.size))
    frequencies = np.fft.rfftfreq(8 * centred.size, d=spacing)
    peak = int(np.argmax(spectrum[1:])) + 1
    detuning = 2.0 * math.pi * frequencies[peak]

    envelope = _smooth(np.abs(hilbert(centred)))
    start = float(np.max(envelope[: max(1, envelope.size // 20)]))
    below = np.flatnonzero(envelope < start / math.e)
    sigma = 0.0
    if below.size and delta_l != 0 and grid[below[0]] > grid[0]:
        decay_time = grid[below[0]] - grid[0]
        rate = math.sqrt(2.0) / decay_time
        sigma = rate / (2.0 * geometry.omega_r * abs(delta_l))
    _LOGGER.debug("Ramsey guess: detuning=%.6g rad/s sigma_l=%.4g", detuning, sigma)
    return {"detuning": detuning, "sigma_l": float(sigma)}


def guess_spectrum(
    x, y, geometry: RotorGeometry, wavelength: float = QUBIT_WAVELENGTH, threshold: float = 0.1
) -> Dict[str, float]:
    """f_rot from the autocorrelation peak spacing, theta from the highest visible order."""
    detunings, values = _sorted(x, y)
    grid, uniform = _uniform(detunings, values)
    spacing = grid[1] - grid[0]
    centred = uniform - np.mean(uniform)

    correlation = np.correlate(centred, centred, mode="full")[centred.size - 1 :]
    lags, _ = find_peaks(correlation)
    if not lags.size:
        raise FitError("no periodic sideband structure found")
    heights = correlation[lags]
    lag = int(lags[np.argmax(heights >= FUNDAMENTAL_FRACTION * float(np.max(heights)))])
    group_spacing = lag * spacing
    f_rot = group_spacing / (2.0 * math.pi)

    level = threshold * float(np.max(uniform))
    highest = 0
    order = 1
    while True:
        centres = [order * group_spacing, -order * group_spacing]
        inside = [c for c in centres if grid[0] <= c <= grid[-1]]
        if not inside:
            break
        window = lag // 2 or 1
        visible = False
        for centre in inside:
            index = int(round((centre - grid[0]) / spacing))
            low, high = max(0, index - window), min(uniform.size, index + window + 1)
            visible = visible or float(np.max(uniform[low:high])) >= level
        if visible:
            highest = order
        order += 1

    reach = 2.0 * math.pi / wavelength * geometry.r_e
    theta = math.acos(min(1.0, highest / reach))
    _LOGGER.debug("Spectrum guess: f_rot=%.6g Hz theta=%.4g rad (order %d)", f_rot, theta, highest)
    return {"f_rot": f_rot, "theta": theta}
