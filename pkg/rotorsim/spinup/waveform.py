"""Electrode waveform of the pin, spin-up and release protocol."""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from ..const import (
    ELECTRODE_COUNT,
    ELECTRODE_PHASE_STEP,
    LOGGER_NAME,
    RAMP_CONSTANT_ACCELERATION,
    RAMP_PROFILES,
    RAMP_SMOOTHSTEP,
)
from ..exceptions import DomainError
from ..physics.geometry import RotorGeometry
from .forces import calibrate_quadrupole

_LOGGER = logging.getLogger(LOGGER_NAME)


def _ramp_phase(profile: str, u: float) -> float:
    """Normalized ramp phase S(u) with S(0) = S'(0) = 0 and S'(1) = 1."""
    if profile == RAMP_SMOOTHSTEP:
        return u ** 3 - 0.5 * u ** 4
    return 0.5 * u * u


def _ramp_rate(profile: str, u: float) -> float:
    """Derivative S'(u) of the normalized ramp phase."""
    if profile == RAMP_SMOOTHSTEP:
        return 3.0 * u * u - 2.0 * u ** 3
    return u


@dataclass(frozen=True)
class SpinUpWaveform:
    """Rotating quadrupole: pin hold, phase ramp, release ramp, free evolution.

    quad_strength is the quadrupole curvature eps in s^-2 at full amplitude.
    """

    f_target: float
    t_spin: float
    t_release: float
    omega_tilt: float
    quad_strength: float
    t_pin: float = 0.0
    t_free: float = 0.0
    ramp_profile: str = RAMP_CONSTANT_ACCELERATION
    phase_offsets: Tuple[float, ...] = field(
        default_factory=lambda: tuple(i * ELECTRODE_PHASE_STEP for i in range(ELECTRODE_COUNT))
    )

    def __post_init__(self):
        """Validate stage durations and strengths."""
        for name in ("f_target", "t_pin", "t_free", "omega_tilt", "quad_strength"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise DomainError(f"{name} must be non-negative, got {value!r}")
        for name in ("t_spin", "t_release"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be positive, got {value!r}")
        if self.ramp_profile not in RAMP_PROFILES:
            raise DomainError(f"unknown ramp profile {self.ramp_profile!r}")
        if len(self.phase_offsets) != ELECTRODE_COUNT:
            raise DomainError(f"expected {ELECTRODE_COUNT} electrode phases")

    @classmethod
    def free(cls, duration: float) -> "SpinUpWaveform":
        """Waveform with no quadrupole at all, for free evolution."""
        if not (math.isfinite(duration) and duration > 0):
            raise DomainError(f"duration must be positive, got {duration!r}")
        third = duration / 3.0
        return cls(0.0, third, third, 0.0, 0.0, t_free=duration - 2.0 * third)

    @property
    def ramp_start(self) -> float:
        """Time the phase ramp begins."""
        return self.t_pin

    @property
    def ramp_end(self) -> float:
        """Time the target rotation rate is reached."""
        return self.t_pin + self.t_spin

    @property
    def release_end(self) -> float:
        """Time the quadrupole amplitude reaches zero."""
        return self.ramp_end + self.t_release

    @property
    def duration(self) -> float:
        """Total protocol length."""
        return self.release_end + self.t_free

    @property
    def target_rate(self) -> float:
        """Final angular velocity 2 pi f_target of the quadrupole."""
        return 2.0 * math.pi * self.f_target

    @property
    def ramp_phase(self) -> float:
        """Phase accumulated over the ramp."""
        return self.target_rate * self.t_spin * _ramp_phase(self.ramp_profile, 1.0)

    def alpha0(self, t: float) -> float:
        """Quadrupole orientation at time t."""
        if t <= self.ramp_start:
            return 0.0
        if t < self.ramp_end:
            u = (t - self.ramp_start) / self.t_spin
            return self.target_rate * self.t_spin * _ramp_phase(self.ramp_profile, u)
        return self.ramp_phase + self.target_rate * (t - self.ramp_end)

    def alpha0_rate(self, t: float) -> float:
        """Instantaneous angular velocity of the quadrupole at time t."""
        if t <= self.ramp_start:
            return 0.0
        if t < self.ramp_end:
            return self.target_rate * _ramp_rate(self.ramp_profile, (t - self.ramp_start) / self.t_spin)
        return self.target_rate

    def amplitude(self, t: float) -> float:
        """Normalized quadrupole amplitude at time t."""
        if t <= self.ramp_end:
            return 1.0
        if t >= self.release_end:
            return 0.0
        return 1.0 - (t - self.ramp_end) / self.t_release

    def quadrupole(self, t: float) -> float:
        """Quadrupole curvature eps(t) in s^-2."""
        return self.quad_strength * self.amplitude(t)

    def electrode_voltages(self, t: float) -> np.ndarray:
        """Normalized electrode voltages amplitude cos(alpha0 + alpha_i)."""
        return self.amplitude(t) * np.cos(self.alpha0(t) + np.asarray(self.phase_offsets))

    def static_segments(self) -> List[Tuple[float, float]]:
        """Intervals over which the potential does not change in time."""
        if self.quad_strength == 0:
            return [(0.0, self.duration)]
        segments = []
        pinned_end = self.ramp_end if self.f_target == 0 else self.ramp_start
        if pinned_end > 0:
            segments.append((0.0, pinned_end))
        if self.t_free > 0:
            segments.append((self.release_end, self.duration))
        return segments

    def fastest_frequency(self, geometry: RotorGeometry) -> float:
        """Largest of f_target, omega_x / 2 pi and omega_tilt / 2 pi, in Hz."""
        return max(self.f_target, geometry.omega_x / (2.0 * math.pi), self.omega_tilt / (2.0 * math.pi))


def build_waveform(
    f_target: float,
    t_spin: float,
    t_release: float,
    omega_tilt: float,
    geometry: Optional[RotorGeometry] = None,
    t_pin: float = 0.0,
    t_free: float = 0.0,
    ramp_profile: str = RAMP_CONSTANT_ACCELERATION,
) -> SpinUpWaveform:
    """Build the three-stage schedule reaching 2 pi f_target after t_spin.

    With a geometry the quadrupole strength comes from the numerical normal
    mode calibration; otherwise from the closed form eps = omega_tilt^2 / 2.
    """
    if not (math.isfinite(t_spin) and t_spin > 0):
        raise DomainError(f"t_spin must be positive, got {t_spin!r}")
    if not (math.isfinite(t_release) and t_release > 0):
        raise DomainError(f"t_release must be positive, got {t_release!r}")
    if not (math.isfinite(omega_tilt) and omega_tilt > 0):
        raise DomainError(f"omega_tilt must be positive, got {omega_tilt!r}")
    if not (math.isfinite(f_target) and f_target >= 0):
        raise DomainError(f"f_target must be non-negative, got {f_target!r}")

    if geometry is None:
        quad_strength = 0.5 * omega_tilt ** 2
    else:
        quad_strength = calibrate_quadrupole(geometry, omega_tilt)
        if 2.0 * math.pi * f_target >= math.sqrt(geometry.omega_x ** 2 - quad_strength):
            raise DomainError(f"f_target {f_target!r} Hz unbinds the pinned crystal")

    waveform = SpinUpWaveform(
        f_target=f_target,
        t_spin=t_spin,
        t_release=t_release,
        omega_tilt=omega_tilt,
        quad_strength=quad_strength,
        t_pin=t_pin,
        t_free=t_free,
        ramp_profile=ramp_profile,
    )
    _LOGGER.debug(
        "Built waveform: f_target=%.6g Hz, t_spin=%.3g s, t_release=%.3g s, eps=%.6g s^-2",
        f_target,
        t_spin,
        t_release,
        quad_strength,
    )
    return waveform


def sample_waveform(waveform: SpinUpWaveform, dt: float):
    """Tabulate time, alpha0, amplitude and electrode voltages at step dt."""
    if not (math.isfinite(dt) and dt > 0):
        raise DomainError(f"dt must be positive, got {dt!r}")
    n_steps = int(math.ceil(waveform.duration / dt - 1e-9))
    times = np.linspace(0.0, waveform.duration, n_steps + 1)
    alpha0 = np.array([waveform.alpha0(t) for t in times])
    amplitude = np.array([waveform.amplitude(t) for t in times])
    voltages = amplitude[:, None] * np.cos(alpha0[:, None] + np.asarray(waveform.phase_offsets)[None, :])
    return times, alpha0, amplitude, voltages
