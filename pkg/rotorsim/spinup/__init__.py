"""Classical simulation of the spin-up and release protocol."""
from .ensemble import ReleaseEnsembleResult, monte_carlo_release
from .export import export_trajectory_csv, export_waveform_csv
from .forces import (
    ClassicalState,
    angular_momentum,
    calibrate_quadrupole,
    force_field,
    pinned_equilibrium,
    pinned_normal_modes,
    rotating_state,
    tilt_frequency,
    total_energy,
)
from .integrator import Trajectory, VelocityVerletIntegrator, default_time_step, integrate_trajectory, max_time_step
from .thermal import ThermalOccupation, sample_thermal_tilt, tilt_variances
from .waveform import SpinUpWaveform, build_waveform, sample_waveform

__all__ = [
    "ClassicalState",
    "ReleaseEnsembleResult",
    "SpinUpWaveform",
    "ThermalOccupation",
    "Trajectory",
    "VelocityVerletIntegrator",
    "angular_momentum",
    "build_waveform",
    "calibrate_quadrupole",
    "default_time_step",
    "export_trajectory_csv",
    "export_waveform_csv",
    "force_field",
    "integrate_trajectory",
    "max_time_step",
    "monte_carlo_release",
    "pinned_equilibrium",
    "pinned_normal_modes",
    "rotating_state",
    "sample_thermal_tilt",
    "sample_waveform",
    "tilt_frequency",
    "tilt_variances",
    "total_energy",
]
