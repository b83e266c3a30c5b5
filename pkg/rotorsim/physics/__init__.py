"""Static physics of the two-ion rotor."""
from .bessel import bessel_jn, bessel_jn_sequence, completeness_residual
from .distribution import AngularDistribution
from .drive import LaserDrive, coupling_strength, coupling_strengths, max_coupled_order
from .geometry import (
    RotorGeometry,
    angular_momentum_to_frequency,
    doppler_limit_sigma,
    equilibrium_radius,
    group_width,
    max_resolvable_order,
    mean_quantum_number,
    rigid_angular_momentum,
    rotation_radius,
    rotational_energy,
    rotor_constant,
    stretch_frequency,
    thermal_sigma,
    transition_detuning,
)
from .lines import TransitionLine, transition_lines

__all__ = [
    "AngularDistribution",
    "LaserDrive",
    "RotorGeometry",
    "TransitionLine",
    "angular_momentum_to_frequency",
    "bessel_jn",
    "bessel_jn_sequence",
    "completeness_residual",
    "coupling_strength",
    "coupling_strengths",
    "doppler_limit_sigma",
    "equilibrium_radius",
    "group_width",
    "max_coupled_order",
    "max_resolvable_order",
    "mean_quantum_number",
    "rigid_angular_momentum",
    "rotation_radius",
    "rotational_energy",
    "rotor_constant",
    "stretch_frequency",
    "thermal_sigma",
    "transition_detuning",
    "transition_lines",
]
