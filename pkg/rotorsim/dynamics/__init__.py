"""Time and frequency domain excitation signals."""
from .rabi import detuned_rabi, rabi_trace
from .ramsey import (
    RamseyConfig,
    contrast_envelope,
    dephasing_rate,
    envelope_decay_time,
    ramsey_trace,
    revival_time,
    symmetrized_revival_time,
)
from .spectrum import SpectrumScan, order_rabi_frequency, spectrum_scan

__all__ = [
    "RamseyConfig",
    "SpectrumScan",
    "contrast_envelope",
    "dephasing_rate",
    "detuned_rabi",
    "envelope_decay_time",
    "order_rabi_frequency",
    "rabi_trace",
    "ramsey_trace",
    "revival_time",
    "spectrum_scan",
    "symmetrized_revival_time",
]
