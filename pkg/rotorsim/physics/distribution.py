"""Angular momentum distributions for rotorsim."""
import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from ..const import DEFAULT_N_CUT, LOGGER_NAME
from ..exceptions import DomainError
from .geometry import RotorGeometry, mean_quantum_number, thermal_sigma

_LOGGER = logging.getLogger(LOGGER_NAME)

PARITY_EVEN = "even"
PARITY_ODD = "odd"


def _round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


class AngularDistribution:
    """Population over integer angular momentum quanta centred on l0."""

    def __init__(self, l0: float, sigma_l: float, ls, probabilities):
        """Initialize from explicit quanta and (unnormalized) populations."""
        if not math.isfinite(l0):
            raise DomainError(f"l0 must be finite, got {l0!r}")
        if not (math.isfinite(sigma_l) and sigma_l >= 0):
            raise DomainError(f"sigma_l must be non-negative, got {sigma_l!r}")

        ls = np.asarray(ls, dtype=np.int64).reshape(-1)
        probabilities = np.asarray(probabilities, dtype=float).reshape(-1)
        if ls.size == 0:
            raise DomainError("distribution has no populated angular momentum states")
        if ls.shape != probabilities.shape:
            raise DomainError(
                f"got {ls.size} quanta but {probabilities.size} populations"
            )
        if np.any(~np.isfinite(probabilities)) or np.any(probabilities < 0):
            raise DomainError("populations must be finite and non-negative")

        total = float(np.sum(probabilities))
        if total <= 0:
            raise DomainError("populations sum to zero")

        self.l0 = float(l0)
        self.sigma_l = float(sigma_l)
        self.ls = ls
        self.probabilities = probabilities / total

    @classmethod
    def gaussian(cls, l0: float, sigma_l: float, n_cut: float = DEFAULT_N_CUT) -> "AngularDistribution":
        """Discretized Gaussian truncated to |l - l0| <= n_cut * sigma_l."""
        if not (math.isfinite(sigma_l) and sigma_l >= 0):
            raise DomainError(f"sigma_l must be non-negative, got {sigma_l!r}")
        if n_cut <= 0:
            raise DomainError(f"n_cut must be positive, got {n_cut!r}")

        if sigma_l == 0:
            return cls(l0, 0.0, [_round_half_up(l0)], [1.0])

        lower = math.ceil(l0 - n_cut * sigma_l)
        upper = math.floor(l0 + n_cut * sigma_l)
        if lower > upper:
            _LOGGER.debug("Window around l0=%s holds no integer, using nearest", l0)
            return cls(l0, sigma_l, [_round_half_up(l0)], [1.0])

        ls = np.arange(lower, upper + 1, dtype=np.int64)
        offsets = ls - l0
        weights = np.exp(-(offsets * offsets) / (2.0 * sigma_l * sigma_l))
        return cls(l0, sigma_l, ls, weights)

    @classmethod
    def from_rotation(
        cls,
        geometry: RotorGeometry,
        f_rot: float,
        sigma_l: Optional[float] = None,
        temperature: Optional[float] = None,
        n_cut: float = DEFAULT_N_CUT,
    ) -> "AngularDistribution":
        """Build the distribution of a ring rotating at f_rot (Hz).

        Exactly one of sigma_l or temperature (K) sets the width.
        """
        if (sigma_l is None) == (temperature is None):
            raise DomainError("give exactly one of sigma_l or temperature")
        if sigma_l is None:
            sigma_l = thermal_sigma(geometry, temperature)
        return cls.gaussian(mean_quantum_number(geometry, f_rot), sigma_l, n_cut)

    def exchange_parity(self, parity: str) -> "AngularDistribution":
        """Keep only even or odd quanta, renormalized."""
        if parity not in (PARITY_EVEN, PARITY_ODD):
            raise DomainError(f"parity must be '{PARITY_EVEN}' or '{PARITY_ODD}', got {parity!r}")
        remainder = 0 if parity == PARITY_EVEN else 1
        mask = (self.ls % 2) == remainder
        if not np.any(mask):
            raise DomainError(f"no {parity} angular momentum states populated")
        return AngularDistribution(self.l0, self.sigma_l, self.ls[mask], self.probabilities[mask])

    @property
    def weights(self) -> List[Tuple[int, float]]:
        """(l, p) pairs in increasing l."""
        return [(int(l), float(p)) for l, p in zip(self.ls, self.probabilities)]

    @property
    def offsets(self) -> np.ndarray:
        """l0 - l for every populated state."""
        return self.l0 - self.ls.astype(float)

    @property
    def mean(self) -> float:
        """Population-weighted mean quantum number."""
        return float(np.dot(self.probabilities, self.ls.astype(float)))

    @property
    def std(self) -> float:
        """Population-weighted standard deviation."""
        centred = self.ls.astype(float) - self.mean
        return float(math.sqrt(np.dot(self.probabilities, centred * centred)))

    def __len__(self) -> int:
        return int(self.ls.size)

    def __repr__(self) -> str:
        return f"AngularDistribution(l0={self.l0!r}, sigma_l={self.sigma_l!r}, states={len(self)})"
