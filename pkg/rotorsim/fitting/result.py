"""Fit results and reporting."""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from ..const import LOGGER_NAME

_LOGGER = logging.getLogger(LOGGER_NAME)


@dataclass
class FitResult:
    """Best fit, uncertainties and diagnostics of a fit."""

    labels: List[str]
    best_fit: Dict[str, float]
    covariance: np.ndarray
    uncertainties: Dict[str, float]
    chi2: float
    chi2_reduced: float
    n_iterations: int
    converged: bool
    residuals: List[np.ndarray]
    n_points: int
    n_free: int
    message: str = ""
    covariance_scaled: bool = False
    derived: Dict[str, Dict[str, float]] = field(default_factory=dict)
    iteration_log: List[Dict[str, Any]] = field(default_factory=list)
    starts_tried: int = 1

    @property
    def dof(self) -> int:
        """Degrees of freedom."""
        return self.n_points - self.n_free

    def value(self, label: str) -> float:
        """Best-fit value of a parameter label."""
        return self.best_fit[label]

    def error(self, label: str) -> float:
        """One-sigma uncertainty of a parameter label."""
        return self.uncertainties[label]

    def within(self, label: str, truth: float, n_sigma: float = 3.0) -> bool:
        """True when truth lies within n_sigma reported uncertainties."""
        return abs(self.best_fit[label] - truth) <= n_sigma * self.uncertainties[label]

    def as_dict(self) -> Dict[str, Any]:
        """JSON-ready report."""

        def _clean(value: float) -> Optional[float]:
            value = float(value)
            return value if math.isfinite(value) else None

        return {
            "converged": self.converged,
            "message": self.message,
            "n_iterations": self.n_iterations,
            "starts_tried": self.starts_tried,
            "chi2": _clean(self.chi2),
            "chi2_reduced": _clean(self.chi2_reduced),
            "n_points": self.n_points,
            "n_free": self.n_free,
            "covariance_scaled_by_chi2_reduced": self.covariance_scaled,
            "parameters": {
                label: {"value": _clean(self.best_fit[label]), "uncertainty": _clean(self.uncertainties[label])}
                for label in self.labels
            },
            "covariance": {
                "labels": list(self.labels),
                "matrix": [[_clean(value) for value in row] for row in np.asarray(self.covariance)],
            },
            "derived": {
                label: {key: _clean(value) for key, value in entry.items()} for label, entry in self.derived.items()
            },
            "iteration_log": [
                {key: (_clean(value) if isinstance(value, float) else value) for key, value in entry.items()}
                for entry in self.iteration_log
            ],
            "residuals": [[_clean(value) for value in residual] for residual in self.residuals],
        }
