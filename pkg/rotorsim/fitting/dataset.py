"""Measured or synthetic traces to fit."""
import logging
import math
from typing import Optional

import numpy as np

from ..const import DATASET_KINDS, LOGGER_NAME
from ..exceptions import FitError

_LOGGER = logging.getLogger(LOGGER_NAME)


def binomial_error(y, shots) -> np.ndarray:
    """Standard error of an excitation estimated from shots, floored at 1/(4 shots)."""
    y = np.asarray(y, dtype=float)
    shots = np.broadcast_to(np.asarray(shots, dtype=float), y.shape)
    variance = np.maximum(y * (1.0 - y), 1.0 / (4.0 * shots))
    return np.sqrt(variance / shots)


class Dataset:
    """One trace: x in s (rabi, ramsey) or rad/s (spectrum), y an excitation."""

    def __init__(self, kind: str, x, y, y_err=None, shots=None, name: Optional[str] = None):
        """Initialize and validate the trace."""
        if kind not in DATASET_KINDS:
            raise FitError(f"unknown dataset kind {kind!r}; expected one of {DATASET_KINDS}")

        x = np.asarray(x, dtype=float).reshape(-1)
        y = np.asarray(y, dtype=float).reshape(-1)
        if x.size == 0:
            raise FitError("dataset has no points")
        if x.shape != y.shape:
            raise FitError(f"x has {x.size} points but y has {y.size}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise FitError("dataset contains non-finite values")
        if np.any(y < 0) or np.any(y > 1):
            raise FitError("excitation values must lie in [0, 1]")

        if shots is not None:
            shots = np.broadcast_to(np.asarray(shots, dtype=float), y.shape).copy()
            if np.any(shots < 1):
                raise FitError("shot counts must be at least 1")

        if y_err is not None:
            y_err = np.broadcast_to(np.asarray(y_err, dtype=float), y.shape).copy()
            if not (np.all(np.isfinite(y_err)) and np.all(y_err > 0)):
                raise FitError("y_err must be positive")
        elif shots is not None:
            y_err = binomial_error(y, shots)

        self.kind = kind
        self.x = x
        self.y = y
        self.y_err = y_err
        self.shots = shots
        self.name = name

    @property
    def has_errors(self) -> bool:
        """True when per-point standard errors are known."""
        return self.y_err is not None

    @property
    def weights(self) -> np.ndarray:
        """Least-squares weights 1 / y_err^2, or ones."""
        if self.y_err is None:
            return np.ones_like(self.y)
        return 1.0 / (self.y_err * self.y_err)

    def __len__(self) -> int:
        return int(self.y.size)

    def permuted(self, order) -> "Dataset":
        """Copy with the points reordered."""
        order = np.asarray(order)
        return Dataset(
            self.kind,
            self.x[order],
            self.y[order],
            None if self.y_err is None else self.y_err[order],
            None if self.shots is None else self.shots[order],
            self.name,
        )

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"<Dataset{label} {self.kind} n={len(self)} errors={'yes' if self.has_errors else 'no'}>"


def synthetic_dataset(kind: str, x, truth, shots: Optional[int] = None, rng=None, noise: float = 0.0, name=None):
    """Dataset drawn around the model values truth.

    With shots, y is a binomial estimate; with noise, Gaussian noise of that
    standard deviation is added (clipped to [0, 1]) and used as y_err.
    """
    truth = np.clip(np.asarray(truth, dtype=float), 0.0, 1.0)
    if shots is not None:
        if rng is None:
            raise FitError("binomial noise needs a random generator")
        y = rng.binomial(int(shots), truth) / float(shots)
        return Dataset(kind, x, y, shots=shots, name=name)
    if noise > 0:
        if rng is None:
            raise FitError("Gaussian noise needs a random generator")
        y = np.clip(truth + noise * rng.standard_normal(truth.shape), 0.0, 1.0)
        return Dataset(kind, x, y, y_err=math.fabs(noise), name=name)
    return Dataset(kind, x, truth, name=name)
