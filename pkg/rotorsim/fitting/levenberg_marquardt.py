"""Damped Gauss-Newton minimization of weighted squared residuals."""
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Set

import numpy as np

from ..const import (
    FIT_CHI2_FLOOR,
    FIT_CHI2_TOLERANCE,
    FIT_INITIAL_LAMBDA,
    FIT_LAMBDA_DOWN,
    FIT_LAMBDA_MAX,
    FIT_LAMBDA_UP,
    FIT_MAX_ITERATIONS,
    FIT_PATIENCE,
    FIT_RELATIVE_STEP,
    FIT_SINGULAR_CONDITION,
    FIT_STATIONARY_TOLERANCE,
    FIT_STEP_TOLERANCE,
    LOGGER_NAME,
)
from ..exceptions import RotorSimError

_LOGGER = logging.getLogger(LOGGER_NAME)

ResidualFunction = Callable[[np.ndarray], np.ndarray]


@dataclass
class MinimizerOutcome:
    """Result of one Levenberg-Marquardt run."""

    parameters: np.ndarray
    chi2: float
    residuals: np.ndarray
    n_iterations: int
    converged: bool
    message: str
    normal_matrix: Optional[np.ndarray] = None
    iteration_log: List[Dict[str, Any]] = field(default_factory=list)


def safe_residuals(residual_fn: ResidualFunction, parameters: np.ndarray) -> Optional[np.ndarray]:
    """Residuals, or None when the model cannot be evaluated there."""
    try:
        with np.errstate(all="ignore"):
            residuals = np.asarray(residual_fn(parameters), dtype=float)
    except (RotorSimError, FloatingPointError, ZeroDivisionError) as err:
        _LOGGER.debug("Model evaluation failed at %s: %s", parameters, err)
        return None
    if not np.all(np.isfinite(residuals)):
        return None
    return residuals


def forward_jacobian(
    residual_fn: ResidualFunction,
    parameters: np.ndarray,
    residuals: np.ndarray,
    upper: np.ndarray,
    relative_step: float = FIT_RELATIVE_STEP,
) -> Optional[np.ndarray]:
    """Forward-difference Jacobian of the residuals, stepping inwards at upper bounds."""
    jacobian = np.empty((residuals.size, parameters.size))
    for column in range(parameters.size):
        value = parameters[column]
        step = relative_step * abs(value) if value != 0 else relative_step
        if value + step > upper[column]:
            step = -step
        shifted = parameters.copy()
        shifted[column] = value + step
        trial = safe_residuals(residual_fn, shifted)
        if trial is None:
            shifted[column] = value - step
            trial = safe_residuals(residual_fn, shifted)
            if trial is None:
                return None
            step = -step
        jacobian[:, column] = (trial - residuals) / step
    return jacobian


def central_jacobian(
    residual_fn: ResidualFunction, parameters: np.ndarray, relative_step: float = FIT_RELATIVE_STEP
) -> np.ndarray:
    """Central-difference Jacobian, for checking the forward one."""
    columns = []
    for column in range(parameters.size):
        value = parameters[column]
        step = relative_step * abs(value) if value != 0 else relative_step
        plus = parameters.copy()
        minus = parameters.copy()
        plus[column] = value + step
        minus[column] = value - step
        columns.append((np.asarray(residual_fn(plus)) - np.asarray(residual_fn(minus))) / (2.0 * step))
    return np.stack(columns, axis=1)


def is_singular(normal_matrix: np.ndarray) -> bool:
    """Normal matrix singular after scaling to unit diagonal."""
    diagonal = np.diag(normal_matrix)
    if not np.all(np.isfinite(normal_matrix)) or np.any(diagonal <= 0):
        return True
    scale = 1.0 / np.sqrt(diagonal)
    scaled = normal_matrix * np.outer(scale, scale)
    return bool(np.linalg.cond(scaled) > FIT_SINGULAR_CONDITION)


def levenberg_marquardt(
    residual_fn: ResidualFunction,
    initial: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    chi2_floor: float = FIT_CHI2_FLOOR,
    max_iterations: int = FIT_MAX_ITERATIONS,
    labels: Optional[List[str]] = None,
) -> MinimizerOutcome:
    """Minimize residuals . residuals within box bounds.

    Each iteration solves (A + lambda diag A) delta = -J^T r. Rejected trials
    raise lambda tenfold, accepted ones lower it tenfold. Trials outside the
    bounds are clamped, and one warning per call names the clamped parameters.
    """
    labels = labels or [f"p{i}" for i in range(len(initial))]
    clamped_labels: Set[str] = set()
    outcome = _minimize(residual_fn, initial, lower, upper, chi2_floor, max_iterations, labels, clamped_labels)
    if clamped_labels:
        _LOGGER.warning("Clamped %s to their bounds during the fit", sorted(clamped_labels))
    return outcome


def _minimize(
    residual_fn: ResidualFunction,
    initial: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    chi2_floor: float,
    max_iterations: int,
    labels: List[str],
    clamped_labels: Set[str],
) -> MinimizerOutcome:
    parameters = np.clip(np.asarray(initial, dtype=float), lower, upper)
    residuals = safe_residuals(residual_fn, parameters)
    if residuals is None:
        return MinimizerOutcome(parameters, np.inf, np.array([]), 0, False, "model cannot be evaluated at the start")

    chi2 = float(residuals @ residuals)
    damping = FIT_INITIAL_LAMBDA
    streak = 0
    log: List[Dict[str, Any]] = []
    normal_matrix = None

    for iteration in range(1, max_iterations + 1):
        if chi2 <= chi2_floor:
            return MinimizerOutcome(
                parameters, chi2, residuals, iteration - 1, True, "chi2 at the round-off floor", normal_matrix, log
            )

        jacobian = forward_jacobian(residual_fn, parameters, residuals, upper)
        if jacobian is None:
            return MinimizerOutcome(
                parameters, chi2, residuals, iteration, False, "Jacobian could not be evaluated", None, log
            )
        normal_matrix = jacobian.T @ jacobian
        gradient = -jacobian.T @ residuals
        if is_singular(normal_matrix):
            flat = [labels[i] for i in np.flatnonzero(np.diag(normal_matrix) <= 0)]
            message = "singular normal matrix" + (f"; no sensitivity to {flat}" if flat else "")
            _LOGGER.warning("Fit stopped: %s", message)
            return MinimizerOutcome(parameters, chi2, residuals, iteration, False, message, normal_matrix, log)

        diagonal = np.diag(np.diag(normal_matrix))
        while True:
            try:
                step = np.linalg.solve(normal_matrix + damping * diagonal, gradient)
            except np.linalg.LinAlgError:
                step = None

            if step is not None:
                trial = parameters + step
                clamped = np.clip(trial, lower, upper)
                if np.any(clamped != trial):
                    hit = [labels[i] for i in np.flatnonzero(clamped != trial)]
                    clamped_labels.update(hit)
                    _LOGGER.debug("Clamped %s to bounds at iteration %d", hit, iteration)
                trial_residuals = safe_residuals(residual_fn, clamped)
                trial_chi2 = np.inf if trial_residuals is None else float(trial_residuals @ trial_residuals)
            else:
                clamped, trial_chi2 = parameters, np.inf

            accepted = trial_chi2 < chi2
            scale = np.where(parameters != 0, np.abs(parameters), 1.0)
            step_norm = float(np.max(np.abs(clamped - parameters) / scale))
            log.append(
                {
                    "iteration": iteration,
                    "chi2": chi2 if not accepted else trial_chi2,
                    "lambda": damping,
                    "step_norm": step_norm,
                    "accepted": bool(accepted),
                }
            )

            if accepted:
                decrease = (chi2 - trial_chi2) / chi2
                parameters, residuals, chi2 = clamped, trial_residuals, trial_chi2
                damping = max(damping * FIT_LAMBDA_DOWN, 1e-15)
                _LOGGER.debug(
                    "Iteration %d: chi2=%.10g lambda=%.3g step=%.3g", iteration, chi2, damping, step_norm
                )
                streak = streak + 1 if (decrease < FIT_CHI2_TOLERANCE or step_norm < FIT_STEP_TOLERANCE) else 0
                if streak >= FIT_PATIENCE:
                    return MinimizerOutcome(
                        parameters, chi2, residuals, iteration, True, "converged", normal_matrix, log
                    )
                break

            damping *= FIT_LAMBDA_UP
            if damping > FIT_LAMBDA_MAX:
                # parameters held at a bound by the gradient cannot move
                blocked = ((parameters <= lower) & (gradient < 0)) | ((parameters >= upper) & (gradient > 0))
                free = ~blocked
                if not np.any(free):
                    return MinimizerOutcome(
                        parameters, chi2, residuals, iteration, True, "stationary point", normal_matrix, log
                    )
                try:
                    newton = np.linalg.lstsq(normal_matrix[np.ix_(free, free)], gradient[free], rcond=None)[0]
                    predicted = float(gradient[free] @ newton)
                except np.linalg.LinAlgError:
                    predicted = np.inf
                if predicted <= FIT_STATIONARY_TOLERANCE * chi2:
                    return MinimizerOutcome(
                        parameters, chi2, residuals, iteration, True, "stationary point", normal_matrix, log
                    )
                message = f"damping exhausted with predicted decrease {predicted:.3g}"
                _LOGGER.warning("Fit stopped: %s", message)
                return MinimizerOutcome(parameters, chi2, residuals, iteration, False, message, normal_matrix, log)

    _LOGGER.warning("Fit stopped after %d iterations without converging", max_iterations)
    return MinimizerOutcome(
        parameters, chi2, residuals, max_iterations, False, "iteration limit reached", normal_matrix, log
    )
