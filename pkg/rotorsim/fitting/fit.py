"""Run a fit problem through the minimizer and report the result."""
import logging
import math
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from ..const import (
    FIT_CHI2_FLOOR,
    FIT_MAX_ITERATIONS,
    FIT_MULTI_START_COUNT,
    FIT_MULTI_START_JITTER,
    FIT_ROUNDOFF_RESIDUAL,
    KIND_RABI,
    KIND_RAMSEY,
    LOGGER_NAME,
    QUBIT_WAVELENGTH,
)
from ..exceptions import FitError
from ..utils import derive_seed, to_hz
from .guess import guess_rabi, guess_ramsey, guess_spectrum
from .levenberg_marquardt import MinimizerOutcome, forward_jacobian, is_singular, levenberg_marquardt
from .models import evaluate_model
from .problem import FitProblem, ParameterRegistry
from .result import FitResult

_LOGGER = logging.getLogger(LOGGER_NAME)

Guesses = Dict[Tuple[str, int], float]


def _dataset_guess(problem: FitProblem, index: int) -> Dict[str, float]:
    """Data-driven guesses for the model arguments of one dataset."""
    dataset = problem.datasets[index]
    fixed = problem.bindings[index].fixed
    if dataset.kind == KIND_RABI:
        guess = guess_rabi(dataset.x, dataset.y, problem.geometry, int(fixed["delta_l"]))
    elif dataset.kind == KIND_RAMSEY:
        guess = guess_ramsey(dataset.x, dataset.y, problem.geometry, int(fixed["delta_l"]))
    else:
        guess = guess_spectrum(
            dataset.x, dataset.y, problem.geometry, wavelength=fixed.get("wavelength", QUBIT_WAVELENGTH)
        )
    if "sigma_l" in guess:
        guess["gamma_per_order"] = 4.0 * problem.geometry.omega_r * guess["sigma_l"]
    return guess


def initial_guesses(problem: FitProblem) -> Guesses:
    """Guesses for every free parameter use that has no initial value."""
    guesses: Guesses = {}
    cache: Dict[int, Dict[str, float]] = {}
    for index, binding in enumerate(problem.bindings):
        for argument, name in sorted(binding.parameters.items()):
            parameter = problem.parameters[name]
            if not parameter.vary:
                continue
            position = problem.use_position(name, index)
            if parameter.shared and position > 0:
                continue
            if parameter.initial_for(0 if parameter.shared else position) is not None:
                continue
            if index not in cache:
                cache[index] = _dataset_guess(problem, index)
            if argument not in cache[index]:
                raise FitError(f"parameter {name} has no initial value and {argument} cannot be guessed from data")
            value = float(np.clip(cache[index][argument], parameter.lower, parameter.upper))
            _LOGGER.info("Initial guess for %s from dataset %d: %.6g", name, index, value)
            guesses[(name, index)] = value
    return guesses


def residual_function(problem: FitProblem, registry: ParameterRegistry) -> Callable[[np.ndarray], np.ndarray]:
    """Weighted residuals (y - model) sqrt(w), datasets concatenated in order."""
    sqrt_weights = [np.sqrt(dataset.weights) for dataset in problem.datasets]

    def residuals(vector: np.ndarray) -> np.ndarray:
        parts = []
        for index, dataset in enumerate(problem.datasets):
            arguments = problem.arguments(registry, vector, index)
            model = evaluate_model(dataset.kind, problem.geometry, dataset.x, arguments)
            parts.append((dataset.y - model) * sqrt_weights[index])
        return np.concatenate(parts)

    return residuals


def _jittered_starts(initial: np.ndarray, lower: np.ndarray, upper: np.ndarray, seed: int) -> List[np.ndarray]:
    rng = np.random.default_rng(derive_seed(seed, "multi_start"))
    starts = []
    for _ in range(FIT_MULTI_START_COUNT):
        scale = np.where(initial != 0, np.abs(initial), 1.0)
        span = np.where(np.isfinite(upper - lower), upper - lower, scale)
        scale = np.where(initial != 0, scale, span)
        start = initial + FIT_MULTI_START_JITTER * scale * rng.standard_normal(initial.size)
        starts.append(np.clip(start, lower, upper))
    return starts


def _better(candidate: MinimizerOutcome, best: Optional[MinimizerOutcome]) -> bool:
    if best is None:
        return True
    if candidate.converged != best.converged:
        return candidate.converged
    return candidate.chi2 < best.chi2


def _derived(problem: FitProblem, registry: ParameterRegistry, best: np.ndarray, errors: np.ndarray):
    """Group width per order for fitted sigma_l, and sigma_l for fitted gamma_per_order."""
    omega_r = problem.geometry.omega_r
    by_argument: Dict[str, set] = {"sigma_l": set(), "gamma_per_order": set()}
    for binding in problem.bindings:
        for argument, name in binding.parameters.items():
            if argument in by_argument:
                by_argument[argument].add(name)

    derived: Dict[str, Dict[str, float]] = {}
    for slot, label in enumerate(registry.labels):
        name = registry.parameters[slot].name
        if name in by_argument["sigma_l"]:
            gamma, gamma_err = 4.0 * omega_r * best[slot], 4.0 * omega_r * errors[slot]
            derived[label] = {
                "gamma_per_order_rad_s": float(gamma),
                "gamma_per_order_rad_s_err": float(gamma_err),
                "gamma_per_order_hz": to_hz(gamma),
                "gamma_per_order_hz_err": to_hz(gamma_err),
            }
        elif name in by_argument["gamma_per_order"]:
            derived[label] = {
                "sigma_l": float(best[slot] / (4.0 * omega_r)),
                "sigma_l_err": float(errors[slot] / (4.0 * omega_r)),
                "gamma_per_order_hz": to_hz(best[slot]),
                "gamma_per_order_hz_err": to_hz(errors[slot]),
            }
    return derived


def fit(
    problem: FitProblem, multi_start: bool = False, seed: int = 0, max_iterations: int = FIT_MAX_ITERATIONS
) -> FitResult:
    """Minimize weighted squared residuals of all datasets jointly.

    Numerical trouble (singular normal matrix, damping exhausted, iteration
    limit) comes back as a non-converged result with a message. Structural
    problems raise FitError.
    """
    registry = problem.build_registry(initial_guesses(problem))
    n_free = len(registry)
    n_points = problem.n_points
    if n_free == 0:
        raise FitError("no free parameters to fit")
    if n_points <= n_free:
        raise FitError(f"{n_points} data points cannot constrain {n_free} free parameters")

    residual_fn = residual_function(problem, registry)
    lower, upper = registry.get_bounds()
    initial = np.asarray(registry.initial, dtype=float)
    total_weight = sum(float(np.sum(dataset.weights)) for dataset in problem.datasets)
    chi2_floor = max(FIT_CHI2_FLOOR, total_weight * FIT_ROUNDOFF_RESIDUAL ** 2)

    _LOGGER.info(
        "Fitting %d free parameters to %d points in %d datasets", n_free, n_points, len(problem.datasets)
    )
    starts = [initial]
    if multi_start:
        starts += _jittered_starts(initial, lower, upper, seed)

    best: Optional[MinimizerOutcome] = None
    for number, start in enumerate(starts):
        outcome = levenberg_marquardt(residual_fn, start, lower, upper, chi2_floor, max_iterations, registry.labels)
        _LOGGER.debug(
            "Start %d: chi2=%.10g converged=%s (%s)", number, outcome.chi2, outcome.converged, outcome.message
        )
        if _better(outcome, best):
            best = outcome

    converged = best.converged
    message = best.message
    parameters = best.parameters
    dof = n_points - n_free
    chi2_reduced = best.chi2 / dof

    covariance = np.full((n_free, n_free), np.nan)
    jacobian = None
    if best.residuals.size:
        jacobian = forward_jacobian(residual_fn, parameters, best.residuals, upper)
    if jacobian is None:
        converged = False
        message = f"{message}; covariance unavailable"
    else:
        normal_matrix = jacobian.T @ jacobian
        if is_singular(normal_matrix):
            flat = [registry.labels[i] for i in np.flatnonzero(np.diag(normal_matrix) <= 0)]
            converged = False
            message = "singular normal matrix at the optimum" + (f"; no sensitivity to {flat}" if flat else "")
            covariance = np.linalg.pinv(normal_matrix)
        else:
            covariance = np.linalg.inv(normal_matrix)
        if not problem.has_errors:
            covariance = covariance * chi2_reduced
        covariance = 0.5 * (covariance + covariance.T)

    uncertainties = np.sqrt(np.clip(np.diag(covariance), 0.0, None))
    vector_residuals = []
    for index, dataset in enumerate(problem.datasets):
        arguments = problem.arguments(registry, parameters, index)
        vector_residuals.append(dataset.y - evaluate_model(dataset.kind, problem.geometry, dataset.x, arguments))

    result = FitResult(
        labels=list(registry.labels),
        best_fit={label: float(parameters[slot]) for slot, label in enumerate(registry.labels)},
        covariance=covariance,
        uncertainties={label: float(uncertainties[slot]) for slot, label in enumerate(registry.labels)},
        chi2=best.chi2,
        chi2_reduced=chi2_reduced,
        n_iterations=best.n_iterations,
        converged=converged,
        residuals=vector_residuals,
        n_points=n_points,
        n_free=n_free,
        message=message,
        covariance_scaled=not problem.has_errors,
        derived=_derived(problem, registry, parameters, uncertainties),
        iteration_log=best.iteration_log,
        starts_tried=len(starts),
    )
    if converged:
        _LOGGER.info(
            "Fit converged after %d iterations: chi2=%.6g reduced=%.4g", result.n_iterations, result.chi2, chi2_reduced
        )
        for label in result.labels:
            _LOGGER.info("  %s = %.8g +/- %.3g", label, result.best_fit[label], result.uncertainties[label])
    else:
        _LOGGER.warning("Fit did not converge: %s", message)
    return result


def fitted_arguments(problem: FitProblem, result: FitResult, dataset: int) -> Dict[str, Any]:
    """Model arguments of one dataset at the best fit."""
    binding = problem.bindings[dataset]
    arguments = dict(binding.fixed)
    for argument, name in binding.parameters.items():
        parameter = problem.parameters[name]
        label = name if parameter.shared else f"{name}[{dataset}]"
        if label in result.best_fit:
            arguments[argument] = result.best_fit[label]
            continue
        position = problem.use_position(name, dataset)
        value = parameter.initial_for(0 if parameter.shared else position)
        if value is None or not math.isfinite(value):
            raise FitError(f"fixed parameter {name} has no value")
        arguments[argument] = value
    return arguments


def fitted_curve(problem: FitProblem, result: FitResult, dataset: int, x) -> np.ndarray:
    """Model curve of one dataset at the best fit, evaluated on x."""
    kind = problem.datasets[dataset].kind
    return evaluate_model(kind, problem.geometry, x, fitted_arguments(problem, result, dataset))
