"""Least-squares estimation of rotor parameters from measured traces."""
from .dataset import Dataset, binomial_error, synthetic_dataset
from .fit import fit, fitted_arguments, fitted_curve, initial_guesses, residual_function
from .guess import guess_rabi, guess_ramsey, guess_spectrum
from .levenberg_marquardt import MinimizerOutcome, levenberg_marquardt
from .models import MODEL_ARGUMENTS, evaluate_model, rabi_model, ramsey_model, spectrum_model
from .problem import FitProblem, ModelBinding, Parameter, ParameterRegistry
from .result import FitResult

__all__ = [
    "MODEL_ARGUMENTS",
    "Dataset",
    "FitProblem",
    "FitResult",
    "MinimizerOutcome",
    "ModelBinding",
    "Parameter",
    "ParameterRegistry",
    "binomial_error",
    "evaluate_model",
    "fit",
    "fitted_arguments",
    "fitted_curve",
    "guess_rabi",
    "guess_ramsey",
    "guess_spectrum",
    "initial_guesses",
    "levenberg_marquardt",
    "rabi_model",
    "ramsey_model",
    "residual_function",
    "spectrum_model",
    "synthetic_dataset",
]
