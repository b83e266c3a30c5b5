"""Fit problem definition and parameter bookkeeping."""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..const import DEFAULT_BOUNDS, LOGGER_NAME
from ..exceptions import FitError
from ..physics.geometry import RotorGeometry
from .dataset import Dataset
from .models import MODEL_ARGUMENTS, WIDTH_ARGUMENTS

_LOGGER = logging.getLogger(LOGGER_NAME)

InitialValue = Union[None, float, Sequence[Optional[float]]]


@dataclass
class Parameter:
    """Fit parameter, shared across datasets or one value per dataset.

    quantity selects the default bounds and defaults to the name.
    initial may be None to request a data-driven guess.
    """

    name: str
    initial: InitialValue = None
    lower: Optional[float] = None
    upper: Optional[float] = None
    shared: bool = True
    vary: bool = True
    quantity: Optional[str] = None

    def __post_init__(self):
        """Fill default bounds from the quantity."""
        if self.quantity is None:
            self.quantity = self.name
        default_lower, default_upper = DEFAULT_BOUNDS.get(self.quantity, (-math.inf, math.inf))
        if self.lower is None:
            self.lower = default_lower
        if self.upper is None:
            self.upper = default_upper
        if not self.lower <= self.upper:
            raise FitError(f"parameter {self.name}: lower bound {self.lower!r} exceeds upper {self.upper!r}")
        if self.shared and isinstance(self.initial, (list, tuple, np.ndarray)):
            raise FitError(f"parameter {self.name}: per-dataset initial values need shared = False")

    def initial_for(self, position: int) -> Optional[float]:
        """Initial value for the position-th dataset that uses this parameter."""
        if isinstance(self.initial, (list, tuple, np.ndarray)):
            if position >= len(self.initial):
                raise FitError(f"parameter {self.name}: no initial value for dataset use {position}")
            value = self.initial[position]
        else:
            value = self.initial
        return None if value is None else float(value)

    def check_initial(self, value: float) -> None:
        """Bounds must contain the initial value."""
        if not (math.isfinite(value) and self.lower <= value <= self.upper):
            raise FitError(
                f"parameter {self.name}: initial value {value!r} outside [{self.lower!r}, {self.upper!r}]"
            )


@dataclass
class ModelBinding:
    """Which model a dataset uses and where each model argument comes from."""

    kind: str
    parameters: Dict[str, str] = field(default_factory=dict)  # argument -> parameter name
    fixed: Dict[str, Any] = field(default_factory=dict)  # argument -> value

    def validate(self, known_parameters: Sequence[str]) -> None:
        """Every model argument bound exactly once."""
        if self.kind not in MODEL_ARGUMENTS:
            raise FitError(f"no model for dataset kind {self.kind!r}")
        required, optional, fixed_only = MODEL_ARGUMENTS[self.kind]
        allowed = set(required) | set(optional) | set(WIDTH_ARGUMENTS)

        both = set(self.parameters) & set(self.fixed)
        if both:
            raise FitError(f"{self.kind} model: arguments bound twice: {sorted(both)}")
        unknown = (set(self.parameters) | set(self.fixed)) - allowed
        if unknown:
            raise FitError(f"{self.kind} model: unknown arguments {sorted(unknown)}")

        bound = set(self.parameters) | set(self.fixed)
        missing = [argument for argument in required if argument not in bound]
        if missing:
            raise FitError(f"{self.kind} model: unbound arguments {missing}")
        widths = [argument for argument in WIDTH_ARGUMENTS if argument in bound]
        if len(widths) != 1:
            raise FitError(f"{self.kind} model: bind exactly one of {list(WIDTH_ARGUMENTS)}, got {widths}")

        frozen = [argument for argument in fixed_only if argument in self.parameters]
        if frozen:
            raise FitError(f"{self.kind} model: arguments {frozen} cannot be fitted")
        for argument, name in self.parameters.items():
            if name not in known_parameters:
                raise FitError(f"{self.kind} model: argument {argument} uses undeclared parameter {name!r}")


class ParameterRegistry:
    """Registry mapping (parameter, dataset) pairs onto fit vector slots."""

    def __init__(self):
        """Initialize the parameter registry."""
        self.slots = {}  # Maps (parameter name, dataset index or None) -> slot
        self.labels = []  # Maps slot -> label
        self.parameters = {}  # Maps slot -> Parameter
        self.initial = []  # Maps slot -> initial value
        self.uses = {}  # Maps parameter name -> number of datasets seen

    def register(self, parameter: Parameter, dataset: int, initial: Optional[float]) -> Optional[int]:
        """Register a parameter use by a dataset and return its slot."""
        if not parameter.vary:
            return None

        key = (parameter.name, None if parameter.shared else dataset)
        if key in self.slots:
            return self.slots[key]

        position = self.uses.get(parameter.name, 0)
        self.uses[parameter.name] = position + 1
        if initial is None:
            initial = parameter.initial_for(0 if parameter.shared else position)
        if initial is None:
            raise FitError(f"parameter {parameter.name} has no initial value")
        parameter.check_initial(initial)

        slot = len(self.labels)
        self.slots[key] = slot
        self.labels.append(parameter.name if parameter.shared else f"{parameter.name}[{dataset}]")
        self.parameters[slot] = parameter
        self.initial.append(float(initial))
        _LOGGER.debug("Registered fit parameter %s in slot %d", self.labels[slot], slot)
        return slot

    def get_slot(self, name: str, dataset: int) -> Optional[int]:
        """Slot of a parameter as seen by a dataset."""
        if (name, None) in self.slots:
            return self.slots[(name, None)]
        return self.slots.get((name, dataset))

    def get_bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        """Lower and upper bounds of every slot."""
        lower = np.array([self.parameters[slot].lower for slot in range(len(self.labels))], dtype=float)
        upper = np.array([self.parameters[slot].upper for slot in range(len(self.labels))], dtype=float)
        return lower, upper

    def __len__(self) -> int:
        return len(self.labels)


class FitProblem:
    """Datasets, parameters and model bindings fitted together."""

    def __init__(
        self,
        datasets: List[Dataset],
        parameters: List[Parameter],
        bindings: List[ModelBinding],
        geometry: RotorGeometry,
    ):
        """Initialize and validate the problem structure."""
        if not datasets:
            raise FitError("a fit needs at least one dataset")
        if len(bindings) != len(datasets):
            raise FitError(f"got {len(bindings)} model bindings for {len(datasets)} datasets")

        names = [parameter.name for parameter in parameters]
        duplicates = sorted({name for name in names if names.count(name) > 1})
        if duplicates:
            raise FitError(f"parameters declared twice: {duplicates}")

        for index, (dataset, binding) in enumerate(zip(datasets, bindings)):
            if dataset.kind != binding.kind:
                raise FitError(f"dataset {index} is {dataset.kind!r} but bound to a {binding.kind!r} model")
            binding.validate(names)

        self.datasets = datasets
        self.parameters = {parameter.name: parameter for parameter in parameters}
        self.bindings = bindings
        self.geometry = geometry

    @property
    def n_points(self) -> int:
        """Total number of data points."""
        return sum(len(dataset) for dataset in self.datasets)

    @property
    def has_errors(self) -> bool:
        """True when every dataset carries standard errors."""
        return all(dataset.has_errors for dataset in self.datasets)

    def build_registry(self, guesses: Optional[Dict[Tuple[str, int], float]] = None) -> ParameterRegistry:
        """Assign fit vector slots in dataset order."""
        guesses = guesses or {}
        registry = ParameterRegistry()
        for index, binding in enumerate(self.bindings):
            for argument in sorted(binding.parameters):
                parameter = self.parameters[binding.parameters[argument]]
                registry.register(parameter, index, guesses.get((parameter.name, index)))
        return registry

    def arguments(self, registry: ParameterRegistry, vector: np.ndarray, dataset: int) -> Dict[str, Any]:
        """Model arguments of one dataset for a fit vector."""
        binding = self.bindings[dataset]
        arguments = dict(binding.fixed)
        for argument, name in binding.parameters.items():
            parameter = self.parameters[name]
            slot = registry.get_slot(name, dataset)
            if slot is None:
                position = self.use_position(name, dataset)
                value = parameter.initial_for(0 if parameter.shared else position)
                if value is None:
                    raise FitError(f"fixed parameter {name} has no value")
                arguments[argument] = value
            else:
                arguments[argument] = float(vector[slot])
        return arguments

    def use_position(self, name: str, dataset: int) -> int:
        """How many earlier datasets use the parameter."""
        return sum(1 for binding in self.bindings[:dataset] if name in binding.parameters.values())

    def uses_parameter(self, name: str) -> List[int]:
        """Datasets bound to a parameter."""
        return [index for index, binding in enumerate(self.bindings) if name in binding.parameters.values()]
