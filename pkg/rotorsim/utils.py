"""Utility functions for rotorsim."""
import hashlib
import logging
import math
import os
from typing import Any, Optional

import numpy as np

from .const import ENV_THREADS, LOGGER_NAME

_LOGGER = logging.getLogger(LOGGER_NAME)


def to_angular(frequency_hz: float) -> float:
    """Convert a frequency in Hz to an angular frequency in rad/s."""
    return 2.0 * math.pi * frequency_hz


def to_hz(angular: float) -> float:
    """Convert an angular frequency in rad/s to Hz."""
    return angular / (2.0 * math.pi)


def safe_float(value: Any) -> Optional[float]:
    """Safely convert a value to float."""
    if value is None:
        return None

    try:
        return float(value)
    except (ValueError, TypeError):
        return None


def is_strictly_increasing(values) -> bool:
    """Check that a 1D sequence is strictly increasing."""
    array = np.asarray(values, dtype=float)
    if array.size < 2:
        return True
    return bool(np.all(np.diff(array) > 0))


def derive_seed(seed: int, *components: Any) -> int:
    """Derive a subsystem seed from the run seed by fixed hashing.

    The same (seed, components) always yields the same 63-bit integer.
    """
    combined = ":".join(str(c) for c in (seed,) + components)
    digest = hashlib.sha256(combined.encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def thread_count(requested: Optional[int] = None) -> int:
    """Resolve the worker count, capped by the ROTORSIM_THREADS variable."""
    cap = None
    raw = os.environ.get(ENV_THREADS)
    if raw:
        try:
            cap = max(1, int(raw))
        except ValueError:
            _LOGGER.warning("Ignoring non-integer %s=%r", ENV_THREADS, raw)

    count = requested if requested is not None else (os.cpu_count() or 1)
    if cap is not None:
        count = min(count, cap)
    return max(1, count)


def format_significant(value: float, digits: int) -> str:
    """Format a float with a fixed number of significant digits."""
    return f"{float(value):.{digits}g}"
