"""Integer-order Bessel functions of the first kind for rotorsim."""
import logging
import math

import numpy as np

from ..const import (
    BESSEL_ACCURACY_DIGITS,
    BESSEL_EXTRA_ORDERS,
    BESSEL_MILLER_SEED,
    BESSEL_RESCALE_THRESHOLD,
    LOGGER_NAME,
)
from ..exceptions import DomainError

_LOGGER = logging.getLogger(LOGGER_NAME)


def _start_order(n_max: int, x: float) -> int:
    """Even starting order for the downward recurrence."""
    reach = max(n_max, int(x))
    start = reach + BESSEL_EXTRA_ORDERS + int(math.sqrt(BESSEL_ACCURACY_DIGITS * max(reach, x, 1.0)))
    return 2 * ((start + 1) // 2)


def bessel_jn_sequence(n_max: int, x: float) -> np.ndarray:
    """Return [J_0(x), ..., J_n_max(x)] by Miller's downward recurrence.

    The unnormalized sequence is fixed by the completeness sum
    J_0^2 + 2 sum J_k^2 = 1, with the overall sign taken from
    J_0 + 2 sum J_2k = 1.
    """
    if n_max < 0:
        raise DomainError(f"n_max must be non-negative, got {n_max!r}")
    if not math.isfinite(x):
        raise DomainError(f"Bessel argument must be finite, got {x!r}")

    values = np.zeros(n_max + 1)
    if x == 0:
        values[0] = 1.0
        return values

    sign_flip = x < 0
    x = abs(x)
    start = _start_order(n_max, x)

    # Downward recurrence J_{k-1} = (2k/x) J_k - J_{k+1}
    raw = np.zeros(start + 2)
    raw[start] = BESSEL_MILLER_SEED
    for k in range(start, 0, -1):
        raw[k - 1] = (2.0 * k / x) * raw[k] - raw[k + 1]
        if abs(raw[k - 1]) > BESSEL_RESCALE_THRESHOLD:
            raw[k - 1:] /= BESSEL_RESCALE_THRESHOLD

    norm = math.sqrt(raw[0] ** 2 + 2.0 * float(np.sum(raw[1:] ** 2)))
    even_sum = raw[0] + 2.0 * float(np.sum(raw[2::2]))
    if even_sum < 0:
        norm = -norm

    values[:] = raw[: n_max + 1] / norm
    if sign_flip:
        values[1::2] *= -1.0
    return values


def bessel_jn(n: int, x: float) -> float:
    """Return J_n(x) for any integer order n."""
    order = abs(int(n))
    value = float(bessel_jn_sequence(order, x)[order])
    if n < 0 and order % 2 == 1:
        value = -value
    return value


def completeness_residual(x: float, n_max: int) -> float:
    """Return |J_0^2 + 2 sum_{k=1..n_max} J_k^2 - 1| for the evaluated sequence."""
    values = bessel_jn_sequence(n_max, x)
    return abs(values[0] ** 2 + 2.0 * float(np.sum(values[1:] ** 2)) - 1.0)
