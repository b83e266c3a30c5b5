"""Individual rotational transition lines."""
import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional

from ..const import LOGGER_NAME
from .distribution import AngularDistribution
from .geometry import RotorGeometry

_LOGGER = logging.getLogger(LOGGER_NAME)


@dataclass(frozen=True)
class TransitionLine:
    """One |l> -> |l + delta_l> line relative to the carrier."""

    l: int
    delta_l: int
    frequency_hz: float
    group_offset_hz: float
    height: float


def transition_lines(
    geometry: RotorGeometry,
    dist: AngularDistribution,
    delta_ls: Iterable[int],
    f_rot: Optional[float] = None,
) -> List[TransitionLine]:
    """List every populated line of the requested sideband orders.

    Line frequencies are omega_r ((l + dl)^2 - l^2) / 2 pi. The group offset is
    measured from dl * f_rot, or from the line of l0 when f_rot is not given.
    """
    lines = []
    for delta_l in delta_ls:
        delta_l = int(delta_l)
        if f_rot is None:
            centre = geometry.omega_r * (2.0 * dist.l0 * delta_l + delta_l * delta_l) / (2.0 * math.pi)
        else:
            centre = delta_l * f_rot

        for l, population in zip(dist.ls, dist.probabilities):
            l = int(l)
            frequency = geometry.omega_r * ((l + delta_l) ** 2 - l * l) / (2.0 * math.pi)
            lines.append(
                TransitionLine(
                    l=l,
                    delta_l=delta_l,
                    frequency_hz=frequency,
                    group_offset_hz=frequency - centre,
                    height=float(population),
                )
            )

    lines.sort(key=lambda line: (line.frequency_hz, line.delta_l, line.l))
    _LOGGER.debug("Built %d transition lines", len(lines))
    return lines
