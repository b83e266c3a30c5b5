"""Standalone SVG line plots."""
import logging
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Sequence, Tuple, Union

import numpy as np

from ..const import LOGGER_NAME
from ..exceptions import DataError

_LOGGER = logging.getLogger(LOGGER_NAME)

SVG_NAMESPACE = "http://www.w3.org/2000/svg"
WIDTH = 720
HEIGHT = 440
MARGIN_LEFT = 70
MARGIN_RIGHT = 150
MARGIN_TOP = 40
MARGIN_BOTTOM = 60
TICKS = 5
COLOURS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"]


@dataclass
class Series:
    """One polyline."""

    label: str
    x: np.ndarray
    y: np.ndarray
    dashed: bool = False


@dataclass
class Plot:
    """Axes, series and free text annotations at data x positions."""

    title: str
    x_label: str
    y_label: str
    series: List[Series] = field(default_factory=list)
    annotations: List[Tuple[float, str]] = field(default_factory=list)

    def add(self, label: str, x, y, dashed: bool = False) -> None:
        """Append a series."""
        self.series.append(Series(label, np.asarray(x, dtype=float), np.asarray(y, dtype=float), dashed))


def _limits(values: Sequence[np.ndarray]) -> Tuple[float, float]:
    finite = [v[np.isfinite(v)] for v in values if v.size]
    finite = [v for v in finite if v.size]
    if not finite:
        return 0.0, 1.0
    low = min(float(np.min(v)) for v in finite)
    high = max(float(np.max(v)) for v in finite)
    if high == low:
        pad = abs(low) * 0.05 or 0.5
        return low - pad, high + pad
    return low, high


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def render(plot: Plot) -> ET.Element:
    """Build the SVG element tree of a plot."""
    x_low, x_high = _limits([s.x for s in plot.series])
    y_low, y_high = _limits([s.y for s in plot.series])
    y_low, y_high = min(y_low, 0.0), max(y_high, 1.0)
    inner_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    inner_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def sx(value):
        return MARGIN_LEFT + (value - x_low) / (x_high - x_low) * inner_w

    def sy(value):
        return MARGIN_TOP + (y_high - value) / (y_high - y_low) * inner_h

    root = ET.Element(
        "svg",
        {
            "xmlns": SVG_NAMESPACE,
            "width": str(WIDTH),
            "height": str(HEIGHT),
            "viewBox": f"0 0 {WIDTH} {HEIGHT}",
            "font-family": "sans-serif",
            "font-size": "12",
        },
    )
    ET.SubElement(root, "title").text = plot.title
    ET.SubElement(root, "text", {"x": str(WIDTH // 2), "y": "22", "text-anchor": "middle"}).text = plot.title

    axes = ET.SubElement(root, "g", {"class": "axes", "stroke": "black", "fill": "none"})
    ET.SubElement(
        axes, "rect", {"x": str(MARGIN_LEFT), "y": str(MARGIN_TOP), "width": str(inner_w), "height": str(inner_h)}
    )
    labels = ET.SubElement(root, "g", {"class": "ticks"})
    for tick in np.linspace(x_low, x_high, TICKS):
        ET.SubElement(
            labels, "text", {"x": _fmt(sx(tick)), "y": str(HEIGHT - MARGIN_BOTTOM + 18), "text-anchor": "middle"}
        ).text = f"{tick:.4g}"
    for tick in np.linspace(y_low, y_high, TICKS):
        ET.SubElement(
            labels, "text", {"x": str(MARGIN_LEFT - 8), "y": _fmt(sy(tick) + 4), "text-anchor": "end"}
        ).text = f"{tick:.3g}"
    ET.SubElement(
        root, "text", {"x": str(MARGIN_LEFT + inner_w // 2), "y": str(HEIGHT - 15), "text-anchor": "middle"}
    ).text = plot.x_label
    ET.SubElement(
        root,
        "text",
        {
            "x": "18",
            "y": str(MARGIN_TOP + inner_h // 2),
            "text-anchor": "middle",
            "transform": f"rotate(-90 18 {MARGIN_TOP + inner_h // 2})",
        },
    ).text = plot.y_label

    for index, series in enumerate(plot.series):
        colour = COLOURS[index % len(COLOURS)]
        keep = np.isfinite(series.x) & np.isfinite(series.y)
        points = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in zip(series.x[keep], series.y[keep]))
        attributes = {"points": points, "fill": "none", "stroke": colour, "stroke-width": "1.5"}
        if series.dashed:
            attributes["stroke-dasharray"] = "5,3"
        ET.SubElement(root, "polyline", attributes).set("data-label", series.label)
        ET.SubElement(
            root,
            "text",
            {"x": str(WIDTH - MARGIN_RIGHT + 10), "y": str(MARGIN_TOP + 16 * (index + 1)), "fill": colour},
        ).text = series.label

    notes = ET.SubElement(root, "g", {"class": "annotations"})
    for x, text in plot.annotations:
        if x_low <= x <= x_high:
            ET.SubElement(
                notes, "text", {"x": _fmt(sx(x)), "y": str(MARGIN_TOP - 4), "text-anchor": "middle"}
            ).text = text
    return root


def write_svg(plot: Plot, path: Union[str, Path]) -> Path:
    """Render a plot to an SVG file."""
    path = Path(path)
    tree = ET.ElementTree(render(plot))
    try:
        tree.write(path, encoding="utf-8", xml_declaration=True)
    except OSError as err:
        raise DataError(f"cannot write: {err.strerror or err}", path=str(path)) from err
    _LOGGER.debug("Wrote plot with %d series to %s", len(plot.series), path)
    return path
