"""Trace CSV files."""
import csv
import logging
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np

from ..const import (
    COLUMN_DETUNING,
    COLUMN_EXCITATION,
    COLUMN_EXCITATION_ERR,
    COLUMN_TIME,
    CSV_SIGNIFICANT_DIGITS,
    KIND_SPECTRUM,
    LOGGER_NAME,
)
from ..exceptions import DataError
from ..utils import format_significant, safe_float

_LOGGER = logging.getLogger(LOGGER_NAME)

PathLike = Union[str, Path]


def x_column(kind: str) -> str:
    """First column of a trace of this kind."""
    return COLUMN_DETUNING if kind == KIND_SPECTRUM else COLUMN_TIME


def trace_header(kind: str, with_errors: bool = False) -> List[str]:
    """Header row of a trace file."""
    header = [x_column(kind), COLUMN_EXCITATION]
    if with_errors:
        header.append(COLUMN_EXCITATION_ERR)
    return header


def write_table(path: PathLike, header: List[str], columns: List[np.ndarray]) -> Path:
    """Write equal-length columns at fixed significant digits."""
    path = Path(path)
    try:
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            for row in zip(*columns):
                writer.writerow([format_significant(value, CSV_SIGNIFICANT_DIGITS) for value in row])
    except OSError as err:
        raise DataError(f"cannot write: {err.strerror or err}", path=str(path)) from err
    _LOGGER.debug("Wrote %s", path)
    return path


def write_trace(path: PathLike, kind: str, x, y, y_err=None) -> Path:
    """Write a trace; spectrum x is given in Hz."""
    columns = [np.asarray(x, dtype=float), np.asarray(y, dtype=float)]
    if y_err is not None:
        columns.append(np.asarray(y_err, dtype=float))
    return write_table(path, trace_header(kind, y_err is not None), columns)


def read_trace(path: PathLike, kind: str) -> Tuple[np.ndarray, np.ndarray, Optional[np.ndarray]]:
    """Read a trace written by write_trace or by hand; spectrum x comes back in Hz."""
    path = Path(path)
    expected = trace_header(kind)
    try:
        with path.open(newline="", encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
    except OSError as err:
        raise DataError(f"cannot read: {err.strerror or err}", path=str(path)) from err
    except (UnicodeDecodeError, csv.Error) as err:
        raise DataError(f"not a CSV trace: {err}", path=str(path)) from err

    if not rows:
        raise DataError("missing header row", path=str(path), line=1)
    header = [cell.strip() for cell in rows[0]]
    if header not in (expected, expected + [COLUMN_EXCITATION_ERR]):
        raise DataError(
            f"expected header {','.join(expected)}[,{COLUMN_EXCITATION_ERR}], got {','.join(header)}",
            path=str(path),
            line=1,
        )

    values = []
    for line, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise DataError(f"expected {len(header)} fields, got {len(row)}", path=str(path), line=line)
        numbers = [safe_float(cell) for cell in row]
        if any(number is None or not np.isfinite(number) for number in numbers):
            raise DataError(f"non-numeric value in {row}", path=str(path), line=line)
        values.append(numbers)

    if not values:
        raise DataError("no data rows", path=str(path))
    table = np.asarray(values, dtype=float)
    y_err = table[:, 2] if table.shape[1] == 3 else None
    _LOGGER.debug("Read %d points from %s", table.shape[0], path)
    return table[:, 0], table[:, 1], y_err
