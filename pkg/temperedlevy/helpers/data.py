"""Tabular data utilities."""
from typing import Iterator, List, Sequence, Tuple

import numpy as np
import pandas as pd

from ..exceptions import ParsingException

FLOAT_FORMAT = "%.17g"


def blocks(n_items: int, size: int) -> Iterator[Tuple[int, int]]:
    """
    Split a range of items into consecutive fixed-size blocks.

    Args:
        n_items (int): number of items.
        size (int): block size, the last block may be shorter.

    Returns:
        Iterator[Tuple[int, int]]: (start, stop) pairs.
    """
    for start in range(0, n_items, size):
        yield start, min(start + size, n_items)


def parse_range(text: str) -> np.ndarray:
    """
    Parse a "start:stop:step" range, stop included when it falls on the grid.

    Args:
        text (str): range specification, a single number is accepted too.

    Returns:
        np.ndarray: the values.
    """
    try:
        fields = [float(field) for field in text.split(":")]
    except ValueError:
        raise ParsingException(f"Range [{text}] is not numeric.")
    if len(fields) == 1:
        return np.array(fields)
    if len(fields) != 3 or fields[2] <= 0 or fields[1] < fields[0]:
        raise ParsingException(f"Range [{text}] is not of the form start:stop:step.")
    start, stop, step = fields
    n_steps = int(np.floor((stop - start) / step + 1e-9))
    return start + step * np.arange(n_steps + 1)


def write_table(data: pd.DataFrame, filepath: str, units: Sequence[str]) -> None:
    """
    Write a table as CSV with a two-line header (names, then units).

    Args:
        data (pd.DataFrame): table to write.
        filepath (str): destination path.
        units (Sequence[str]): one unit label per column.
    """
    if len(units) != data.shape[1]:
        raise ValueError(f"Expected {data.shape[1]} units, got {len(units)}.")
    with open(filepath, "w", newline="") as fp:
        fp.write(",".join(str(column) for column in data.columns) + "\n")
        fp.write(",".join(units) + "\n")
        data.to_csv(fp, header=False, index=False, float_format=FLOAT_FORMAT)


def _is_numeric_row(line: str) -> bool:
    try:
        [float(field) for field in line.strip().split(",")]
    except ValueError:
        return False
    return True


def read_table(filepath: str) -> Tuple[pd.DataFrame, List[str]]:
    """
    Read a CSV table written by write_table.

    A single header line (no units) is accepted as well.

    Args:
        filepath (str): path to the CSV file.

    Returns:
        Tuple[pd.DataFrame, List[str]]: numeric table and the unit labels.

    Raises:
        ParsingException: on missing header or non-numeric rows.
    """
    with open(filepath) as fp:
        header_lines = [fp.readline(), fp.readline()]
    if not header_lines[0].strip():
        raise ParsingException("Missing header.", line_number=1)
    names = [name.strip() for name in header_lines[0].strip().split(",")]
    if header_lines[1].strip() and not _is_numeric_row(header_lines[1]):
        units = [unit.strip() for unit in header_lines[1].strip().split(",")]
        n_header = 2
    else:
        units = ["" for _ in names]
        n_header = 1
    data = pd.read_csv(
        filepath, header=None, names=names, skiprows=n_header, dtype=str
    )
    numeric = data.apply(pd.to_numeric, errors="coerce")
    invalid = numeric.isna().any(axis=1).to_numpy()
    if invalid.any():
        row = int(np.argmax(invalid))
        raise ParsingException(
            f"Non-numeric row {list(data.iloc[row])}.",
            line_number=row + n_header + 1,
        )
    return numeric.astype(float), units
