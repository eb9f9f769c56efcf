"""CSV, JSON and sample-file artifacts written by the CLI."""

import csv
import json
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

import numpy as np

from .config.constants import Constants
from .sector import OccupationVector, OutcomeDistribution, check_occupation

Cell = str | int | float


def format_float(value: float) -> str:
    """Format a float with 17 significant digits so it round-trips exactly."""
    return format(float(value), Constants.FLOAT_FORMAT)


def format_occupation(occupation: Sequence[int]) -> str:
    return ",".join(str(int(c)) for c in occupation)


def parse_occupation(text: str) -> OccupationVector:
    """Parse a comma-separated occupation vector such as ``1,1``.

    Raises:
        ValueError: If an entry is not a nonnegative integer.
    """
    parts = [part.strip() for part in text.split(",")]
    try:
        counts = [int(part) for part in parts]
    except ValueError as e:
        raise ValueError(f"Invalid occupation vector '{text}': {e}") from e
    return check_occupation(counts)


def parse_float_list(text: str) -> list[float]:
    """Parse a comma-separated list of floats; empty entries are skipped."""
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise ValueError(f"Invalid number list '{text}': {e}") from e


def matrix_to_json(a: np.ndarray) -> list[list[list[float]]]:
    """Nested rows of ``[re, im]`` pairs."""
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(a, dtype=complex)]


def matrix_from_json(data: Any) -> np.ndarray:
    """Inverse of matrix_to_json; plain real entries are accepted too.

    Raises:
        ValueError: If the data is not a rectangular nested list of numbers or pairs.
    """
    if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
        raise ValueError("Matrix must be a non-empty list of rows")
    width = len(data[0])
    rows = []
    for row in data:
        if len(row) != width:
            raise ValueError("Matrix rows must all have the same length")
        values = []
        for entry in row:
            if isinstance(entry, list) and len(entry) == 2:
                values.append(complex(float(entry[0]), float(entry[1])))
            elif isinstance(entry, (int, float)) and not isinstance(entry, bool):
                values.append(complex(float(entry)))
            else:
                raise ValueError(f"Matrix entry must be a number or an [re, im] pair, got {entry}")
        rows.append(values)
    return np.array(rows, dtype=complex)


def load_matrix_json(path: Path) -> np.ndarray:
    """Read a matrix written as nested ``[re, im]`` pairs.

    Raises:
        FileNotFoundError: If the file doesn't exist.
        ValueError: If the file is not valid JSON or not a matrix.
    """
    if not path.exists():
        raise FileNotFoundError(f"Matrix file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ValueError(f"Invalid JSON in {path}: {e}") from e
    return matrix_from_json(data)


def _cell(value: Cell) -> str:
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Cell]]) -> int:
    """Write a UTF-8 CSV with a header row and return the number of data rows.

    Floats are written with 17 significant digits; lines end in ``\\n``.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
            count += 1
    return count


def write_json(path: Path, data: Any) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")


def write_table(
    path: Path, header: Sequence[str], rows: Sequence[Sequence[Cell]], as_json: bool
) -> int:
    """Write rows as CSV, or as a JSON list of objects keyed by the header."""
    if as_json:
        write_json(path, [dict(zip(header, row)) for row in rows])
        return len(rows)
    return write_csv(path, header, rows)


def distribution_rows(dist: OutcomeDistribution) -> list[tuple[str, float]]:
    """(occupation, probability) rows in basis order."""
    return [(format_occupation(s), float(p)) for s, p in zip(dist.basis.states, dist.probs)]


def write_samples(path: Path, samples: Iterable[Sequence[int]]) -> int:
    """Write one comma-separated occupation tuple per line."""
    lines = [format_occupation(s) for s in samples]
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return len(lines)
