"""
CSV output shared by every subcommand: a header row, then floats with ten
significant digits and empty cells for missing values.
"""
from contextlib import contextmanager
from dataclasses import astuple
from pathlib import Path
from typing import Any, Iterable, Iterator, Optional, Sequence, TextIO
import csv
import sys

from ..core.interfaces.base import ExperimentRow

FLOAT_FORMAT = "%.10g"


def format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return FLOAT_FORMAT % value
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def write_csv(columns: Sequence[str], rows: Iterable[Sequence[Any]], out: TextIO) -> int:
    """Writes the header and rows; returns the number of data rows"""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    count = 0
    for row in rows:
        writer.writerow([format_cell(value) for value in row])
        count += 1
    return count


def write_experiment_rows(rows: Iterable[ExperimentRow], out: TextIO) -> int:
    return write_csv(ExperimentRow.columns(), (astuple(row) for row in rows), out)


@contextmanager
def open_output(path: Optional[str]) -> Iterator[TextIO]:
    """The named file, or stdout for None and '-'"""
    if path is None or path == "-":
        yield sys.stdout
        return
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        yield handle


@contextmanager
def open_input(path: str) -> Iterator[TextIO]:
    """The named file, or stdin for '-'"""
    if path == "-":
        yield sys.stdin
        return
    with Path(path).open("r", encoding="utf-8") as handle:
        yield handle
