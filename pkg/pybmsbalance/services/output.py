"""Deterministic CSV and plain-text result files."""

import csv
import logging
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

import numpy as np

from ..config import CSV_FLOAT_FORMAT

logger = logging.getLogger(__name__)


def format_cell(value: Any) -> str:
    """Render one value; floats always use 17 significant digits."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), CSV_FLOAT_FORMAT)
    return str(value)


def write_csv(
    path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]
) -> Path:
    """Write a header row and data rows with ``,`` separators and ``\\n`` line ends."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(value) for value in row])
            count += 1
    logger.info("Wrote %d rows to %s", count, path)
    return path


def write_text(path: Path, lines: Iterable[str]) -> Path:
    """Write plain-text lines terminated by ``\\n``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")
    logger.info("Wrote %s", path)
    return path


def key_value_lines(values: dict[str, Any]) -> list[str]:
    """``key: value`` lines in insertion order."""
    return [f"{key}: {format_cell(value)}" for key, value in values.items()]
