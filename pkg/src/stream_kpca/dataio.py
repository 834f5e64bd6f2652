"""CSV ingestion and emission.

Readers stream one row at a time so training never holds the whole file;
writers use 17 significant digits so values round-trip exactly through
decimal text.
"""

from __future__ import annotations

from typing import Iterator

import numpy as np

from .errors import ContractViolationError
from .numerics import as_matrix

SIG_DIGITS = 17


def write_matrix_csv(path, a, header: bool = False) -> None:
    """Write one row per point; optional header names columns c0..c{d-1}."""
    arr = as_matrix(a, "output matrix")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header:
            fh.write(",".join(f"c{j}" for j in range(arr.shape[1])) + "\n")
        for row in arr:
            fh.write(",".join(format(v, f".{SIG_DIGITS}g") for v in row) + "\n")


def iter_csv_rows(
    path, *, drop_first_col: bool = False, header: bool = False
) -> Iterator[np.ndarray]:
    """Yield each data row as a float vector, validating as it goes.

    Malformed rows (non-numeric fields, ragged width, blank interior lines)
    raise ContractViolationError naming the offending line number.
    """
    width = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if header and lineno == 1:
                continue
            text = line.strip()
            if not text:
                raise ContractViolationError(f"{path}: line {lineno}: blank line")
            fields = text.split(",")
            if drop_first_col:
                fields = fields[1:]
            if not fields:
                raise ContractViolationError(
                    f"{path}: line {lineno}: no numeric columns left"
                )
            try:
                row = np.array([float(f) for f in fields])
            except ValueError:
                raise ContractViolationError(
                    f"{path}: line {lineno}: non-numeric field"
                ) from None
            if not np.all(np.isfinite(row)):
                raise ContractViolationError(
                    f"{path}: line {lineno}: non-finite value"
                )
            if width is None:
                width = row.size
            elif row.size != width:
                raise ContractViolationError(
                    f"{path}: line {lineno}: expected {width} columns, got {row.size}"
                )
            yield row


def count_csv_rows(path, header: bool = False) -> int:
    """Count data rows in O(1) memory (used when a bound needs n up front)."""
    count = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if header and lineno == 1:
                continue
            count += 1
    return count


def read_matrix_csv(path, *, drop_first_col: bool = False, header: bool = False) -> np.ndarray:
    rows = list(iter_csv_rows(path, drop_first_col=drop_first_col, header=header))
    if not rows:
        raise ContractViolationError(f"{path}: no data rows")
    return np.vstack(rows)
