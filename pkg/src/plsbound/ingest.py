"""CSV loading and the centering / scaling / censoring preprocessing pipeline."""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import (
    DegenerateColumnError,
    EmptyTableError,
    MissingColumnError,
    MissingFileError,
)
from .model import Dataset


@dataclass(frozen=True)
class RawTable:
    header: list[str]
    rows: NDArray[np.float64]
    response_column: str
    dropped: int = 0

    @property
    def feature_names(self) -> list[str]:
        return [h for h in self.header if h != self.response_column]

    def split(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        j = self.header.index(self.response_column)
        keep = [i for i in range(len(self.header)) if i != j]
        return self.rows[:, keep], self.rows[:, j]


def _parse_float(cell: str) -> float:
    v = float(cell)
    if not math.isfinite(v):
        raise ValueError(cell)
    return v


def read_numeric_csv(path: str | os.PathLike) -> tuple[list[str], NDArray[np.float64], int]:
    """Header plus all fully numeric rows; returns ``(header, rows, dropped)``."""
    if not os.path.isfile(path):
        raise MissingFileError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise EmptyTableError(f"{path}: file is empty") from None
        rows, dropped = [], 0
        for rec in reader:
            if not rec or all(not c.strip() for c in rec):
                continue
            if len(rec) != len(header):
                dropped += 1
                continue
            try:
                rows.append([_parse_float(c) for c in rec])
            except ValueError:
                dropped += 1
    if not rows:
        raise EmptyTableError(f"{path}: no numeric rows")
    return header, np.asarray(rows, dtype=np.float64), dropped


def load_csv(path: str | os.PathLike, response_column: str) -> RawTable:
    """Load a comma-separated numeric table with a header row.

    Rows with the wrong width or an unparseable cell are dropped and counted.
    """
    header, rows, dropped = read_numeric_csv(path)
    if response_column not in header:
        raise MissingColumnError(f"{path}: response column {response_column!r} not in header {header}")
    if len(header) < 2:
        raise EmptyTableError(f"{path}: need at least one feature column besides the response")
    return RawTable(header, rows, response_column, dropped)


def load_xy(x_path: str | os.PathLike, y_path: str | os.PathLike) -> RawTable:
    """Join a feature CSV and a single-column response CSV row by row."""
    xh, x, xd = read_numeric_csv(x_path)
    yh, y, yd = read_numeric_csv(y_path)
    if y.shape[1] != 1:
        raise ValueError(f"{y_path}: expected a single response column, got {len(yh)}")
    if x.shape[0] != y.shape[0]:
        raise ValueError(f"row count mismatch: {x.shape[0]} regressor rows vs {y.shape[0]} responses")
    name = yh[0] if yh[0] not in xh else "__response__"
    return RawTable(xh + [name], np.column_stack([x, y]), name, xd + yd)


def preprocess(
    t: RawTable, drop_response_at_or_above: float | None = None, *, scale: bool = True
) -> Dataset:
    """Censor, center and scale.

    Rows whose response is ``>= drop_response_at_or_above`` are removed
    first; then every column of X and the response are centered and each
    column of X is divided by its sample standard deviation (ddof=1).
    """
    x, y = t.split()
    if drop_response_at_or_above is not None:
        keep = y < drop_response_at_or_above
        x, y = x[keep], y[keep]
    n, d = x.shape
    if n < d + 2:
        raise EmptyTableError(f"only {n} rows remain for {d} features; need at least {d + 2}")
    x = x - x.mean(axis=0)
    y = y - y.mean()
    scales = None
    if scale:
        scales = x.std(axis=0, ddof=1)
        flat = [t.feature_names[j] for j in np.flatnonzero(scales <= 1e-12 * max(1.0, float(np.max(scales))))]
        if flat:
            raise DegenerateColumnError(f"zero-variance column(s): {', '.join(flat)}")
        x = x / scales
        x = x - x.mean(axis=0)
    return Dataset(x=x, y=y, centered=True, column_scales=scales)
