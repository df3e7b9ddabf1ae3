"""Readers for the documented CSV schemas of the simulation harness.

Every loader checks the header row verbatim, so a schema drift in the
producing package fails loudly here instead of plotting garbage.
"""

from __future__ import annotations

import csv
from typing import Tuple

import numpy as np

TRAJECTORY_COLUMNS = ("n", "gamma", "x", "y", "z", "M", "theta")
SUMMARY_COLUMNS = ("seed", "M_final", "M_range", "dtheta", "circuits",
                   "M27_final")
CONTOUR_COLUMNS = ("ray_index", "x", "y", "z")
CONTOUR_SUMMARY_COLUMNS = ("M", "L_M", "T", "A")


def _load(path, columns: Tuple[str, ...]) -> np.ndarray:
    """Rows of a CSV with exactly the expected header, as a 2D float array."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader, ()))
        if header != columns:
            raise ValueError(f"{path}: header {header} does not match the "
                             f"expected schema {columns}")
        rows = [[float(v) for v in row] for row in reader if row]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return np.asarray(rows, dtype=float)


def load_trajectory(path) -> np.ndarray:
    return _load(path, TRAJECTORY_COLUMNS)


def load_summary(path) -> np.ndarray:
    return _load(path, SUMMARY_COLUMNS)


def load_contour(path) -> np.ndarray:
    return _load(path, CONTOUR_COLUMNS)


def column(data: np.ndarray, columns: Tuple[str, ...], name: str) -> np.ndarray:
    return data[:, columns.index(name)]
