"""Render simulation CSVs into the three standard figures.

Figure kinds:
  simplex_contours   level curves of 27xyz drawn inside the simplex triangle
  histogram          distribution of 27*M_final across seeded runs
  evolution          x, y, z and 27*M of one run against a logarithmic n-axis

Rendering is pure: inputs are only read, and identical inputs produce
byte-identical image files (no timestamps or version strings are embedded).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import io

# Chart shared with the simulation package: orthonormal basis of the simplex
# plane with the origin at the barycenter. Using the same basis is what makes
# simulated paths and ODE level curves overlay exactly.
CENTER = np.array([1.0, 1.0, 1.0]) / 3.0
B1 = np.array([1.0, -1.0, 0.0]) / math.sqrt(2.0)
B2 = np.array([1.0, 1.0, -2.0]) / math.sqrt(6.0)

# A contour row may drift off its level only by float noise; anything past
# this is a real conservation failure and gets flagged on the figure.
CONSERVATION_TOL = 1e-6

PLOT_KINDS = ("simplex_contours", "histogram", "evolution")

# Fixed PNG metadata so rerenders are byte-identical across library versions.
_PNG_METADATA = {"Software": "pa-plots"}


@dataclass(frozen=True)
class PlotSpec:
    """One figure request: what to draw, from which CSVs, to which file."""

    kind: str
    inputs: Tuple[str, ...]
    output: str
    title: Optional[str] = None
    dpi: int = 150

    def validate(self) -> None:
        if self.kind not in PLOT_KINDS:
            raise ValueError(f"unknown plot kind {self.kind!r}; "
                             f"expected one of {PLOT_KINDS}")
        # An empty contour overlay is legal (triangle only); the other two
        # kinds have nothing to draw without data.
        if not self.inputs and self.kind != "simplex_contours":
            raise ValueError(f"{self.kind} needs at least one input CSV")
        if self.kind == "evolution" and len(self.inputs) != 1:
            raise ValueError("evolution plots a single run; "
                             f"got {len(self.inputs)} inputs")
        if self.dpi <= 0:
            raise ValueError("dpi must be positive")
        if not self.output:
            raise ValueError("output path must be non-empty")


@dataclass(frozen=True)
class RenderResult:
    path: str
    warnings: Tuple[str, ...]


def to_chart(points: np.ndarray) -> np.ndarray:
    """Map (k, 3) simplex points to (k, 2) chart coordinates."""
    rel = np.asarray(points, dtype=float) - CENTER
    return np.stack([rel @ B1, rel @ B2], axis=-1)


def _new_axes(spec: PlotSpec):
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    if spec.title:
        ax.set_title(spec.title)
    return fig, ax


def _finish(fig, spec: PlotSpec, warnings: List[str]) -> RenderResult:
    out_dir = os.path.dirname(spec.output)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    fig.savefig(spec.output, dpi=spec.dpi, metadata=dict(_PNG_METADATA))
    plt.close(fig)
    return RenderResult(spec.output, tuple(warnings))


def _check_conservation(path: str, points: np.ndarray) -> Optional[str]:
    """Warning text if the rows of one contour file are off their level.

    The level is not stored in the rows, so it is re-inferred as the median
    of 27xyz; a valid contour has every row within CONSERVATION_TOL of it.
    """
    prod = 27.0 * points[:, 0] * points[:, 1] * points[:, 2]
    level = float(np.median(prod))
    dev = float(np.max(np.abs(prod - level)))
    if dev > CONSERVATION_TOL:
        return (f"{os.path.basename(path)}: 27xyz deviates from level "
                f"{level:.6g} by up to {dev:.3g}")
    return None


def plot_simplex_contours(spec: PlotSpec) -> RenderResult:
    """Triangle outline plus one closed polyline per contour CSV."""
    spec.validate()
    fig, ax = _new_axes(spec)
    warnings: List[str] = []

    corners = to_chart(np.eye(3))
    outline = np.vstack([corners, corners[:1]])
    ax.plot(outline[:, 0], outline[:, 1], color="0.3", linewidth=1.0)
    for label, corner in zip(("x", "y", "z"), corners):
        ax.annotate(label, corner, textcoords="offset points",
                    xytext=(4, 4), fontsize=9)

    for path in spec.inputs:
        data = io.load_contour(path)
        points = data[:, 1:4]
        warning = _check_conservation(path, points)
        if warning is not None:
            warnings.append(warning)
        chart = to_chart(points)
        ax.plot(chart[:, 0], chart[:, 1], linewidth=0.9)

    if warnings:
        ax.text(0.01, 0.01,
                f"WARNING: {len(warnings)} contour file(s) failed the "
                f"{CONSERVATION_TOL:g} conservation re-check",
                transform=ax.transAxes, color="red", fontsize=7)

    ax.set_aspect("equal")
    ax.set_axis_off()
    return _finish(fig, spec, warnings)


def plot_histogram(spec: PlotSpec) -> RenderResult:
    """Histogram of 27*M_final, one overlaid series per summary CSV."""
    spec.validate()
    fig, ax = _new_axes(spec)
    warnings: List[str] = []

    bins = np.linspace(0.0, 1.0, 21)
    for path in spec.inputs:
        data = io.load_summary(path)
        values = io.column(data, io.SUMMARY_COLUMNS, "M27_final")
        outside = np.count_nonzero((values <= 0.0) | (values >= 1.0))
        if outside:
            warnings.append(f"{os.path.basename(path)}: {outside} of "
                            f"{values.size} values of 27*M_final lie "
                            f"outside (0, 1)")
        stem = os.path.splitext(os.path.basename(path))[0]
        ax.hist(values, bins=bins, histtype="stepfilled", alpha=0.6,
                edgecolor="black", linewidth=0.7, label=stem)

    ax.set_xlabel("27*M_final")
    ax.set_ylabel("runs")
    ax.set_xlim(0.0, 1.0)
    if len(spec.inputs) > 1:
        ax.legend(fontsize=8)
    return _finish(fig, spec, warnings)


def plot_evolution(spec: PlotSpec) -> RenderResult:
    """x, y, z and 27*M of one trajectory against n, log n-axis."""
    spec.validate()
    fig, ax = _new_axes(spec)
    warnings: List[str] = []

    data = io.load_trajectory(spec.inputs[0])
    n = io.column(data, io.TRAJECTORY_COLUMNS, "n")
    # n = 0 is the start graph; it cannot sit on a log axis.
    positive = data[n > 0]
    if positive.shape[0] == 0:
        warnings.append(f"{os.path.basename(spec.inputs[0])}: only the n=0 "
                        f"checkpoint; falling back to a linear axis")
        positive = data
        log_axis = False
    else:
        log_axis = True

    n = io.column(positive, io.TRAJECTORY_COLUMNS, "n")
    # Degenerate inputs can leave a single checkpoint; markers keep it visible.
    style = dict(marker="o", markersize=3) if n.size <= 2 else {}
    for name in ("x", "y", "z"):
        ax.plot(n, io.column(positive, io.TRAJECTORY_COLUMNS, name),
                linewidth=0.9, label=name, **style)
    m27 = 27.0 * io.column(positive, io.TRAJECTORY_COLUMNS, "M")
    ax.plot(n, m27, color="0.5", linewidth=1.4, label="27M", **style)

    if log_axis:
        ax.set_xscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel("share")
    ax.set_ylim(0.0, 1.0)
    ax.legend(fontsize=8, ncol=4, loc="upper right")
    return _finish(fig, spec, warnings)


_RENDERERS = {
    "simplex_contours": plot_simplex_contours,
    "histogram": plot_histogram,
    "evolution": plot_evolution,
}


def render(spec: PlotSpec) -> RenderResult:
    spec.validate()
    return _RENDERERS[spec.kind](spec)
