"""Figure rendering for the preferential-attachment simulation CSVs.

Consumes only the documented CSV schemas (trajectories, run summaries,
level-curve contours) and produces deterministic PNG figures.
"""

from .figures import (CONSERVATION_TOL, PLOT_KINDS, PlotSpec, RenderResult,
                      plot_evolution, plot_histogram, plot_simplex_contours,
                      render, to_chart)
from .io import (CONTOUR_COLUMNS, SUMMARY_COLUMNS, TRAJECTORY_COLUMNS,
                 load_contour, load_summary, load_trajectory)

__all__ = [
    "CONSERVATION_TOL",
    "PLOT_KINDS",
    "PlotSpec",
    "RenderResult",
    "plot_evolution",
    "plot_histogram",
    "plot_simplex_contours",
    "render",
    "to_chart",
    "TRAJECTORY_COLUMNS",
    "SUMMARY_COLUMNS",
    "CONTOUR_COLUMNS",
    "load_trajectory",
    "load_summary",
    "load_contour",
]
