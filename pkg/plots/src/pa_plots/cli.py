"""Command-line entry point: pa-plot <kind> --in CSV [CSV ...] --out IMAGE."""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .figures import PLOT_KINDS, PlotSpec, render

_HELP = {
    "simplex_contours": "triangle with level-curve overlays",
    "histogram": "distribution of 27*M_final across runs",
    "evolution": "x, y, z and 27*M of one run versus log n",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pa-plot",
        description="Render simulation CSVs into figures.")
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in PLOT_KINDS:
        p = sub.add_parser(kind, help=_HELP[kind])
        # The contour overlay is allowed to be empty (triangle only).
        p.add_argument("--in", dest="inputs", metavar="CSV", default=[],
                       nargs="*" if kind == "simplex_contours" else "+",
                       required=kind != "simplex_contours")
        p.add_argument("--out", required=True, metavar="IMAGE")
        p.add_argument("--title")
        p.add_argument("--dpi", type=int, default=150)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    spec = PlotSpec(kind=args.kind, inputs=tuple(args.inputs),
                    output=args.out, title=args.title, dpi=args.dpi)
    result = render(spec)
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    print(result.path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
