"""render_figures <figure_id> --in <csv>... --out <png>"""

from __future__ import annotations

import argparse
import sys

from .csvio import FigureDataError
from .figures import FIGURE_IDS, FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="render_figures",
        description="Render sweep/histogram CSVs into publication-style figures",
    )
    parser.add_argument("figure_id", choices=FIGURE_IDS)
    parser.add_argument(
        "--in", dest="inputs", nargs="+", required=True, help="input CSV file(s)"
    )
    parser.add_argument("--out", required=True, help="output image path (PNG)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        render(FigureSpec(args.figure_id, tuple(args.inputs), args.out))
    except (FigureDataError, OSError) as exc:
        print(f"render_figures: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
