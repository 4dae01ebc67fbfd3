"""Command-line entry point: render --kind sweep|learning --in csv --out png.

Exit codes: 0 on success, 2 for usage errors, 1 for data errors (missing
file, empty CSV, schema mismatch).
"""
from __future__ import annotations

import argparse
import sys

from .render import LEARNING_KIND, SWEEP_KIND, PlotJob, render
from .schema import PlotDataError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="render",
        description="Render sweep panels or learning curves from rewarddesign CSVs.",
    )
    parser.add_argument("--kind", required=True, choices=(SWEEP_KIND, LEARNING_KIND))
    parser.add_argument("--in", dest="input", required=True, help="input CSV path")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--dpi", type=int, default=150)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    job = PlotJob(input_csv=args.input, output_image=args.out, kind=args.kind)
    try:
        path = render(job, dpi=args.dpi)
    except (PlotDataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


def run() -> None:
    sys.exit(main())
