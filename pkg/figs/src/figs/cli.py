"""CLI: ``figs fig2 --in DIR --out fig2.png`` and the fig4 twin.

Collects every ``*.csv`` in the input directory (all must carry the
learning CSV header).  Exit codes: 0 success, 1 bad inputs, 2 i/o
failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import FigureInputError, FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="figs",
                                     description="render figures from learning CSVs")
    sub = parser.add_subparsers(dest="which", required=True)
    for which, blurb in (("fig2", "learning curves and error probability"),
                         ("fig4", "scaled work and free-energy change")):
        p = sub.add_parser(which, help=blurb)
        p.add_argument("--in", dest="in_dir", required=True,
                       help="directory holding learning CSVs")
        p.add_argument("--out", dest="out_path", required=True,
                       help="output image path")
        p.add_argument("--dpi", type=int, default=150)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse usage error
        return 0 if exc.code in (0, None) else 1
    in_dir = Path(args.in_dir)
    if not in_dir.is_dir():
        print(f"error: input directory not found: {in_dir}", file=sys.stderr)
        return 1
    inputs = tuple(sorted(in_dir.glob("*.csv")))
    if not inputs:
        print(f"error: no CSV files under {in_dir}", file=sys.stderr)
        return 1
    try:
        spec = FigureSpec(inputs=inputs, kind=args.which,
                          output=Path(args.out_path), dpi=args.dpi)
        out = render(spec)
    except FigureInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


def entry() -> None:
    raise SystemExit(main())
