"""sectorlab-plot: turn harness artifacts into figures.

Exit codes: 0 figure written, 2 missing input or schema mismatch.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .formats import SchemaError
from .render import KINDS, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sectorlab-plot",
        description="Render sectorlab CSV / kernel artifacts as figures.",
        epilog="exit codes: 0 figure written; 2 missing input or schema mismatch",
    )
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--in", dest="input", required=True, help="input CSV or kernel container")
    parser.add_argument("--out", required=True, help="output image path (png, pdf, svg)")
    parser.add_argument("--title", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if not Path(args.input).exists():
        print(f"input not found: {args.input}", file=sys.stderr)
        return 2
    try:
        render(args.kind, args.input, args.out, args.title)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
