"""Command line entry point.

    trajplot render --y E_N --out fig.svg run1.csv run2.csv ...

Exit codes: 0 rendered, 1 input file rejected (message names the file
and column), 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

from . import PlotSpec, SchemaError, Y_CHOICES, render


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trajplot")
    sub = parser.add_subparsers(dest="verb", required=True)
    p = sub.add_parser("render", help="render trajectory CSVs into one figure")
    p.add_argument("inputs", nargs="+", metavar="CSV", help="trajectory files, one curve each")
    p.add_argument("--y", default="E_N", choices=Y_CHOICES, help="column to plot")
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument(
        "--label",
        action="append",
        default=None,
        help="legend label, repeat once per input; overrides the sidecar",
    )
    p.add_argument("--title", default=None)
    p.add_argument(
        "--format",
        dest="fmt",
        choices=("svg", "png"),
        default=None,
        help="default: from the --out suffix, else svg",
    )
    p.add_argument("--log-y", action="store_true", help="logarithmic y axis")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    spec = PlotSpec(
        inputs=tuple(args.inputs),
        out=args.out,
        y=args.y,
        labels=tuple(args.label) if args.label is not None else None,
        title=args.title,
        fmt=args.fmt,
        log_y=args.log_y,
    )
    try:
        out = render(spec)
    except SchemaError as exc:
        print(f"trajplot: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"trajplot: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
