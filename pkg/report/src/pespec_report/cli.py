"""Command-line entry: render figures from a directory of CSV artifacts."""

import argparse
import sys

from .report import FIGURES, FORMATS, ReportSpec, SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pe-report",
        description="Render figures from spectral-toolkit CSV outputs.",
    )
    parser.add_argument("--input", required=True, help="directory with CSV files")
    parser.add_argument(
        "--figures",
        default=",".join(FIGURES),
        help=f"comma list from: {', '.join(FIGURES)}",
    )
    parser.add_argument("--format", default="png", choices=FORMATS)
    parser.add_argument("--out", default=None,
                        help="image directory (default: the input directory)")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        spec = ReportSpec(
            input_dir=args.input,
            figures=tuple(f for f in args.figures.split(",") if f),
            fmt=args.format,
            out_dir=args.out,
        )
        paths = render(spec)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
