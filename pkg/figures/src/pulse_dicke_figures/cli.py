"""Batch front end: pulse-dicke-figures --kind ... --input ... --out ...

Exit 0 on success, 1 on schema, data, or I/O errors (the message names
the offending column or file).
"""

import argparse
import sys

from .plots import KINDS, PlotSpec, render
from .schemas import EmptyTableError, FigureDataError, SchemaMismatchError


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pulse-dicke-figures",
        description="Render publication figures from sweep CSV files.")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--input", required=True, nargs="+",
                        help="CSV file(s) in the matching schema")
    parser.add_argument("--out", required=True,
                        help="output base path; .png and .svg are written")
    parser.add_argument("--title", default=None)
    parser.add_argument("--xlabel", default=None)
    parser.add_argument("--ylabel", default=None)
    args = parser.parse_args(argv)

    spec = PlotSpec(kind=args.kind, inputs=tuple(args.input), output=args.out,
                    title=args.title, xlabel=args.xlabel, ylabel=args.ylabel)
    try:
        png, svg = render(spec)
    except (SchemaMismatchError, EmptyTableError, FigureDataError,
            OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {png} and {svg}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
