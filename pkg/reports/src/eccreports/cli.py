"""Standalone renderer: eccreports-render --kind K --in CSV... --out PATH."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import KINDS, SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="eccreports-render",
                                     description=__doc__)
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--in", dest="inputs", required=True, nargs="+",
                        help="input CSV file(s)")
    parser.add_argument("--out", required=True, help="output image path "
                        "(.svg default, .png supported)")
    parser.add_argument("--title", default="")
    args = parser.parse_args(argv)
    for path in args.inputs:
        if not Path(path).exists():
            print(f"error: input not found: {path}", file=sys.stderr)
            return 1
    try:
        render(args.kind, args.inputs, args.out, args.title)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
