"""Command-line entry point: CSVs in, PNG+SVG figures out."""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .figures import KINDS, FigureSpec, MissingColumnError, render


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="plotkit",
        description="Render figures from seqshield result CSVs",
    )
    p.add_argument("csvs", nargs="+", help="input result CSV paths")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--group-by", default=None,
                   help="swept column for sweep_lines (e.g. sigma)")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--stem", default=None, help="output file name stem")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        spec = FigureSpec(
            csv_paths=tuple(args.csvs),
            kind=args.kind,
            group_by=args.group_by,
            out_dir=args.out_dir,
            stem=args.stem,
        )
        written = render(spec)
    except MissingColumnError as exc:
        print(f"error: missing-column: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: invalid-argument: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return 3
    for path in written:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
