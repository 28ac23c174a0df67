"""Batch figure generation: one SVG per known CSV in the input directory."""

import argparse
import sys
from pathlib import Path

from .render import KINDS, FigureSpec, SchemaError, render


def make_parser():
    ap = argparse.ArgumentParser(
        prog="circren-plots",
        description="render figures from circren CSV artifacts")
    ap.add_argument("--in", dest="indir", required=True,
                    help="directory holding the experiment CSVs")
    ap.add_argument("--out", dest="outdir", required=True,
                    help="directory for the figures")
    ap.add_argument("--kind", choices=KINDS, default=None,
                    help="render only this figure kind")
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    indir = Path(args.indir)
    outdir = Path(args.outdir)
    if not indir.is_dir():
        print("input directory %s does not exist" % indir, file=sys.stderr)
        return 2

    kinds = [args.kind] if args.kind else list(KINDS)
    rendered = []
    for kind in kinds:
        src = indir / ("%s.csv" % kind)
        if not src.exists():
            if args.kind:
                print("%s not found" % src, file=sys.stderr)
                return 2
            continue
        spec = FigureSpec(kind=kind, csv_path=src,
                          out_path=outdir / ("%s.svg" % kind))
        try:
            rendered.append(render(spec))
        except SchemaError as exc:
            print("schema error: %s" % exc, file=sys.stderr)
            return 3
    if not rendered:
        print("no known CSVs in %s" % indir, file=sys.stderr)
        return 2
    for path in rendered:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
