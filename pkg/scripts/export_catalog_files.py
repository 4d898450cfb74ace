#!/usr/bin/env python3
"""Regenerate the algebra-file fixtures for every built-in catalog entry.

    python3 scripts/export_catalog_files.py [--outdir data/algebras]

The files round-trip through the algebra-file parser; tests compare them
against the built-in data so transcription drift shows up as a diff."""

import argparse
import pathlib
import sys

from liefields import algfile, catalog as CAT


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="data/algebras")
    args = parser.parse_args()
    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for entry in CAT.builtin_entries():
        af = algfile.catalog_entry_file(entry)
        text = f"# {entry.id}: {entry.source}\n" + algfile.format_algebra_file(af)
        (outdir / f"{entry.id}.alg").write_text(text, encoding="utf-8")
        print(f"wrote {outdir / (entry.id + '.alg')}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
