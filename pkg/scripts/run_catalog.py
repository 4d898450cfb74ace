#!/usr/bin/env python3
"""Run the full catalog verification and print the report.

    python3 scripts/run_catalog.py [--seed N] [--entry ID] [--format json|text]
"""

import argparse
import sys
import time

from liefields import catalog as CAT


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--entry", default=None)
    parser.add_argument("--format", choices=["json", "text"], default="text")
    args = parser.parse_args()

    start = time.perf_counter()
    reports = CAT.verify_catalog(seed=args.seed, entry_id=args.entry)
    elapsed = time.perf_counter() - start
    print(CAT.export_report(reports, format=args.format))
    passed = sum(1 for r in reports if r.passed)
    print(f"\n{passed}/{len(reports)} entries pass in {elapsed:.1f}s", file=sys.stderr)
    return 0 if passed == len(reports) else 1


if __name__ == "__main__":
    sys.exit(main())
