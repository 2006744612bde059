#!/usr/bin/env python3
"""Regenerate the three bundled flow cases and print a result table.

Usage: python scripts/run_flow_cases.py [--out DIR] [--a REAL]
"""

import argparse
import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from cavitystream.cli import run as cli_run


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out/flow_cases")
    parser.add_argument("--a", type=float, default=1.0)
    args = parser.parse_args()

    rc = cli_run(["examples", "--out", args.out, "--a", str(args.a), "--quiet"])
    if rc != 0:
        print(f"examples run failed with exit code {rc}", file=sys.stderr)
        return rc

    print(f"{'case':<12} {'verdict':<14} {'max residual':>14} {'max boundary':>14} {'centers':>8}")
    for name in ("linear", "sinusoidal", "realistic"):
        base = os.path.join(args.out, name)
        with open(os.path.join(base, "verify.json")) as fh:
            verdict = json.load(fh)
        with open(os.path.join(base, "stagnation.csv")) as fh:
            centers = sum(1 for line in fh if ",center," in line)
        status = "pass" if verdict["overall_pass"] else "FAIL"
        print(
            f"{name:<12} {status:<14} {verdict['max_interior_residual']:>14.3e} "
            f"{verdict['max_boundary_value']:>14.3e} {centers:>8}"
        )
    print(f"\nartifacts in {args.out}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
