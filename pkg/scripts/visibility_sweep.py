"""Sweep the visibility of noisy PR^d boxes and write the bound quantities as CSV.

    python scripts/visibility_sweep.py --d 3 --steps 201 --out sweep_d3.csv
"""
import argparse
import sys

import numpy as np

from boxlab.serialization import csv_text
from boxlab.tsirelson import critical_visibility, sweep


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--steps", type=int, default=101)
    p.add_argument("--out")
    args = p.parse_args(argv)

    vs = np.linspace(0.0, 1.0, args.steps)
    reports = sweep(args.d, vs)
    rows = [[float(v), r.bell_value, r.c1_lhs, r.c2_lhs, r.violates_c1, r.violated] for v, r in zip(vs, reports)]
    text = csv_text(["v", "bell_value", "c1_lhs", "c2_lhs", "violates_c1", "violated"], rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.d in (2, 3):
        print(f"critical visibility d={args.d}: {critical_visibility(args.d):.12f}", file=sys.stderr)


if __name__ == "__main__":
    main()
