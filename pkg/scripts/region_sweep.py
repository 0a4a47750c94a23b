"""Region map of the 3x3 Werner family: minimum of the K-copy objective over beta.

Writes CSV rows (beta, K, min_value, verdict, ppt, restarts, converged_fraction)
for K = 1 and K = 2. Expected structure: PPT for beta <= 1, no negative value
up to beta = 3/2, distillable above.
"""

import argparse
import sys

import numpy as np

from entangle.cli import _csv
from entangle.distill import werner_scan


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lo", type=float, default=0.0)
    ap.add_argument("--hi", type=float, default=3.0)
    ap.add_argument("--steps", type=int, default=31)
    ap.add_argument("--copies", default="1,2")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("-o", "--output")
    args = ap.parse_args()
    betas = np.linspace(args.lo, args.hi, args.steps)
    points = []
    for k in (int(x) for x in args.copies.split(",")):
        points.extend(werner_scan(3, betas, k, seed=args.seed))
    text = _csv(points)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
