#!/usr/bin/env python3
"""Print the boundary classification over a grid of (noise exponent, drift)."""

import argparse
import math
import sys

from ballsde.coeffs import CoeffFn
from ballsde.radial import RadialModel, classify_boundary


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.strip())
    ap.add_argument("--r", type=float, nargs="+", default=[0.5, 0.75])
    ap.add_argument("--c", type=float, nargs="+", default=[0.5, 1.0, 1.9, 2.1, 3.0])
    ap.add_argument("--n", type=int, default=2, help="ambient dimension")
    ap.add_argument("--gamma", type=float, default=math.sqrt(2.0))
    args = ap.parse_args(argv)

    gamma = CoeffFn.constant(args.gamma)
    print(f"{'r':>5} {'c':>6}  {'verdict':24}  {'hitting':>12}  {'entrance':>12}")
    for r in args.r:
        for c in args.c:
            model = RadialModel(n=args.n, r=r, gamma=gamma, g=CoeffFn.constant(c))
            out = classify_boundary(model)
            hit = "divergent" if math.isinf(out.hitting_integral) else f"{out.hitting_integral:.6g}"
            ent = "divergent" if math.isinf(out.entrance_integral) else f"{out.entrance_integral:.6g}"
            print(f"{r:5.2f} {c:6.2f}  {out.verdict:24}  {hit:>12}  {ent:>12}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
