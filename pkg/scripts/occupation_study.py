#!/usr/bin/env python3
"""Boundary occupation of paths started on the sphere, across drift levels.

Each run measures the fraction of (path, step) states within delta of the
boundary for a ladder of deltas, then fits the log-log slope.  A positive
slope means the occupation fraction vanishes with delta, i.e. the paths do
not linger at the boundary even when started there; stronger inward drift
steepens the profile.

The default settings are deliberately lighter than the acceptance battery
(1e-4 step instead of 1e-5) so the script answers in seconds; pass
--dt 1e-5 --replicas 1000 to reproduce the heavyweight numbers.
"""

import argparse
import sys

import numpy as np

from ballsde.ball import occupation_profile
from ballsde.coeffs import BallModel, CoeffFn
from ballsde.rng import derive_seed

SQRT2 = 2.0**0.5


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--levels", type=float, nargs="+", default=[0.5, 1.0, 1.5])
    ap.add_argument("--deltas", type=float, nargs="+",
                    default=[1e-3, 2e-3, 5e-3, 1e-2])
    ap.add_argument("--T", type=float, default=1.0)
    ap.add_argument("--dt", type=float, default=1e-4)
    ap.add_argument("--replicas", type=int, default=200)
    ap.add_argument("--seed", type=int, default=2026)
    args = ap.parse_args(argv)

    deltas = np.asarray(sorted(args.deltas))
    header = "    c  " + "".join(f"  {f'occ({d:g})':>9}" for d in deltas) + "      slope"
    print(header)
    for c in args.levels:
        model = BallModel(
            n=2, r=0.5, gamma=CoeffFn.constant(SQRT2), g=CoeffFn.constant(c)
        )
        occ = occupation_profile(
            model, (1.0, 0.0), T=args.T, dt=args.dt,
            seed=derive_seed(args.seed, "occupation", repr(c)),
            replicas=args.replicas, deltas=deltas,
        )
        if np.all(occ > 0.0):
            slope = np.polyfit(np.log(deltas), np.log(occ), 1)[0]
            slope_txt = f"{slope:9.3f}"
        else:
            slope_txt = "   (empty)"
        cells = "".join(f"  {frac:9.5f}" for frac in occ)
        print(f"{c:5.2f}  {cells}  {slope_txt}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
