"""How far is the center-of-mass rotation from a W_p isometry when p != 2?

For random measures in R^2 and R^3 and random rotations, report the largest
|W_p(phi mu, phi nu) - W_p(mu, nu)| and the largest relative distortion for
each p. W_2 should sit at rounding level; other p are not expected to.

    python3 scripts/kloeckner_distortion.py --trials 200 --seed 1
"""

import argparse

import numpy as np

from measureiso import spaces as sp
from measureiso.isometries import kloeckner_isometry
from measureiso.measures import random_measure
from measureiso.suites import trial_rng
from measureiso.transport import wasserstein

PS = (1.0, 1.5, 2.0, 3.0, 4.0)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--max-atoms", type=int, default=6)
    args = ap.parse_args()

    for n in (2, 3):
        s = sp.euclidean(n)
        abs_err = {p: 0.0 for p in PS}
        rel_err = {p: 0.0 for p in PS}
        for t in range(args.trials):
            rng = trial_rng(args.seed, t)
            phi = kloeckner_isometry(sp.random_orthogonal(n, rng))
            mu = random_measure(s, int(rng.integers(2, args.max_atoms + 1)), rng)
            nu = random_measure(s, int(rng.integers(2, args.max_atoms + 1)), rng)
            a, b = phi(mu), phi(nu)
            for p in PS:
                before, after = wasserstein(s, mu, nu, p), wasserstein(s, a, b, p)
                abs_err[p] = max(abs_err[p], abs(after - before))
                rel_err[p] = max(rel_err[p], abs(after - before) / max(before, 1e-300))
        print(f"R^{n}  ({args.trials} pairs)")
        for p in PS:
            print(f"  p={p:<4g} max |dW|={abs_err[p]:.3e}   max relative={rel_err[p]:.3e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
