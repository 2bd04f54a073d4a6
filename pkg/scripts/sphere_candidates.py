"""W_p distortion of candidate non-trivial transforms of measures on a sphere.

Nothing is asserted: this only reports how far each candidate is from a W_p
isometry, per dimension n and exponent p. An orthogonal lift is included as
a control and should sit at rounding level.

    python3 scripts/sphere_candidates.py --trials 50 --seed 3
"""

import argparse

from measureiso import spaces as sp
from measureiso.isometries import antipodal_mix_transform, lift_isometry
from measureiso.measures import random_measure
from measureiso.suites import trial_rng
from measureiso.transport import wasserstein

PS = (1.0, 2.0, 3.0)


def candidates(s, rng):
    return {
        "orthogonal lift (control)": lift_isometry(sp.random_orthogonal(s.dim, rng)),
        "antipodal mix t=0.5": antipodal_mix_transform(s, 0.5),
        "antipodal mix t=0.1": antipodal_mix_transform(s, 0.1),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=3)
    args = ap.parse_args()

    for n in (2, 3, 4):
        s = sp.sphere(n)
        worst = {}
        for t in range(args.trials):
            rng = trial_rng(args.seed, t)
            mu = random_measure(s, int(rng.integers(1, 5)), rng)
            nu = random_measure(s, int(rng.integers(1, 5)), rng)
            for name, phi in candidates(s, rng).items():
                a, b = phi(mu), phi(nu)
                for p in PS:
                    gap = abs(wasserstein(s, a, b, p) - wasserstein(s, mu, nu, p))
                    worst[name, p] = max(worst.get((name, p), 0.0), gap)
        print(f"sphere in R^{n}  ({args.trials} pairs)")
        for (name, p), v in sorted(worst.items()):
            print(f"  {name:28s} p={p:g}  max |dW|={v:.3e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
