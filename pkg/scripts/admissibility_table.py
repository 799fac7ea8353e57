"""Penalty constants per degree and a randomized admissibility / coercivity
check of the penalty schedules on Shishkin meshes.

    python scripts/admissibility_table.py --trials 200
"""

import argparse

import numpy as np

from ddgshishkin.admissibility import admissibility_report, check_admissibility, estimate_M
from ddgshishkin.ddg import FluxParams
from ddgshishkin.mesh import build_shishkin


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--epsilon", type=float, default=1e-8)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'k':>3}{'lambda_max':>12}{'bound':>8}{'integer':>9}{'M(k,0) N=16':>14}")
    for k in range(1, 7):
        r = admissibility_report(k)
        M = estimate_M(build_shishkin(16, args.epsilon, k + 2, 2.0), k, 0.0)
        print(f"{k:>3}{r.lambda_max:>12.6g}{r.beta0_bound:>8.3g}{r.beta0_integer:>9d}{M:>14.4g}")

    rng = np.random.default_rng(args.seed)
    print()
    print(f"{'schedule':>15}{'k':>3}{'N':>5}{'admissible':>12}{'slack':>10}{'coercive':>10}{'slack':>10}")
    for schedule in ("half-order", "full-order", "k1-experiment"):
        for k in (1, 2, 3):
            beta1 = 0.0 if schedule == "k1-experiment" else 1.0 / (2 * k * k + 2 * k)
            for N in (8, 32):
                mesh = build_shishkin(N, args.epsilon, k + 2, 2.0)
                c = check_admissibility(mesh, k, FluxParams(beta1=beta1, schedule=schedule), args.trials, rng)
                print(f"{schedule:>15}{k:>3}{N:>5}{str(c.passed):>12}{c.admissibility_slack:>10.3g}"
                      f"{str(c.coercive):>10}{c.coercivity_slack:>10.3g}")


if __name__ == "__main__":
    main()
