"""Energy error at fixed N across a range of perturbation parameters.

    python scripts/epsilon_sweep.py --N 64 --k 1
"""

import argparse
import warnings

from ddgshishkin.harness import RunConfig, run_convergence_study


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--N", type=int, default=64)
    ap.add_argument("--k", type=int, default=1)
    ap.add_argument("--schedule", default="k1-experiment")
    ap.add_argument("--eps", type=float, nargs="+", default=[1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12])
    args = ap.parse_args()

    print(f"{'epsilon':>10}{'e^N':>12}{'superclose':>12}")
    for eps in args.eps:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            row = run_convergence_study(RunConfig(epsilon=eps, k=args.k, schedule=args.schedule,
                                                  N_list=(args.N,))).rows[0]
        print(f"{eps:>10.0e}{row.e_energy:>12.3e}{row.superclose_energy:>12.3e}")


if __name__ == "__main__":
    main()
