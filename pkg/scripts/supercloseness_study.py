"""Least-squares orders of |pi w - w_h|_E and |G_k w - w_h|_E against ln(N)/N.

    python scripts/supercloseness_study.py --k 1 2 3 --schedule full-order
"""

import argparse
import warnings

import numpy as np

from ddgshishkin.harness import RunConfig, emit_report, run_convergence_study


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--k", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--N", type=int, nargs="+", default=[32, 64, 128, 256])
    ap.add_argument("--epsilon", type=float, default=1e-8)
    ap.add_argument("--schedule", default="full-order")
    ap.add_argument("--csv", action="store_true", help="print the CSV reports as well")
    args = ap.parse_args()

    Ns = np.array(args.N, dtype=float)
    x = np.log(np.log(Ns) / Ns)
    print(f"{'k':>3}{'slope superclose':>18}{'slope e^N':>12}")
    for k in args.k:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rep = run_convergence_study(RunConfig(k=k, epsilon=args.epsilon, schedule=args.schedule,
                                                  N_list=tuple(args.N)))
        s_sc = np.polyfit(x, np.log(rep.superclose()), 1)[0]
        s_e = np.polyfit(x, np.log(rep.errors()), 1)[0]
        print(f"{k:>3}{s_sc:>18.3f}{s_e:>12.3f}")
        if args.csv:
            print(emit_report(rep, "csv"))


if __name__ == "__main__":
    main()
