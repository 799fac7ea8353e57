"""Reproduce the k = 1 error column reported for the layer test problem.

    python scripts/reproduce_reference_errors.py [--out reference.csv]
"""

import argparse

from ddgshishkin.harness import RunConfig, emit_report, run_convergence_study, write_report

PRINTED = {8: 0.668e-1, 16: 0.311e-1, 32: 0.125e-1, 64: 0.460e-2, 128: 0.160e-2, 256: 0.538e-3}


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", help="also write the CSV report here")
    args = ap.parse_args()

    cfg = RunConfig(epsilon=1e-8, k=1, sigma=3.0, theta=2 / 3, beta1=0.0, schedule="k1-experiment",
                    N_list=tuple(PRINTED))
    report = run_convergence_study(cfg)
    print(emit_report(report, "text"))
    print(f"{'N':>6}{'computed':>12}{'printed':>12}{'ratio':>8}")
    for row in report.rows:
        ref = PRINTED[row.N]
        print(f"{row.N:>6}{row.e_energy:>12.3e}{ref:>12.3e}{row.e_energy / ref:>8.2f}")
    if args.out:
        write_report(report, args.out, "csv")


if __name__ == "__main__":
    main()
