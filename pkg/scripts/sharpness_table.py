#!/usr/bin/env python3
"""Print the sharpness checks and lambda_C for a range of exponents."""
import argparse
import math

from cantorcomb.bounds import c_threshold, lambda_for_C, verify_sharpness


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=float, nargs="+", default=[1.1, 1.3, 1.5, 1.7, 1.9])
    ap.add_argument("--c-const", type=float, default=9.0)
    ap.add_argument("--grid", type=int, default=1000)
    ap.add_argument("--coeff", type=float, default=2 / math.log(2))
    args = ap.parse_args()

    print(f"{'p':>5} {'C(p)':>10} {'lam_C(2C)':>12} {'f_max':>11} {'min fd':>11} {'floor':>11}  verdict")
    for p in args.p:
        rep = verify_sharpness(p, args.c_const, args.grid, coeff=args.coeff)
        thr = c_threshold(p, args.c_const)
        lam = lambda_for_C(p, 2 * thr, args.c_const)
        failed = ",".join(k for k, v in rep.checks.items() if not v) or "-"
        print(f"{p:5.2f} {thr:10.3f} {lam:12.8f} {rep.f_max:11.3e} {rep.min_fd_derivative:11.3e} "
              f"{rep.derivative_floor:11.3e}  {'pass' if rep.passed else 'FAIL ' + failed}")


if __name__ == "__main__":
    main()
