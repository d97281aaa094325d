#!/usr/bin/env python3
"""Empirical constant against the closed-form bound over a (lambda, p) grid."""
import argparse

from cantorcomb.bounds import lemma41_bound
from cantorcomb.curves import estimate_C, is_admissible
from cantorcomb.domain import CombDomain


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lambda", dest="lams", type=float, nargs="+", default=[0.2, 0.25, 1 / 3, 0.4])
    ap.add_argument("--p", type=float, nargs="+", default=[1.1, 1.2, 1.3])
    ap.add_argument("--pairs", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    print(f"{'lambda':>8} {'p':>5} {'C_emp':>10} {'bound':>10} {'worst':>6}")
    for lam in args.lams:
        domain = CombDomain.build(lam)
        for p in args.p:
            if not is_admissible(p, lam):
                print(f"{lam:8.4f} {p:5.2f} {'inadmissible':>22}")
                continue
            est = estimate_C(domain, p, args.pairs, args.seed, workers=args.workers)
            print(f"{lam:8.4f} {p:5.2f} {est.value:10.3f} {lemma41_bound(p, lam):10.3f} {est.worst_case:>6}")


if __name__ == "__main__":
    main()
