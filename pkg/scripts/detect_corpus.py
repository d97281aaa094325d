#!/usr/bin/env python3
"""Two-sidedness verdicts on the Cantor endpoint corpus plus control points."""
import argparse
from collections import Counter

from cantorcomb.domain import CombDomain
from cantorcomb.experiment import expected_two_sided
from cantorcomb.twosided import CONTROL_POINTS, cantor_corpus, detect_many


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lambda", dest="lam", type=float, default=1 / 3)
    ap.add_argument("--level", type=int, default=5)
    ap.add_argument("--resolution", type=int, nargs="+", default=[512])
    ap.add_argument("--i-min", type=int, default=3)
    ap.add_argument("--i-max", type=int, default=8)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    domain = CombDomain.build(args.lam)
    corpus = cantor_corpus(args.lam, args.level) + list(CONTROL_POINTS)
    for res in args.resolution:
        certs = detect_many(domain, corpus, args.i_min, args.i_max, res, args.workers)
        wrong = [c.center for c in certs if c.two_sided != expected_two_sided(c.center)]
        tails = Counter(c.levels[0] for c in certs if c.two_sided)
        print(f"resolution {res}: {len(corpus) - len(wrong)}/{len(corpus)} agree, "
              f"verdicts {dict(Counter(c.verdict for c in certs))}")
        print(f"  certified tail starts at level: {dict(sorted(tails.items()))}")
        for pt in wrong:
            print(f"  disagreement at {tuple(pt)}")


if __name__ == "__main__":
    main()
