#!/usr/bin/env python3
"""Run the full comb pipeline and print the check summary."""
import argparse
import sys

from cantorcomb.experiment import ExperimentConfig, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", help="JSON config; defaults reproduce the reference run")
    ap.add_argument("--out", default="out/experiment")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    if args.workers != cfg.workers:
        cfg = ExperimentConfig.from_dict({**cfg.to_dict(), "workers": args.workers})
    rep = run_experiment(cfg, args.out)
    est, dim, bnd = rep["estimate_c"], rep["dimension"], rep["bound"]
    print(f"C_emp {est['value']:.4f}  lemma bound {est['lemma_bound']:.4f}  cases {est['cases']}")
    print(f"two-sided {rep['two_sided']['two_sided']}/{rep['two_sided']['corpus_size']}  "
          f"agreement {rep['two_sided']['agreement']:.3f}")
    print(f"dim exact {dim['exact']:.4f}  box(endpoints) {dim['box_endpoints']['value']:.4f}  "
          f"box(detected) {dim['box_detected']['value']:.4f}  net(endpoints) {dim['net_endpoints']['value']:.2f}")
    print(f"bound rhs {bnd['rhs']:.4f}  margin {bnd['margin']:.4f}")
    for k, v in rep["checks"].items():
        print(f"  {k:26s} {'pass' if v else 'FAIL'}")
    sys.exit(0 if rep["passed"] else 1)


if __name__ == "__main__":
    main()
