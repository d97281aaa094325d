"""Command-line entry point.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage,
configuration or admissibility errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import bounds, export
from .cantor import CantorParams, gap_intervals, level_intervals
from .curves import connect, estimate_C, polyline_integral
from .dimension import (PointSet, aligned_scales, box_count, cantor_endpoints,
                        net_dimension)
from .domain import CombDomain, boundary_polyline
from .errors import AdmissibilityError, ConvergenceError, StageError
from .experiment import ExperimentConfig, expected_two_sided, run_experiment
from .twosided import CONTROL_POINTS, INCONCLUSIVE, cantor_corpus, detect, detect_many

EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2


def _common(p: argparse.ArgumentParser, *names: str) -> None:
    opts = {
        "lambda": dict(type=float, default=1.0 / 3.0, dest="lam", help="Cantor ratio in (0, 1/2)"),
        "p": dict(type=float, default=1.2, help="Sobolev exponent in (1, 2)"),
        "depth": dict(type=int, default=8, help="construction level"),
        "resolution": dict(type=int, default=512, help="raster cells per ball diameter"),
        "pairs": dict(type=int, default=2000, help="sampled complement pairs"),
        "seed": dict(type=int, default=0),
        "c-const": dict(type=float, default=9.0, dest="c_const", help="absolute constant c"),
        "tol": dict(type=float, default=1e-8, help="relative quadrature tolerance"),
    }
    for n in names:
        p.add_argument(f"--{n}", **opts[n])
    p.add_argument("--out", type=Path, default=None, help="directory for output files")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def _emit(args, obj: dict, header=None, rows=None) -> None:
    if args.format == "csv" and header is not None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([export.fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
        sys.stdout.write(buf.getvalue())
    else:
        sys.stdout.write(export.dumps(obj))


def _outdir(args) -> Path | None:
    if args.out is None:
        return None
    args.out.mkdir(parents=True, exist_ok=True)
    return args.out


# --- subcommands ----------------------------------------------------------------


def cmd_cantor(args) -> int:
    params = CantorParams(args.lam, max(args.depth, 1))
    items = level_intervals(params, args.depth)
    if args.depth >= 1:
        items = items + gap_intervals(params, args.depth)
    items.sort(key=lambda iv: iv.left)
    rows = [(iv.level, iv.index, iv.kind, iv.left, iv.right) for iv in items]
    obj = {"lambda": args.lam, "level": args.depth, "dimension": params.dimension,
           "intervals": [dict(zip(("level", "index", "kind", "left", "right"), r)) for r in rows]}
    _emit(args, obj, ["level", "index", "kind", "left", "right"], rows)
    return EXIT_OK


def cmd_render(args) -> int:
    domain = CombDomain.build(args.lam)
    polys = boundary_polyline(domain, args.depth)
    out = _outdir(args)
    if out is not None:
        export.write_svg(out / "domain.svg", polys)
        export.write_polyline(out / "polyline.csv", polys[1])
    _emit(args, {"lambda": args.lam, "depth": args.depth, "tent_vertices": len(polys[1])},
          ["x", "y"], [tuple(v) for v in polys[1]])
    return EXIT_OK


def cmd_integral(args) -> int:
    domain = CombDomain.build(args.lam)
    x, y = tuple(args.x), tuple(args.y)
    gamma, case = connect(x, y, domain)
    res = polyline_integral(gamma, args.p, domain, args.tol)
    dist = float(np.hypot(x[0] - y[0], x[1] - y[1]))
    ratio = res.value / dist ** (2.0 - args.p)
    obj = {"x": list(x), "y": list(y), "case": case, "vertices": gamma.vertices.tolist(),
           "integral": res.value, "error": res.error, "ratio": ratio}
    _emit(args, obj, ["x1", "y1", "x2", "y2", "integral", "ratio", "case"],
          [(x[0], x[1], y[0], y[1], res.value, ratio, case)])
    return EXIT_OK


def cmd_estimate_c(args) -> int:
    domain = CombDomain.build(args.lam)
    est = estimate_C(domain, args.p, args.pairs, args.seed, args.tol, workers=args.workers)
    bound = bounds.lemma41_bound(args.p, args.lam, args.c_const)
    ok = est.value <= bound
    obj = {**est.to_dict(), "lambda": args.lam, "p": args.p, "lemma_bound": bound,
           "c_const": args.c_const, "below_lemma_bound": ok}
    out = _outdir(args)
    if out is not None:
        export.write_json(out / "estimate_c.json", obj)
        export.write_pairs(out / "pairs.csv", est.records)
    _emit(args, obj, ["x1", "y1", "x2", "y2", "integral", "ratio", "case"],
          export.pairs_rows(est.records))
    return EXIT_OK if ok else EXIT_CHECK


def cmd_detect(args) -> int:
    domain = CombDomain.build(args.lam)
    if args.center is not None:
        cert = detect(domain, tuple(args.center), args.i_min, args.i_max, args.resolution)
        certs = [cert]
        ok = cert.verdict != INCONCLUSIVE
        obj = cert.to_dict()
    else:
        corpus = cantor_corpus(args.lam, args.corpus_level) + list(CONTROL_POINTS)
        certs = detect_many(domain, corpus, args.i_min, args.i_max, args.resolution, args.workers)
        agree = [c.two_sided == expected_two_sided(c.center) for c in certs]
        ok = all(agree) and not any(c.verdict == INCONCLUSIVE for c in certs)
        obj = {"corpus_size": len(certs), "agreement": sum(agree) / len(agree),
               "certificates": [c.to_dict() for c in certs]}
    out = _outdir(args)
    if out is not None:
        export.write_json(out / "certificates.json", [c.to_dict() for c in certs])
        export.write_svg(out / "domain.svg", boundary_polyline(domain, 10),
                         [(c.center.x, c.center.y, c.two_sided) for c in certs])
    _emit(args, obj, ["x", "y", "verdict", "certified_radius"],
          [(c.center.x, c.center.y, c.verdict, c.certified_radius) for c in certs])
    return EXIT_OK if ok else EXIT_CHECK


def _load_points(path: Path) -> PointSet:
    data = np.loadtxt(path, delimiter=",", ndmin=2, skiprows=1)
    return PointSet(data[:, 0] if data.shape[1] == 1 else data[:, :2], label=path.name)


def cmd_dim(args) -> int:
    E = _load_points(args.points) if args.points else cantor_endpoints(args.lam, args.depth)
    out = _outdir(args)
    if args.method == "box":
        first, last = args.scale_levels if args.scale_levels else (2, args.depth - 1)
        est = box_count(E, aligned_scales(args.lam, first, last))
        d = est.diagnostics
        if out is not None:
            export.write_boxcounts(out / "boxcounts.csv", est)
        _emit(args, {**est.to_dict(), "counts": d["counts"], "scales": d["scales"],
                     "residual": d["residual"]},
              ["scale", "count"], zip(d["scales"], d["counts"]))
    else:
        est, _ = net_dimension(E, args.net_ratio, args.i0)
        if out is not None:
            export.write_nets(out / "nets.csv", est)
        diag = {k: v for k, v in est.diagnostics.items() if k != "table"}
        _emit(args, {**est.to_dict(), **diag}, ["i", "k", "j_witness", "N_j"],
              est.diagnostics.get("table", []))
    return EXIT_OK if est.passed else EXIT_CHECK


def cmd_bound(args) -> int:
    rep = bounds.main_bound(args.p, args.C)
    obj = {**rep.to_dict(), "m1_floor": bounds.m1_floor(args.p)}
    ok = rep.admissible
    if args.check_lambda is not None:
        lam = args.check_lambda
        exact = bounds.exact_dimension(lam)
        obj.update({"lambda": lam, "exact_dimension": exact, "margin": rep.rhs - exact})
        ok = ok and rep.rhs > exact
    _emit(args, obj, list(obj), [tuple(obj.values())])
    return EXIT_OK if ok else EXIT_CHECK


def cmd_sharpness(args) -> int:
    rep = bounds.verify_sharpness(args.p, args.c_const, args.grid, coeff=args.coeff)
    obj = rep.to_dict()
    if args.C is not None:
        lam_c = bounds.lambda_for_C(args.p, args.C, args.c_const)
        obj["lambda_for_C"] = {"C": args.C, "lambda": lam_c}
    _emit(args, obj, ["check", "passed"], list(rep.checks.items()))
    return EXIT_OK if rep.passed else EXIT_CHECK


def cmd_experiment(args) -> int:
    if args.config is not None:
        cfg = ExperimentConfig.load(args.config)
    else:
        cfg = ExperimentConfig(lam=args.lam, p=args.p, depth=args.depth,
                               resolution=args.resolution, pairs=args.pairs, seed=args.seed,
                               c_const=args.c_const, tol=args.tol, workers=args.workers)
    report = run_experiment(cfg, args.out)
    _emit(args, report, ["check", "passed"], list(report["checks"].items()))
    return EXIT_OK if report["passed"] else EXIT_CHECK


# --- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cantorcomb", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cantor", help="closed intervals and gaps at one level")
    _common(p, "lambda", "depth")
    p.set_defaults(func=cmd_cantor)

    p = sub.add_parser("comb", help="comb domain utilities")
    comb_sub = p.add_subparsers(dest="comb_command", required=True)
    r = comb_sub.add_parser("render", help="SVG and tent polyline")
    _common(r, "lambda", "depth")
    r.set_defaults(func=cmd_render)

    p = sub.add_parser("integral", help="curve integral between two complement points")
    _common(p, "lambda", "p", "tol")
    p.add_argument("--x", type=float, nargs=2, required=True, metavar=("X", "Y"))
    p.add_argument("--y", type=float, nargs=2, required=True, metavar=("X", "Y"))
    p.set_defaults(func=cmd_integral)

    p = sub.add_parser("estimate-c", help="empirical curve-condition constant")
    _common(p, "lambda", "p", "pairs", "seed", "c-const", "tol")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_estimate_c)

    p = sub.add_parser("detect", help="two-sided point detection")
    _common(p, "lambda", "resolution")
    p.add_argument("--center", type=float, nargs=2, metavar=("X", "Y"),
                   help="single centre; default runs the endpoint corpus plus controls")
    p.add_argument("--corpus-level", type=int, default=5)
    p.add_argument("--i-min", type=int, default=3)
    p.add_argument("--i-max", type=int, default=8)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("dim", help="dimension estimators")
    p.add_argument("method", choices=("box", "net"))
    _common(p, "lambda", "depth")
    p.add_argument("--points", type=Path, help="CSV with a header and x[,y] columns")
    p.add_argument("--scale-levels", type=int, nargs=2, metavar=("FIRST", "LAST"),
                   help="box scales lambda**FIRST .. lambda**LAST")
    p.add_argument("--net-ratio", type=float, default=0.5)
    p.add_argument("--i0", type=int, default=1)
    p.set_defaults(func=cmd_dim)

    p = sub.add_parser("bound", help="dimension bound for a curve-condition constant")
    _common(p, "p")
    p.add_argument("--C", type=float, required=True)
    p.add_argument("--check-lambda", type=float, default=None,
                   help="compare against the exact dimension of this comb")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("sharpness", help="finite-grid sharpness checks")
    _common(p, "p", "c-const")
    p.add_argument("--grid", type=int, default=1000)
    p.add_argument("--coeff", type=float, default=bounds.FP_COEFF,
                   help="middle coefficient of f_p (perturb for a negative control)")
    p.add_argument("--C", type=float, default=None, help="also solve for lambda_C")
    p.set_defaults(func=cmd_sharpness)

    p = sub.add_parser("experiment", help="full pipeline with report files")
    _common(p, "lambda", "p", "depth", "resolution", "pairs", "seed", "c-const", "tol")
    p.add_argument("--config", type=Path, default=None, help="JSON config with the same keys")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (AdmissibilityError, ValueError, json.JSONDecodeError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (StageError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
