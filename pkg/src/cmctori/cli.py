"""Command-line front end.

Subcommands: curve-info, classify, deform, search, density-scan, verify.
Every run echoes its fully resolved configuration inside the JSON output, so
results are reproducible from the output alone.  Identical configuration and
seed produce byte-identical JSON; wall-clock metadata goes to a ``.meta.json``
sidecar next to ``--out`` files, never into the results.

Exit codes: 0 success (classify: curve in the regular set); 2 parse or
validation error; 3 classify: basis polynomials share a root; 4 classify:
neither set; 5 search: no certificate found; 1 verification failure or
internal error.
"""

from __future__ import annotations

import argparse
import datetime
import sys
import time

import numpy as np

from . import jsonio
from .bspace import compute_b_basis
from .curve import (
    adapted_homology,
    branch_points,
    curve_to_dict,
    from_roots,
    load_curve,
    validate,
)
from .deform import build_handle_family, handle_limit_check, track_f_degree
from .errors import CmctoriError, DomainError, ParseError
from .invariants import align_basis_at, classify
from .jsonio import complex_pair
from .periods import QuadratureConfig
from .search import (
    certificate_to_dict,
    density_scan,
    search_torus,
)
from .verify import run_suite

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INVALID = 2
EXIT_IN_S = 3
EXIT_NEITHER = 4
EXIT_NOT_FOUND = 5


def _status(line: str):
    print(f"status: {line}", file=sys.stderr)


def _emit(doc: dict, out: str | None, started: float):
    text = jsonio.dumps(doc)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
        meta = {
            "written_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "runtime_seconds": time.time() - started,
        }
        with open(out + ".meta.json", "w") as fh:
            fh.write(jsonio.dumps(meta))
    else:
        sys.stdout.write(text)


def _parse_complex(text: str) -> complex:
    try:
        re_s, im_s = text.split(",")
        return complex(float(re_s), float(im_s))
    except ValueError as exc:
        raise ParseError(f"expected 're,im', got {text!r}") from exc


def _parse_sym_deg(text: str):
    try:
        a, b = (float(x) for x in text.split(","))
    except ValueError as exc:
        raise ParseError(f"expected two angles 'deg1,deg2', got {text!r}") from exc
    return complex(np.exp(1j * np.radians(a))), complex(np.exp(1j * np.radians(b)))


def _quad_config(args) -> QuadratureConfig:
    return QuadratureConfig(
        base_nodes=args.base_nodes,
        max_refinements=args.max_refinements,
        rel_tol=args.rel_tol,
    )


def _quad_dict(cfg: QuadratureConfig) -> dict:
    return {
        "base_nodes": cfg.base_nodes,
        "max_refinements": cfg.max_refinements,
        "rel_tol": cfg.rel_tol,
    }


def cmd_curve_info(args) -> int:
    started = time.time()
    curve, sym = load_curve(args.curve)
    diagnostics = validate(curve)
    pts = branch_points(curve)
    doc = {
        "config": {"command": "curve-info", "curve_file": args.curve},
        "genus": curve.genus,
        "etas": [complex_pair(e) for e in curve.etas],
        "a_coefficients": [complex_pair(c) for c in curve.a.coeffs],
        "branch_points": [
            "infinity" if not np.isfinite(p) else complex_pair(p) for p in pts
        ],
        "reality_residual": diagnostics["reality_residual"],
        "positivity_min": diagnostics["positivity_min"],
        "min_branch_gap": diagnostics["min_branch_gap"]
        if np.isfinite(diagnostics["min_branch_gap"])
        else "infinity",
        "sym": [complex_pair(s) for s in sym] if sym else None,
        "valid": True,
    }
    _emit(doc, args.out, started)
    _status(f"ok genus={curve.genus}")
    return EXIT_OK


def cmd_classify(args) -> int:
    started = time.time()
    curve, _ = load_curve(args.curve)
    cfg = _quad_config(args)
    atlas = adapted_homology(curve)
    basis = compute_b_basis(curve, atlas, cfg)
    label = classify(curve, basis, tol_s=args.tol_s, tol_r=args.tol_r)
    doc = {
        "config": {
            "command": "classify",
            "curve_file": args.curve,
            "tol_S": args.tol_s,
            "tol_R": args.tol_r,
            "quadrature": _quad_dict(cfg),
        },
        "genus": curve.genus,
        "in_S": label.in_S,
        "in_R": label.in_R,
        "discriminant": complex_pair(label.discriminant),
        "residue_sum": complex_pair(label.residue_sum),
        "degree_f": label.degree_f,
        "b1": [complex_pair(c) for c in basis.b1.coeffs],
        "b2": [complex_pair(c) for c in basis.b2.coeffs],
        "a_period_residual": basis.a_period_residual,
    }
    _emit(doc, args.out, started)
    if label.in_R:
        _status("ok in_R")
        return EXIT_OK
    if label.in_S:
        _status("ok in_S")
        return EXIT_IN_S
    _status("ok neither")
    return EXIT_NEITHER


def cmd_deform(args) -> int:
    started = time.time()
    curve, _ = load_curve(args.curve)
    alpha = _parse_complex(args.alpha)
    t_seq = tuple(float(t) for t in args.t_seq.split(","))
    cfg = _quad_config(args)
    atlas = adapted_homology(curve)
    basis = compute_b_basis(curve, atlas, cfg)
    aligned = align_basis_at(basis, alpha)
    fam = build_handle_family(curve, aligned, alpha, t_seq, cfg)
    limit = handle_limit_check(fam)
    degrees = track_f_degree(fam)
    members = []
    for m, deg in zip(fam.members, degrees):
        members.append(
            {
                "t": m.t,
                "etas": [complex_pair(e) for e in m.curve.etas],
                "b1": [complex_pair(c) for c in m.basis.b1.coeffs],
                "b2": [complex_pair(c) for c in m.basis.b2.coeffs],
                "deg_f": deg.deg_f,
                "df_roots": [complex_pair(r) for r in deg.w_roots],
                "new_df_roots": [complex_pair(r) for r in deg.new_roots],
            }
        )
    doc = {
        "config": {
            "command": "deform",
            "curve_file": args.curve,
            "alpha": complex_pair(alpha),
            "t_seq": list(t_seq),
            "quadrature": _quad_dict(cfg),
        },
        "genus": curve.genus,
        "sqrt_alpha_bar": complex_pair(fam.sqrt_alpha_bar),
        "members": members,
        "residue_sums": [complex_pair(s) for s in limit.sums],
        "extrapolated": complex_pair(limit.extrapolated),
        "target": complex_pair(limit.target),
        "limit_error": limit.error,
        "observed_order": limit.observed_order,
        "limit_ok": limit.ok,
    }
    _emit(doc, args.out, started)
    if args.csv:
        lines = ["t,residue_re,residue_im,gap_to_target,deg_f,new_roots_on_circle"]
        for m, s, deg in zip(fam.members, limit.sums, degrees):
            on_circle = int(np.sum(deg.new_circle_dists < 1e-2))
            lines.append(
                f"{m.t!r},{s.real!r},{s.imag!r},{abs(s - limit.target)!r},"
                f"{deg.deg_f},{on_circle}"
            )
        with open(args.csv, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    _status(f"ok limit_error={limit.error:.3e}")
    return EXIT_OK if limit.ok else EXIT_FAIL


def cmd_search(args) -> int:
    started = time.time()
    lam1, lam2 = _parse_sym_deg(args.sym_deg)
    cfg = _quad_config(args)
    start = None
    if args.etas:
        start = from_roots([_parse_complex(s) for s in args.etas.split(";")])
        if start.genus != args.g:
            raise ParseError("--etas genus does not match --g")
    outcome = search_torus(
        args.g, lam1, lam2, q=args.q, seed=args.seed, cfg=cfg, start=start
    )
    config = {
        "command": "search",
        "g": args.g,
        "sym_deg": args.sym_deg,
        "Q": args.q,
        "seed": args.seed,
        "quadrature": _quad_dict(cfg),
    }
    if outcome.ok:
        doc = certificate_to_dict(outcome.certificate)
        doc["config"] = config
        _emit(doc, args.out, started)
        _status(f"ok residual={outcome.certificate.residual:.3e}")
        return EXIT_OK
    doc = {
        "config": config,
        "found": False,
        "attempts": outcome.attempts,
        "best_distance": outcome.best_distance,
        "message": outcome.message,
    }
    _emit(doc, args.out, started)
    _status("not-found")
    return EXIT_NOT_FOUND


def cmd_density_scan(args) -> int:
    started = time.time()
    lam1, lam2 = _parse_sym_deg(args.sym_deg)
    cfg = _quad_config(args)
    q_list = tuple(int(q) for q in args.q_list.split(","))
    result = density_scan(
        args.g, lam1, lam2, args.samples, q_list,
        seed=args.seed, cfg=cfg, workers=args.workers,
    )
    rows = []
    for row in result.rows:
        rows.append(
            {
                "index": row.index,
                "etas": [complex_pair(e) for e in row.etas],
                "in_R": row.in_R,
                "abs_residue": row.abs_residue,
                "abs_delta": row.abs_delta,
                "distances": {str(q): row.distances[q] for q in q_list},
            }
        )
    doc = {
        "config": {
            "command": "density-scan",
            "g": args.g,
            "sym_deg": args.sym_deg,
            "samples": args.samples,
            "Q_list": list(q_list),
            "seed": args.seed,
            "workers": args.workers,
            "quadrature": _quad_dict(cfg),
        },
        "medians": {str(q): result.medians[q] for q in q_list},
        "r_fraction": result.r_fraction,
        "resamples": result.resamples,
        "rows": rows,
    }
    _emit(doc, args.out, started)
    if args.csv:
        header = "sample,in_R,abs_residue,abs_delta," + ",".join(
            f"dist_Q{q}" for q in q_list
        )
        lines = [header]
        for row in result.rows:
            dists = ",".join(repr(row.distances[q]) for q in q_list)
            lines.append(
                f"{row.index},{int(row.in_R)},{row.abs_residue!r},"
                f"{row.abs_delta!r},{dists}"
            )
        with open(args.csv, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    _status(f"ok r_fraction={result.r_fraction:.3f}")
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_suite(suite=args.suite, curve_file=args.curve)
    if not results:
        _status(f"error kind=ParseError msg=unknown suite {args.suite!r}")
        return EXIT_INVALID
    failed = 0
    for name, passed, margin in results:
        tag = "PASS" if passed else "FAIL"
        print(f"[{tag}] {name}: {margin}")
        failed += 0 if passed else 1
    print(f"{len(results) - failed}/{len(results)} checks passed")
    _status("ok all passed" if failed == 0 else f"failed checks={failed}")
    return EXIT_OK if failed == 0 else EXIT_FAIL


def _add_quadrature_args(p):
    p.add_argument("--base-nodes", type=int, default=256,
                   help="quadrature nodes at the base refinement level")
    p.add_argument("--max-refinements", type=int, default=6,
                   help="maximum node-doubling steps")
    p.add_argument("--rel-tol", type=float, default=1e-10,
                   help="self-convergence tolerance between refinement levels")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cmctori",
        description="Spectral curves of finite-type sinh-Gordon solutions and "
                    "the search for CMC torus data in the 3-sphere.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curve-info", help="validate a curve file and print its data")
    p.add_argument("curve", help="curve JSON file: {genus, etas: [[re,im],...], sym?}")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_curve_info)

    p = sub.add_parser("classify", help="discriminant / residue-sum classification")
    p.add_argument("curve")
    p.add_argument("--tol-s", type=float, default=1e-8,
                   help="shared-root threshold on the discriminant")
    p.add_argument("--tol-r", type=float, default=1e-8,
                   help="nonvanishing threshold on the residue sum")
    p.add_argument("--out")
    _add_quadrature_args(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser(
        "deform",
        help="attach a handle at alpha and track the residue-sum limit law",
    )
    p.add_argument("curve")
    p.add_argument("--alpha", required=True, help="unit-circle point 're,im'")
    p.add_argument("--t-seq", default="0.2,0.1,0.05,0.025",
                   help="decreasing positive handle sizes")
    p.add_argument("--out")
    p.add_argument("--csv", help="CSV: t,residue_re,residue_im,gap_to_target,"
                                 "deg_f,new_roots_on_circle")
    _add_quadrature_args(p)
    p.set_defaults(func=cmd_deform)

    p = sub.add_parser("search", help="sample, refine and certify a torus datum")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--sym-deg", default="90,270",
                   help="Sym points as unit-circle angles in degrees")
    p.add_argument("--Q", dest="q", type=int, default=8,
                   help="entry bound for the integer target vectors")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--etas", help="start roots 're,im;re,im;...' instead of sampling")
    p.add_argument("--out")
    _add_quadrature_args(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("density-scan",
                       help="Monte-Carlo table of plane distances per entry bound")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--Q-list", dest="q_list", default="4,8,16,32")
    p.add_argument("--sym-deg", default="90,270")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--csv", help="CSV: sample,in_R,abs_residue,abs_delta,dist_Q*")
    _add_quadrature_args(p)
    p.set_defaults(func=cmd_density_scan)

    p = sub.add_parser("verify", help="run the verification battery")
    p.add_argument("--suite", help="dotted prefix filter, e.g. 'limits' or 'polyalg'")
    p.add_argument("--curve", help="also check this curve file's invariants")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, DomainError) as exc:
        _status(f"error kind={type(exc).__name__} msg={exc}")
        return EXIT_INVALID
    except CmctoriError as exc:
        _status(f"error kind={type(exc).__name__} msg={exc}")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
