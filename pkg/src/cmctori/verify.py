"""Named verification battery behind the ``verify`` CLI command.

Each check returns (passed, margin_message).  Checks are grouped by a dotted
prefix so a suite filter like ``limits`` runs only the residue-limit checks.
Fixtures are tiny so the default battery finishes in seconds; the exhaustive
version of these properties lives in the pytest suite.
"""

from __future__ import annotations

import math

import numpy as np

from .bspace import basis_from_coords, compute_b_basis, real_parametrization
from .curve import adapted_homology, from_roots, gamma_paths, load_curve, validate
from .deform import build_handle_family, handle_limit_check, track_f_degree
from .invariants import (
    align_basis_at,
    c_polynomials,
    classify,
    level_sum,
    mobius_act,
    residue_sum,
)
from .periods import QuadratureConfig, a_periods, integrate_theta, integrate_theta_many
from .polyalg import CPoly, coeffs_close, resultant, roots, star, wronskian
from .search import (
    certify,
    grassmann_plane,
    plane_distance,
)

CFG = QuadratureConfig()


def _check_star_involution():
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(0, 7))
        deg = int(rng.integers(0, n + 1))
        c = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
        p = CPoly(c)
        q = star(star(p, n), n)
        worst = max(worst, float(np.max(np.abs(q.array - p.array))))
    return worst < 1e-13, f"max involution defect {worst:.2e}"


def _check_wronskian_sl2():
    rng = np.random.default_rng(2)
    b1 = CPoly(rng.normal(size=4) + 1j * rng.normal(size=4))
    b2 = CPoly(rng.normal(size=4) + 1j * rng.normal(size=4))
    w = wronskian(b1, b2)
    worst = 0.0
    for _ in range(10):
        m = rng.normal(size=(2, 2))
        det = np.linalg.det(m)
        if abs(det) < 0.1:
            continue
        m /= np.sqrt(abs(det))
        det = np.linalg.det(m)
        t1 = m[0, 0] * b1 + m[0, 1] * b2
        t2 = m[1, 0] * b1 + m[1, 1] * b2
        diff = (wronskian(t1, t2) - det * w).array
        worst = max(worst, float(np.max(np.abs(diff))))
    return worst < 1e-10, f"max invariance defect {worst:.2e}"


def _check_resultant():
    rng = np.random.default_rng(3)
    ok = True
    for _ in range(10):
        p = CPoly(rng.normal(size=4) + 1j * rng.normal(size=4))
        q = CPoly(rng.normal(size=3) + 1j * rng.normal(size=3))
        shared = complex(rng.normal(), rng.normal())
        if abs(resultant(p, q)) < 1e-8:
            ok = False
        ps = p * CPoly([-shared, 1.0])
        qs = q * CPoly([-shared, 1.0])
        if abs(resultant(ps, qs)) > 1e-5 * (1 + abs(resultant(p, q))) * 100:
            ok = False
    return ok, "coprime pairs nonzero, shared-root pairs vanish"


def _check_roots_roundtrip():
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(10):
        deg = int(rng.integers(1, 9))
        c = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
        c[-1] += 1.0
        p = CPoly(c)
        rec = CPoly([p.coeffs[-1]])
        for r in roots(p):
            rec = rec * CPoly([-r, 1.0])
        scale = 1.0 + float(np.max(np.abs(p.array)))
        worst = max(worst, float(np.max(np.abs(rec.array - p.array))) / scale)
    return worst < 1e-10, f"max reconstruction error {worst:.2e}"


def _check_from_roots_reality():
    c = from_roots([0.5, -0.3 + 0.4j])
    d = validate(c)
    ok = d["reality_residual"] < 1e-14 and d["positivity_min"] > 0
    return ok, (
        f"reality residual {d['reality_residual']:.2e}, "
        f"positivity min {d['positivity_min']:.3f}"
    )


def _check_monodromy():
    c = from_roots([0.5])
    th = np.linspace(0.0, 2.0 * np.pi, 600)
    path = 0.5 + 0.1 * np.exp(1j * th)
    from .curve import y_continue

    w0 = path[0] * complex(c.a(path[0]))
    y0 = complex(np.sqrt(w0))
    y = y_continue(c, path, y0)
    flip = abs(y[-1] + y0) / (1.0 + abs(y0))
    return flip < 1e-8, f"sign-flip defect {flip:.2e}"


def _check_genus0_closed_form():
    rng = np.random.default_rng(5)
    c0 = from_roots([])
    worst = 0.0
    for _ in range(20):
        cc = complex(rng.normal(), rng.normal())
        th = float(rng.uniform(-np.pi, np.pi))
        b = CPoly([cc, np.conj(cc)])
        g1, _ = gamma_paths(c0, np.exp(1j * th), np.exp(1j * (th + 1.0)))
        val = integrate_theta(c0, b, g1, CFG, expect_sheet_flip=True)
        thp = th % (2.0 * np.pi)
        root = np.exp(1j * thp / 2.0)
        pred = -2.0 * (2.0 * (np.conj(cc) * root - cc / root))
        worst = max(worst, abs(val - pred) / (1.0 + abs(pred)))
    return worst < 1e-10, f"max closed-form error {worst:.2e}"


def _check_a_reality():
    rng = np.random.default_rng(6)
    worst = 0.0
    for etas in ([0.5], [0.4, -0.3 + 0.35j]):
        c = from_roots(etas)
        atlas = adapted_homology(c)
        coeffs = rng.normal(size=c.genus + 2)
        b = sum(
            (float(x) * e for x, e in zip(coeffs, real_parametrization(c.genus))),
            CPoly([]),
        )
        ap = a_periods(c, b, atlas, CFG)
        worst = max(worst, float(np.max(np.abs(ap.imag))))
    return worst < 1e-8, f"max Im(A-period) {worst:.2e}"


def _check_node_doubling():
    c = from_roots([0.5])
    atlas = adapted_homology(c)
    b = CPoly([0.0, 1.0])
    v1 = integrate_theta_many(c, [b], atlas.a_cycles[0], CFG)[0]
    v2 = integrate_theta_many(c, [b], atlas.a_cycles[0], CFG.doubled())[0]
    rel = abs(v1 - v2) / (1.0 + abs(v1))
    return rel < 1e-10, f"doubling change {rel:.2e}"


def _check_rank_law():
    ok = True
    msgs = []
    for etas in ([0.5], [0.4, -0.3 + 0.35j]):
        c = from_roots(etas)
        atlas = adapted_homology(c)
        basis, diag = compute_b_basis(c, atlas, CFG, return_diagnostics=True)
        s = diag["singular_values"]
        ok = ok and len(s) == c.genus and basis.a_period_residual < 1e-8
        msgs.append(f"g={c.genus}: sigma_min {s[-1]:.2e}")
    return ok, "; ".join(msgs)


def _check_span_stability():
    c = from_roots([0.5])
    atlas = adapted_homology(c)
    _, d1 = compute_b_basis(c, atlas, CFG, return_diagnostics=True)
    _, d2 = compute_b_basis(c, atlas, CFG.doubled(), return_diagnostics=True)
    dist = plane_distance(np.stack(d1["coords"], 1), np.stack(d2["coords"], 1))
    return dist < 1e-8, f"kernel span shift {dist:.2e}"


def _g0_basis():
    return basis_from_coords(0, [1.0, 0.0], [0.0, 1.0])


def _check_residue_base():
    val = residue_sum(CPoly([1.0]), CPoly([1.0, 1.0]), CPoly([1j, -1j]))
    err = abs(val - (-0.5j))
    return err < 1e-12, f"base residue error {err:.2e}"


def _check_level_constancy():
    rng = np.random.default_rng(7)
    c = from_roots([0.5])
    atlas = adapted_homology(c)
    basis = compute_b_basis(c, atlas, CFG)
    base = residue_sum(c.a, basis.b1, basis.b2)
    worst = 0.0
    for _ in range(5):
        p = complex(rng.normal(), rng.normal()) * 2.0
        worst = max(worst, abs(level_sum(c.a, basis.b1, basis.b2, p) - base))
    return worst < 1e-7 * (1 + abs(base)), f"max level deviation {worst:.2e}"


def _check_mobius_covariance():
    rng = np.random.default_rng(8)
    c = from_roots([0.5])
    atlas = adapted_homology(c)
    basis = compute_b_basis(c, atlas, CFG)
    base = residue_sum(c.a, basis.b1, basis.b2)
    worst = 0.0
    for _ in range(20):
        m = rng.normal(size=(2, 2)) * 1.5
        det = np.linalg.det(m)
        if abs(det) < 0.1:
            continue
        out = mobius_act(basis, m)
        val = residue_sum(c.a, out.b1, out.b2)
        worst = max(worst, abs(val * det - base) / (1 + abs(base)))
    return worst < 1e-8, f"max covariance defect {worst:.2e}"


def _check_residue_closure():
    c = from_roots([0.4, -0.3 + 0.35j])
    atlas = adapted_homology(c)
    basis = compute_b_basis(c, atlas, CFG)
    s1 = residue_sum(c.a, basis.b1, basis.b2)
    s2 = residue_sum(c.a, basis.b2, basis.b1)
    err = abs(s1 + s2)
    return err < 1e-8 * (1 + abs(s1)), f"closure defect {err:.2e}"


def _check_bezout():
    c = from_roots([0.5])
    atlas = adapted_homology(c)
    basis = compute_b_basis(c, atlas, CFG)
    c1, c2 = c_polynomials(c.a, basis.b1, basis.b2)
    resid = (c1 * basis.b2 - c2 * basis.b1 - c.a).array
    err = float(np.max(np.abs(resid))) if resid.size else 0.0
    label = classify(c, basis)
    deg_match = (c1.degree == c.genus) == label.in_R
    return err < 1e-10 and deg_match, f"Bezout residual {err:.2e}, degree law {deg_match}"


def _check_induction_step():
    fam = build_handle_family(from_roots([]), _g0_basis(), 1.0, (0.05,), CFG)
    rep = track_f_degree(fam)[0]
    ok = rep.deg_f == 2 and len(rep.new_roots) == 2 and np.all(
        rep.new_circle_dists < 1e-3
    )
    return ok, (
        f"deg f {rep.deg_f}, new roots {len(rep.new_roots)}, "
        f"max ||root|-1| {np.max(rep.new_circle_dists):.2e}"
    )


def _check_residue_limit_genus0():
    aligned = align_basis_at(_g0_basis(), 1.0)
    fam = build_handle_family(
        from_roots([]), aligned, 1.0, (0.2, 0.1, 0.05, 0.025), CFG
    )
    rep = handle_limit_check(fam)
    return rep.ok and abs(rep.target - 0.5j) < 1e-12, (
        f"limit error {rep.error:.2e}, order {rep.observed_order:.2f}"
    )


def _check_residue_limit_genus1():
    base = from_roots([math.exp(-0.35)])
    atlas = adapted_homology(base)
    basis = compute_b_basis(base, atlas, CFG)
    aligned = align_basis_at(basis, 1j)
    fam = build_handle_family(base, aligned, 1j, (0.2, 0.1, 0.05, 0.025), CFG)
    rep = handle_limit_check(fam)
    return rep.ok, f"limit error {rep.error:.2e}, order {rep.observed_order:.2f}"


def _check_plane_basis_independence():
    rng = np.random.default_rng(9)
    c = from_roots([0.5])
    atlas = adapted_homology(c)
    basis = compute_b_basis(c, atlas, CFG)
    plane = grassmann_plane(c, 1j, -1j, atlas, CFG, basis=basis)
    worst = 0.0
    for _ in range(3):
        m = rng.normal(size=(2, 2))
        if abs(np.linalg.det(m)) < 0.2:
            continue
        p2 = grassmann_plane(c, 1j, -1j, atlas, CFG, basis=mobius_act(basis, m))
        worst = max(worst, plane_distance(plane.frame, p2.frame))
    return worst < 1e-8, f"max principal angle {worst:.2e}"


def _check_genus0_certificate():
    cert = certify(from_roots([]), 1j, -1j, [1, 0], [0, 1], CFG)
    return cert.residual < 1e-10, f"residual {cert.residual:.2e}"


CHECKS = [
    ("polyalg.star_involution", _check_star_involution),
    ("polyalg.wronskian_sl2", _check_wronskian_sl2),
    ("polyalg.resultant_common_root", _check_resultant),
    ("polyalg.roots_roundtrip", _check_roots_roundtrip),
    ("curve.reality_positivity", _check_from_roots_reality),
    ("curve.monodromy", _check_monodromy),
    ("periods.genus0_closed_form", _check_genus0_closed_form),
    ("periods.a_reality", _check_a_reality),
    ("periods.node_doubling", _check_node_doubling),
    ("bspace.rank_law", _check_rank_law),
    ("bspace.span_stability", _check_span_stability),
    ("invariants.residue_base", _check_residue_base),
    ("invariants.level_constancy", _check_level_constancy),
    ("invariants.mobius_covariance", _check_mobius_covariance),
    ("invariants.residue_closure", _check_residue_closure),
    ("invariants.bezout", _check_bezout),
    ("degrees.induction_step", _check_induction_step),
    ("limits.residue_limit_genus0", _check_residue_limit_genus0),
    ("limits.residue_limit_genus1", _check_residue_limit_genus1),
    ("planes.basis_independence", _check_plane_basis_independence),
    ("planes.genus0_certificate", _check_genus0_certificate),
]


def run_suite(suite: str | None = None, curve_file: str | None = None):
    """Run the battery (optionally filtered by dotted prefix); returns a list
    of (name, passed, margin_message)."""
    selected = [
        (name, fn)
        for name, fn in CHECKS
        if suite is None or name.startswith(suite)
    ]
    results = []
    if curve_file is not None:

        def _file_check():
            curve, _ = load_curve(curve_file)
            d = validate(curve)
            ok = d["reality_residual"] < 1e-14 and d["positivity_min"] > 0
            return ok, (
                f"genus {curve.genus}, reality {d['reality_residual']:.2e}, "
                f"positivity min {d['positivity_min']:.3e}"
            )

        selected.insert(0, ("file.invariants", _file_check))
    for name, fn in selected:
        try:
            passed, margin = fn()
        except Exception as exc:  # a raising check is a failing check
            passed, margin = False, f"{type(exc).__name__}: {exc}"
        results.append((name, bool(passed), margin))
    return results
