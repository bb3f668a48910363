"""Handle attachment and the induced deformation of the admissible basis.

Attaching a handle at a unit-circle point alpha multiplies a by the factor
(lambda - alpha e^t)(conj(alpha) lambda - e^{-t}), which adds the root pair
alpha e^{-|t|}, alpha e^{|t|}.  That literal factor equals
2 cos(arg lambda - arg alpha) - 2 cosh t < 0 on the unit circle, so the
positivity-normalised curve carries the opposite sign: attach_handle returns
the normalised polynomial (minus the literal product).

Flipping the sign of a rescales y by +-i, which exchanges the star-symmetric
and star-antisymmetric admissible polynomials.  The compensating convention
used throughout this module is the map b -> i b: the deformed family is the
unique star-symmetric member of the admissible plane of the normalised
member curve with

    b_t(0) = -i alpha sqrt(conj(alpha)) b(0),

whose t -> 0 limit is  i sqrt(conj(alpha)) (lambda - alpha) b.  With this
convention the residue sums of the normalised data reproduce the limit law

    lim_{t->0} sum Res a_t/(b_{1t} b_{2t}) =
        sum Res a/(b_1 b_2) - 2 Res_alpha a/(b_1 b_2)

verbatim, because the two sign twists cancel inside a/(b1 b2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bspace import BBasis, compute_b_basis
from .curve import SpectralCurve, adapted_homology, from_roots
from .errors import (
    DegenerationError,
    DomainError,
    DoublePointError,
    PreconditionError,
)
from .invariants import discriminant_delta, f_degree, residue_sum
from .periods import QuadratureConfig
from .polyalg import CPoly, roots, wronskian

__all__ = [
    "HandleFamily",
    "FamilyMember",
    "attach_handle",
    "build_handle_family",
    "deform_b_family",
    "b_limit_polys",
    "track_f_degree",
    "handle_limit_check",
    "DegreeReport",
    "LimitReport",
]


@dataclass(frozen=True)
class FamilyMember:
    t: float
    curve: SpectralCurve
    basis: BBasis  # the deformed pair (b_1t, b_2t)


@dataclass(frozen=True)
class HandleFamily:
    base: SpectralCurve
    base_basis: BBasis
    alpha: complex
    sqrt_alpha_bar: complex  # the chosen square root of conj(alpha)
    t_values: tuple
    members: tuple


@dataclass(frozen=True)
class DegreeReport:
    t: float
    deg_f: int
    w_roots: np.ndarray
    new_roots: np.ndarray
    new_circle_dists: np.ndarray


@dataclass(frozen=True)
class LimitReport:
    t_values: tuple
    sums: tuple
    extrapolated: complex
    target: complex
    error: float
    disagreement: float
    observed_order: float
    ok: bool


def attach_handle(curve: SpectralCurve, alpha: complex, t: float) -> SpectralCurve:
    """The genus g+1 curve with the extra root pair at alpha e^{-|t|} and its
    mirror alpha e^{|t|} (normalised sign, see module docstring)."""
    alpha = complex(alpha)
    if abs(abs(alpha) - 1.0) > 1e-9:
        raise DomainError(f"alpha = {alpha} must lie on the unit circle")
    if t == 0.0:
        raise DoublePointError(
            "t = 0 creates an ordinary double point; only limits t -> 0 are taken"
        )
    new_eta = alpha * math.exp(-abs(t))
    return from_roots(tuple(curve.etas) + (new_eta,))


def _solve_member_basis(member_curve, alpha, sqrt_ab, base_basis, cfg):
    """The deformed pair inside the member's admissible plane, pinned by the
    value condition b_t(0) = -i alpha sqrt(conj(alpha)) b(0)."""
    atlas = adapted_homology(member_curve)
    plane = compute_b_basis(member_curve, atlas, cfg)
    v1, v2 = plane.b1, plane.b2
    v10 = complex(v1(0.0))
    v20 = complex(v2(0.0))
    m = np.asarray([[v10.real, v20.real], [v10.imag, v20.imag]])
    det = np.linalg.det(m)
    if abs(det) < 1e-10 * (1.0 + np.max(np.abs(m))):
        raise DegenerationError(
            "value map of the admissible plane at 0 is singular", t_min=None
        )
    out = []
    for b in base_basis.polys:
        target = -1j * alpha * sqrt_ab * complex(b(0.0))
        x = np.linalg.solve(m, np.asarray([target.real, target.imag]))
        out.append(float(x[0]) * v1 + float(x[1]) * v2)
    gram = np.asarray(
        [
            [_inner(out[0], out[0]), _inner(out[0], out[1])],
            [_inner(out[1], out[0]), _inner(out[1], out[1])],
        ]
    )
    return BBasis(
        b1=out[0], b2=out[1], gram=gram, a_period_residual=plane.a_period_residual
    )


def _inner(p, q):
    n = max(len(p.coeffs), len(q.coeffs), 1)
    a = np.zeros(n, dtype=complex)
    b = np.zeros(n, dtype=complex)
    a[: len(p.coeffs)] = p.array
    b[: len(q.coeffs)] = q.array
    return float(np.real(np.sum(a * np.conj(b))))


def build_handle_family(
    curve: SpectralCurve,
    basis: BBasis,
    alpha: complex,
    t_values,
    cfg: QuadratureConfig = QuadratureConfig(),
    sqrt_branch: int = +1,
) -> HandleFamily:
    """Member curves and deformed bases for every t in ``t_values``.

    t_values must be positive and decreasing.  The square-root branch of
    conj(alpha) is part of the family's identity.
    """
    alpha = complex(alpha)
    ts = tuple(float(t) for t in t_values)
    if any(t == 0.0 for t in ts):
        raise DoublePointError(
            "t = 0 in the family grid: the double point is only reached by "
            "extrapolation"
        )
    if not ts or any(t <= 0.0 for t in ts):
        raise DomainError("t_values must be positive (the t = 0 limit is extrapolated)")
    if list(ts) != sorted(ts, reverse=True):
        raise DomainError("t_values must be strictly decreasing")
    sqrt_ab = sqrt_branch * complex(np.sqrt(np.conj(alpha)))
    members = []
    last_good = None
    for t in ts:
        member_curve = attach_handle(curve, alpha, t)
        try:
            member_basis = _solve_member_basis(member_curve, alpha, sqrt_ab, basis, cfg)
        except DegenerationError as exc:
            raise DegenerationError(
                f"member basis solve failed at t = {t:g}", t_min=last_good
            ) from exc
        members.append(FamilyMember(t=t, curve=member_curve, basis=member_basis))
        last_good = t
    return HandleFamily(
        base=curve,
        base_basis=basis,
        alpha=alpha,
        sqrt_alpha_bar=sqrt_ab,
        t_values=ts,
        members=tuple(members),
    )


def deform_b_family(fam: HandleFamily):
    """The per-t deformed bases, aligned across t by the value condition."""
    return tuple(m.basis for m in fam.members)


def b_limit_polys(fam: HandleFamily):
    """The t -> 0 limits i sqrt(conj(alpha)) (lambda - alpha) b_j."""
    factor = CPoly([-fam.alpha, 1.0]) * (1j * fam.sqrt_alpha_bar)
    return tuple(factor * b for b in fam.base_basis.polys)


def track_f_degree(fam: HandleFamily, tol: float = 1e-8):
    """Per-t degree of f_t = b_1t/b_2t and location of the Wronskian roots.

    Requires the base to be outside the shared-root locus with the Wronskian
    not vanishing at alpha (df nonsingular there).
    """
    base_b1, base_b2 = fam.base_basis.polys
    delta, scale = discriminant_delta(base_b1, base_b2)
    if abs(delta) < tol * scale:
        raise PreconditionError("base basis has a shared root (curve in the "
                                "degenerate locus)")
    # the top Wronskian coefficient cancels exactly in theory; trim the
    # floating-point remnant so the root count matches the degree bound
    w_base = wronskian(base_b1, base_b2).trim(1e-12)
    w_alpha = complex(w_base(fam.alpha))
    w_scale = 1.0 + max((abs(c) for c in w_base.coeffs), default=0.0)
    if abs(w_alpha) < 1e-8 * w_scale:
        raise PreconditionError(f"df vanishes at alpha = {fam.alpha:g}")
    base_roots = (
        roots(w_base, 1e-8) if w_base.degree > 0 else np.asarray([], dtype=complex)
    )
    reports = []
    for m in fam.members:
        deg = f_degree(m.basis.b1, m.basis.b2, tol)
        w_t = wronskian(m.basis.b1, m.basis.b2).trim(1e-12)
        r_t = roots(w_t, 1e-8) if w_t.degree > 0 else np.asarray([], dtype=complex)
        matched = set()
        remaining = []
        for r in r_t:
            if base_roots.size:
                dists = np.abs(base_roots - r)
                k = int(np.argmin(dists))
                if dists[k] < 0.3 and k not in matched:
                    matched.add(k)
                    continue
            remaining.append(r)
        new_roots = np.asarray(remaining, dtype=complex)
        reports.append(
            DegreeReport(
                t=m.t,
                deg_f=deg,
                w_roots=r_t,
                new_roots=new_roots,
                new_circle_dists=np.abs(np.abs(new_roots) - 1.0),
            )
        )
    return reports


def _neville_at_zero(xs, ys):
    """Polynomial extrapolation of (xs, ys) to x = 0 (Neville scheme).

    Returns the full-order extrapolant and the one using all points except
    the coarsest, for a disagreement estimate.
    """
    n = len(xs)
    tab = [complex(y) for y in ys]
    second_best = tab[-1]
    for m in range(1, n):
        new = []
        for k in range(n - m):
            x_lo, x_hi = xs[k], xs[k + m]
            val = (x_lo * tab[k + 1] - x_hi * tab[k]) / (x_lo - x_hi)
            new.append(val)
        tab = new
        if len(tab) == 2:
            second_best = tab[1]  # extrapolant dropping the coarsest point
    return tab[0], second_best


def handle_limit_check(fam: HandleFamily, target_tol: float = 1e-4) -> LimitReport:
    """Residue sums of the deformed family versus the limit law.

    Requires the base basis aligned so that b1(alpha) = 0 (use
    invariants.align_basis_at first); the base contribution at alpha is then
    the simple-root residue a(alpha) / (b1'(alpha) b2(alpha)).

    The family is even in t, so extrapolation runs in the variable t^2.
    """
    b1, b2 = fam.base_basis.polys
    v = complex(b1(fam.alpha))
    scale = 1.0 + max(abs(c) for c in b1.coeffs)
    if abs(v) > 1e-8 * scale:
        raise PreconditionError(
            f"base basis not aligned: b1(alpha) = {v:.3e}; rotate the basis first"
        )
    base_sum = residue_sum(fam.base.a, b1, b2)
    res_alpha = complex(fam.base.a(fam.alpha)) / (
        complex(b1.deriv()(fam.alpha)) * complex(b2(fam.alpha))
    )
    target = base_sum - 2.0 * res_alpha
    sums = tuple(
        residue_sum(m.curve.a, m.basis.b1, m.basis.b2) for m in fam.members
    )
    xs = [t * t for t in fam.t_values]
    extrapolated, prev = _neville_at_zero(xs, sums)
    disagreement = abs(extrapolated - prev)
    err = abs(extrapolated - target)
    resids = np.asarray([abs(s - extrapolated) for s in sums])
    ts = np.asarray(fam.t_values)
    good = resids > 1e-14
    if np.count_nonzero(good) >= 2:
        slope = np.polyfit(np.log(ts[good]), np.log(resids[good]), 1)[0]
    else:
        slope = math.inf
    return LimitReport(
        t_values=fam.t_values,
        sums=sums,
        extrapolated=complex(extrapolated),
        target=complex(target),
        error=float(err),
        disagreement=float(disagreement),
        observed_order=float(slope),
        ok=bool(err <= target_tol and disagreement <= target_tol),
    )
