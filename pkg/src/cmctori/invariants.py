"""Algebraic invariants of a curve with a chosen admissible basis (b1, b2).

The rational map f = b1/b2, the discriminant (zero exactly when b1 and b2
share a root), residue and level sums of a/(b1 b2), the Bezout pair
(c1, c2) with c1 b2 - c2 b1 = a, and the classification of a curve by
whether these invariants degenerate.

The residue sum over the roots of b1 scales by 1/det under real changes of
basis, so only its vanishing is intrinsic; values quoted anywhere assume the
stated basis.

Note on constants at genus zero: the reality symmetry that c1, c2 inherit
from a, b1, b2 shifts their coefficients by one degree and therefore cannot
hold verbatim for the constant (degree-0 = g) solutions that a genus-zero
curve produces; no such condition is imposed here at any genus.  The Bezout
residual and the degree/residue equivalences are what this module enforces.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bspace import BBasis
from .curve import INFINITY, SpectralCurve
from .errors import (
    AccuracyError,
    DegeneracyError,
    DomainError,
    SharedRootError,
)
from .polyalg import CPoly, roots, wronskian

__all__ = [
    "ClassLabel",
    "f_degree",
    "discriminant_delta",
    "residue_sum",
    "level_sum",
    "c_polynomials",
    "classify",
    "mobius_act",
    "align_basis_at",
]

TOL_S = 1e-8
TOL_R = 1e-8
CLUSTER_TOL = 1e-6
# Reconstruction tolerance for internal root finding: the polynomials here
# (Wronskians, deformed bases) routinely carry root clusters, which inflate
# the round-trip residual past the well-separated default.
ROOT_TOL = 1e-8


@dataclass(frozen=True)
class ClassLabel:
    in_S: bool
    in_R: bool
    residue_sum: complex
    discriminant: complex
    degree_f: int
    diagnostics: dict = field(default_factory=dict)


def _common_roots(r1, r2, tol):
    """Pairs (i, j) with |r1[i] - r2[j]| below tolerance."""
    pairs = []
    for i, x in enumerate(r1):
        for j, y in enumerate(r2):
            if abs(x - y) <= tol * (1.0 + abs(x)):
                pairs.append((i, j))
    return pairs


def f_degree(b1: CPoly, b2: CPoly, tol: float = TOL_S) -> int:
    """Degree of the rational map b1/b2 after cancelling common factors."""
    b1, b2 = CPoly(b1.coeffs), CPoly(b2.coeffs)
    if b1.degree < 0 and b2.degree < 0:
        raise DomainError("f undefined for two zero polynomials")
    if b1.degree < 0 or b2.degree < 0:
        return 0
    r1, r2 = roots(b1, ROOT_TOL), roots(b2, ROOT_TOL)
    shared = _common_roots(r1, r2, tol)
    cancelled = len({i for i, _ in shared})
    deg = max(b1.degree, b2.degree) - cancelled
    if deg == 0:
        raise DegeneracyError("b1 and b2 are proportional; f is constant")
    return deg


def discriminant_delta(b1: CPoly, b2: CPoly):
    """Product of all root differences of b1 and b2.

    Returns (delta, scale): the scale is the same product with the smallest
    factor replaced by 1 + max |root|, so |delta| < tol * scale is exactly a
    relative test on the closest root pair.
    """
    if b1.degree != b2.degree:
        raise DomainError(
            f"discriminant needs equal degrees, got {b1.degree} and {b2.degree}"
        )
    if b1.degree < 1:
        raise DomainError("discriminant needs non-constant polynomials")
    r1, r2 = roots(b1, ROOT_TOL), roots(b2, ROOT_TOL)
    diffs = (r1[:, None] - r2[None, :]).ravel()
    delta = complex(np.prod(diffs))
    mags = np.abs(diffs)
    k = int(np.argmin(mags))
    rest = np.prod(np.delete(mags, k)) if len(mags) > 1 else 1.0
    scale = float(rest) * (1.0 + float(np.max(np.abs(np.concatenate([r1, r2])))))
    return delta, scale


def _cluster(points, tol):
    """Group points into clusters of mutual distance below tol."""
    points = list(points)
    clusters = []
    used = [False] * len(points)
    for i, p in enumerate(points):
        if used[i]:
            continue
        group = [p]
        used[i] = True
        for j in range(i + 1, len(points)):
            if not used[j] and abs(points[j] - p) <= tol * (1.0 + abs(p)):
                group.append(points[j])
                used[j] = True
        clusters.append(group)
    return clusters


def residue_sum(a: CPoly, b1: CPoly, b2: CPoly) -> complex:
    """Sum over the roots of b1 of the residues of a/(b1 b2) dlambda.

    Simple roots use a(beta)/(b1'(beta) b2(beta)); root clusters are handled
    by a small-circle contour residue, which stays finite for multiple roots.
    """
    r1, r2 = roots(b1, ROOT_TOL), roots(b2, ROOT_TOL)
    if _common_roots(r1, r2, TOL_S):
        raise SharedRootError("b1 and b2 share a root; residue sum undefined")
    b1d = b1.deriv()
    total = 0.0 + 0.0j
    clusters = _cluster(r1, CLUSTER_TOL)
    others = list(r2)
    for idx, group in enumerate(clusters):
        center = sum(group) / len(group)
        if len(group) == 1:
            total += complex(a(center)) / (complex(b1d(center)) * complex(b2(center)))
            continue
        # contour residue around the cluster
        rest = [sum(g) / len(g) for k, g in enumerate(clusters) if k != idx] + others
        spread = max(abs(p - center) for p in group)
        nearest = min((abs(p - center) for p in rest), default=1.0)
        radius = 0.5 * (spread + nearest)
        if radius <= 2.0 * spread:
            raise AccuracyError(
                "cluster of b1 roots too close to other poles for a contour residue"
            )
        th = np.linspace(0.0, 2.0 * np.pi, 512, endpoint=False)
        z = center + radius * np.exp(1j * th)
        vals = a(z) / (b1(z) * b2(z)) * (z - center)
        total += complex(np.mean(vals))
    return total


def level_sum(a: CPoly, b1: CPoly, b2: CPoly, p) -> complex:
    """Sum of a / (b1' b2 - b2' b1) over the preimage f^{-1}(p).

    Independent of p.  p may be INFINITY (preimage: roots of b2).  A preimage
    escaping to lambda = infinity (p equal to the ratio of leading
    coefficients) contributes the limit value of a/W there.
    """
    w = wronskian(b1, b2).trim(1e-12)
    deg_full = max(b1.degree, b2.degree)
    if p is INFINITY or (isinstance(p, complex) and np.isinf(p)) or (
        isinstance(p, float) and np.isinf(p)
    ):
        level = b2
    else:
        level = (b1 - complex(p) * b2).trim(1e-13)
    total = 0.0 + 0.0j
    if level.degree < deg_full - 1:
        raise AccuracyError("level polynomial degenerates by two degrees or more")
    if level.degree == deg_full - 1:
        # one preimage at lambda = infinity: value of the rational function a/W
        if w.degree != 2 * deg_full - 2 or a.degree < 0:
            raise AccuracyError("a/W has no finite value at infinity")
        if a.degree < w.degree:
            pass  # contributes zero
        else:
            total += a.coeffs[-1] / w.coeffs[-1]
    if level.degree >= 1:
        for beta in roots(level, ROOT_TOL):
            denom = complex(w(beta))
            if abs(denom) < 1e-12 * (1.0 + abs(complex(a(beta)))):
                raise AccuracyError(
                    f"preimage {beta:.6g} is a critical point of f; "
                    "perturb p and retry"
                )
            total += complex(a(beta)) / denom
    return total


def c_polynomials(a: CPoly, b1: CPoly, b2: CPoly):
    """The unique degree <= g pair with c1 b2 - c2 b1 = a.

    Raises SharedRootError when b1, b2 are not coprime (the system is then
    singular and the pair is not unique).
    """
    n = max(b1.degree, b2.degree)  # = g + 1
    if n < 1:
        raise DomainError("b1, b2 must be non-constant")
    g = n - 1
    size = 2 * g + 2

    def conv_matrix(b):
        m = np.zeros((size, g + 1), dtype=complex)
        arr = b.array
        for col in range(g + 1):
            m[col : col + len(arr), col] = arr
        return m

    mat = np.hstack([conv_matrix(b2), -conv_matrix(b1)])
    rhs = np.zeros(size, dtype=complex)
    rhs[: len(a.coeffs)] = a.array
    if a.degree >= size:
        raise DomainError("deg a too large for the Bezout identity")
    try:
        sol, res, rank, sv = np.linalg.lstsq(mat, rhs, rcond=None)
    except np.linalg.LinAlgError as exc:
        raise SharedRootError(f"Bezout system singular: {exc}") from exc
    if rank < size or (sv[0] > 0 and sv[-1] < 1e-10 * sv[0]):
        raise SharedRootError(
            "Bezout system rank-deficient: b1 and b2 share a root "
            f"(singular values {sv[0]:.2e}..{sv[-1]:.2e})"
        )
    c1 = CPoly(sol[: g + 1])
    c2 = CPoly(sol[g + 1 :])
    resid = (c1 * b2 - c2 * b1 - a).array
    scale = 1.0 + max(abs(x) for x in a.coeffs) if a.coeffs else 1.0
    if resid.size and np.max(np.abs(resid)) > 1e-10 * scale:
        raise AccuracyError(
            f"Bezout residual {np.max(np.abs(resid)):.2e} exceeds tolerance",
            best=(c1, c2),
        )
    return c1, c2


def classify(
    curve: SpectralCurve,
    basis: BBasis,
    tol_s: float = TOL_S,
    tol_r: float = TOL_R,
) -> ClassLabel:
    """Membership of the curve (with this basis) in the degenerate set
    (shared root) or the regular set (nonvanishing residue sum).

    The thresholds and all intermediate values are recorded in diagnostics.
    """
    b1, b2 = basis.b1, basis.b2
    delta, scale = discriminant_delta(b1, b2)
    in_s = abs(delta) < tol_s * scale
    res = complex("nan")
    deg_f = None
    if not in_s:
        res = residue_sum(curve.a, b1, b2)
        deg_f = f_degree(b1, b2, tol_s)
    in_r = (not in_s) and abs(res) > tol_r
    return ClassLabel(
        in_S=in_s,
        in_R=in_r,
        residue_sum=res,
        discriminant=delta,
        degree_f=deg_f if deg_f is not None else -1,
        diagnostics={
            "tol_S": tol_s,
            "tol_R": tol_r,
            "discriminant_scale": scale,
            "a_period_residual": basis.a_period_residual,
        },
    )


def mobius_act(basis: BBasis, m) -> BBasis:
    """Basis change (b1, b2) -> (A b1 + B b2, C b1 + D b2).

    The residue sum of the new basis is 1/det(m) times the old one; the
    Wronskian scales by det(m).
    """
    m = np.asarray(m, dtype=float)
    if m.shape != (2, 2):
        raise DomainError("basis change must be a real 2x2 matrix")
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if abs(det) < 1e-12:
        raise DomainError("basis change matrix is singular")
    b1 = m[0, 0] * basis.b1 + m[0, 1] * basis.b2
    b2 = m[1, 0] * basis.b1 + m[1, 1] * basis.b2
    from .bspace import BBasis as _BB  # avoid construction duplication

    def inner(p, q):
        n = max(len(p.coeffs), len(q.coeffs), 1)
        x = np.zeros(n, dtype=complex)
        y = np.zeros(n, dtype=complex)
        x[: len(p.coeffs)] = p.array
        y[: len(q.coeffs)] = q.array
        return float(np.real(np.sum(x * np.conj(y))))

    gram = np.asarray([[inner(b1, b1), inner(b1, b2)], [inner(b2, b1), inner(b2, b2)]])
    resid = basis.a_period_residual
    bound = float(np.max(np.abs(m))) * 2.0
    return _BB(b1=b1, b2=b2, gram=gram, a_period_residual=resid * bound)


def align_basis_at(basis: BBasis, alpha: complex) -> BBasis:
    """Determinant-one real change of basis with b1(alpha) = 0.

    Exists for unit-circle alpha because f maps the unit circle to the real
    projective line, so b1(alpha)/b2(alpha) is real.
    """
    alpha = complex(alpha)
    if abs(abs(alpha) - 1.0) > 1e-9:
        raise DomainError("alignment point must lie on the unit circle")
    u = complex(basis.b1(alpha))
    v = complex(basis.b2(alpha))
    scale = max(abs(u), abs(v))
    if scale == 0:
        raise DegeneracyError("both basis members vanish at alpha")
    if abs(u) <= 1e-12 * scale:
        return basis
    if abs(v) >= abs(u):
        ratio = u / v
        if abs(ratio.imag) > 1e-6 * (1.0 + abs(ratio)):
            raise DomainError(f"b1/b2 not real at alpha (ratio {ratio:.3e})")
        m = np.asarray([[1.0, -ratio.real], [0.0, 1.0]])
    else:
        ratio = v / u
        if abs(ratio.imag) > 1e-6 * (1.0 + abs(ratio)):
            raise DomainError(f"b2/b1 not real at alpha (ratio {ratio:.3e})")
        m = np.asarray([[-ratio.real, 1.0], [-1.0, 0.0]])
    out = mobius_act(basis, m)
    if abs(complex(out.b1(alpha))) > 1e-8 * (1.0 + scale):
        raise AccuracyError("alignment failed to annihilate b1 at alpha")
    return out
