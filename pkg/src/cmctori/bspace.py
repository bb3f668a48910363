"""The two-dimensional real space of admissible polynomials b.

For a genus-g curve the star-symmetric polynomials of degree g+1 form a
(g+2)-dimensional real space; requiring every A period of Theta_b to vanish
imposes g independent real constraints (the imaginary parts vanish by
symmetry and are only monitored), leaving a plane.  The solver returns a
deterministic basis of that plane.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curve import HomologyAtlas, SpectralCurve
from .errors import RankError
from .periods import QuadratureConfig, period_table
from .polyalg import CPoly

__all__ = ["BBasis", "real_parametrization", "compute_b_basis", "basis_from_coords"]

RANK_TOL = 1e-8


@dataclass(frozen=True)
class BBasis:
    """Ordered basis (b1, b2) of the admissible plane.

    gram holds the coefficient inner products; a_period_residual is the
    largest A-period modulus of the two members.
    """

    b1: CPoly
    b2: CPoly
    gram: np.ndarray
    a_period_residual: float

    @property
    def polys(self):
        return (self.b1, self.b2)


def real_parametrization(g: int) -> list:
    """Real basis of the star-symmetric polynomials of degree g + 1.

    Pairs (lambda^k + lambda^(n-k), i lambda^k - i lambda^(n-k)) for
    k < n - k with n = g + 1, plus the real middle monomial when n is even.
    Dimension g + 2.
    """
    n = g + 1
    out = []
    for k in range(n + 1):
        if k < n - k:
            e1 = np.zeros(n + 1, dtype=complex)
            e1[k] = 1.0
            e1[n - k] = 1.0
            e2 = np.zeros(n + 1, dtype=complex)
            e2[k] = 1j
            e2[n - k] = -1j
            out.append(CPoly(e1))
            out.append(CPoly(e2))
    if n % 2 == 0:
        mid = np.zeros(n + 1, dtype=complex)
        mid[n // 2] = 1.0
        out.append(CPoly(mid))
    return out


def _coeff_inner(p: CPoly, q: CPoly) -> float:
    n = max(len(p.coeffs), len(q.coeffs), 1)
    a = np.zeros(n, dtype=complex)
    b = np.zeros(n, dtype=complex)
    a[: len(p.coeffs)] = p.array
    b[: len(q.coeffs)] = q.array
    return float(np.real(np.sum(a * np.conj(b))))


def basis_from_coords(g: int, x1, x2, a_period_residual: float = np.nan) -> BBasis:
    """Assemble a BBasis from real coordinate vectors in the parametrization."""
    basis = real_parametrization(g)
    b1 = sum((float(c) * e for c, e in zip(x1, basis)), CPoly([]))
    b2 = sum((float(c) * e for c, e in zip(x2, basis)), CPoly([]))
    gram = np.asarray(
        [
            [_coeff_inner(b1, b1), _coeff_inner(b1, b2)],
            [_coeff_inner(b2, b1), _coeff_inner(b2, b2)],
        ]
    )
    return BBasis(b1=b1, b2=b2, gram=gram, a_period_residual=a_period_residual)


def compute_b_basis(
    curve: SpectralCurve,
    atlas: HomologyAtlas,
    cfg: QuadratureConfig = QuadratureConfig(),
    return_diagnostics: bool = False,
):
    """Deterministic basis of the admissible plane.

    The constraint matrix is the real part of the A-period table of the
    parametrization basis; its kernel is extracted by SVD (rank must be g at
    tolerance, else RankError reporting the singular values) and then made
    deterministic by projecting canonical seed directions onto the kernel,
    which keeps the result stable under small quadrature perturbations.
    """
    g = curve.genus
    basis = real_parametrization(g)
    dim = g + 2
    if g == 0:
        kernel = np.eye(2)
        m = np.zeros((0, dim))
        svals = np.asarray([])
        imag_resid = 0.0
    else:
        table = period_table(curve, basis, atlas, cfg)["A"]
        imag_resid = float(np.max(np.abs(table.imag)))
        m = table.real
        u, s, vt = np.linalg.svd(m)
        svals = s
        scale = max(float(s[0]), 1.0)
        if s[g - 1] <= RANK_TOL * scale:
            raise RankError(
                f"A-period constraint matrix has rank < {g}", singular_values=s
            )
        if len(s) > g and s[g] > RANK_TOL * scale:
            raise RankError(
                f"A-period constraint matrix has rank > {g}", singular_values=s
            )
        kernel = vt[g:].T  # (g+2) x 2
    proj = kernel @ kernel.T
    seeds = []
    cols = [proj[:, k] for k in range(dim)]
    order = np.argsort([-np.linalg.norm(c) for c in cols], kind="stable")
    x1 = cols[int(order[0])]
    x1 = x1 / np.linalg.norm(x1)
    for k in order[1:]:
        cand = cols[int(k)] - (cols[int(k)] @ x1) * x1
        if np.linalg.norm(cand) > 0.1:
            x2 = cand / np.linalg.norm(cand)
            break
    else:
        raise RankError("kernel projection produced no independent second vector",
                        singular_values=svals)

    def fix_sign(x):
        big = np.abs(x) > 0.1 * np.max(np.abs(x))
        lead = int(np.argmax(big))
        return -x if x[lead] < 0 else x

    x1, x2 = fix_sign(x1), fix_sign(x2)
    result = basis_from_coords(g, x1, x2)
    if g == 0:
        residual = 0.0
    else:
        coords = np.stack([x1, x2], axis=1)
        residual = float(np.max(np.abs(table @ coords)))
    result = BBasis(
        b1=result.b1, b2=result.b2, gram=result.gram, a_period_residual=residual
    )
    if return_diagnostics:
        return result, {
            "singular_values": svals,
            "imag_residual": imag_resid,
            "coords": (x1, x2),
        }
    return result
