"""Complex polynomial algebra: arithmetic, the reality star-involution,
simultaneous root finding, resultants, and Wronskians.

Coefficients are stored low power to high power.  All functions are pure and
safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, DegreeOverflowError, DomainError

__all__ = [
    "CPoly",
    "star",
    "is_star_symmetric",
    "roots",
    "resultant",
    "wronskian",
    "coeffs_close",
]

# Roots closer than this (relative to 1 + |root|) are merged into one
# cluster and reported with multiplicity.
MERGE_TOL = 1e-8


@dataclass(frozen=True)
class CPoly:
    """Immutable complex polynomial.  ``coeffs[k]`` multiplies lambda**k.

    The zero polynomial has an empty coefficient tuple and degree -1.
    Exact trailing zeros are trimmed on construction; no tolerance is
    applied, callers decide what counts as negligible.
    """

    coeffs: tuple

    def __init__(self, coeffs):
        cs = [complex(c) for c in np.atleast_1d(np.asarray(coeffs, dtype=complex))]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=complex)

    def __call__(self, lam):
        """Horner evaluation; accepts scalars or arrays."""
        lam = np.asarray(lam, dtype=complex)
        out = np.zeros_like(lam)
        for c in reversed(self.coeffs):
            out = out * lam + c
        if out.ndim == 0:
            return complex(out)
        return out

    def deriv(self) -> "CPoly":
        if self.degree <= 0:
            return CPoly([])
        cs = self.array
        return CPoly(cs[1:] * np.arange(1, len(cs)))

    def __add__(self, other):
        a, b = self.array, _as_poly(other).array
        n = max(len(a), len(b), 1)
        out = np.zeros(n, dtype=complex)
        out[: len(a)] += a
        out[: len(b)] += b
        return CPoly(out)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return CPoly(-self.array)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) + (-self)

    def __mul__(self, other):
        if np.isscalar(other) or isinstance(other, (int, float, complex)):
            return CPoly(self.array * complex(other))
        b = _as_poly(other)
        if self.degree < 0 or b.degree < 0:
            return CPoly([])
        return CPoly(np.convolve(self.array, b.array))

    def __rmul__(self, other):
        return self.__mul__(other)

    def trim(self, tol: float) -> "CPoly":
        """Drop trailing coefficients of magnitude <= tol * (1 + max |coeff|)."""
        cs = list(self.coeffs)
        if not cs:
            return self
        cut = tol * (1.0 + max(abs(c) for c in cs))
        while cs and abs(cs[-1]) <= cut:
            cs.pop()
        return CPoly(cs)

    def __repr__(self):
        return f"CPoly({list(self.coeffs)!r})"


def _as_poly(p) -> CPoly:
    if isinstance(p, CPoly):
        return p
    if np.isscalar(p) or isinstance(p, (int, float, complex)):
        return CPoly([complex(p)])
    return CPoly(p)


def star(p: CPoly, n: int) -> CPoly:
    """The reality involution lambda**n * conj(p(1/conj(lambda))).

    In coefficients: reverse and conjugate, padding to length n + 1.
    ``p`` is called n-real when star(p, n) == p.
    """
    p = _as_poly(p)
    if p.degree > n:
        raise DegreeOverflowError(f"deg(p) = {p.degree} exceeds n = {n}")
    out = np.zeros(n + 1, dtype=complex)
    out[: len(p.coeffs)] = np.conj(p.array)
    return CPoly(out[::-1])


def is_star_symmetric(p: CPoly, n: int, tol: float = 1e-12) -> bool:
    return coeffs_close(star(p, n), _as_poly(p), tol)


def coeffs_close(p: CPoly, q: CPoly, tol: float) -> bool:
    """Coefficientwise comparison relative to 1 + max |coeff|."""
    a, b = _as_poly(p).array, _as_poly(q).array
    n = max(len(a), len(b), 1)
    pa = np.zeros(n, dtype=complex)
    qa = np.zeros(n, dtype=complex)
    pa[: len(a)] = a
    qa[: len(b)] = b
    scale = 1.0 + max(np.max(np.abs(pa)), np.max(np.abs(qa)))
    return float(np.max(np.abs(pa - qa))) <= tol * scale


def _aberth(c: np.ndarray, tol: float, max_iter: int = 120):
    """Aberth-Ehrlich simultaneous iteration.  ``c`` low-to-high, c[-1] != 0.

    Returns (roots, converged).  Robust for clustered roots because every
    root is tracked at once and the pairwise repulsion term keeps the
    iterates apart.
    """
    n = len(c) - 1
    cn = c / c[-1]
    # Cauchy bound and a slightly irrational angular offset to break symmetry
    radius = 1.0 + np.max(np.abs(cn[:-1]))
    angles = 2.0 * np.pi * (np.arange(n) + 0.5) / n + 0.4 / n
    z = 0.6 * radius * np.exp(1j * angles)

    dcoef = cn[1:] * np.arange(1, n + 1)
    for _ in range(max_iter):
        p = np.zeros_like(z)
        for a in cn[::-1]:
            p = p * z + a
        dp = np.zeros_like(z)
        for a in dcoef[::-1]:
            dp = dp * z + a
        # Newton correction with a guard against dp == 0
        w = np.where(dp != 0, p / np.where(dp == 0, 1, dp), 0.1 + 0.1j)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        s = np.sum(1.0 / diff, axis=1)
        denom = 1.0 - w * s
        denom = np.where(np.abs(denom) < 1e-300, 1e-300, denom)
        step = w / denom
        z = z - step
        if np.max(np.abs(step)) <= tol * (1.0 + np.max(np.abs(z))):
            return z, True
    return z, False


def _merge_clusters(rts: np.ndarray) -> np.ndarray:
    """Replace root clusters by their mean, repeated with multiplicity."""
    rts = list(rts)
    out = []
    used = [False] * len(rts)
    for i, r in enumerate(rts):
        if used[i]:
            continue
        cluster = [r]
        used[i] = True
        for j in range(i + 1, len(rts)):
            if not used[j] and abs(rts[j] - r) <= MERGE_TOL * (1.0 + abs(r)):
                cluster.append(rts[j])
                used[j] = True
        mean = sum(cluster) / len(cluster)
        out.extend([mean] * len(cluster))
    return np.asarray(out, dtype=complex)


def roots(p: CPoly, tol: float = 1e-10) -> np.ndarray:
    """All complex roots of ``p`` with multiplicity (clusters merged).

    Raises DomainError on the zero polynomial and AccuracyError (carrying the
    best iterate) when the reconstruction ``lead * prod(lambda - r_i)`` fails
    to reproduce the coefficients to the requested tolerance.
    """
    p = _as_poly(p)
    if p.degree < 0:
        raise DomainError("zero polynomial has no well-defined root set")
    if p.degree == 0:
        return np.asarray([], dtype=complex)
    c = p.array
    z, ok = _aberth(c, tol=min(tol, 1e-12))
    if not ok or not np.all(np.isfinite(z)):
        z = np.roots(c[::-1])  # companion-matrix fallback
    z = _merge_clusters(z)
    # reconstruction check, coefficientwise relative to 1 + max |coeff|
    rec = np.asarray([c[-1]], dtype=complex)
    for r in z:
        rec = np.convolve(rec, np.asarray([-r, 1.0], dtype=complex))
    scale = 1.0 + np.max(np.abs(c))
    err = np.max(np.abs(rec - c)) / scale
    if err > tol:
        zc = np.roots(c[::-1])
        rec2 = np.asarray([c[-1]], dtype=complex)
        for r in zc:
            rec2 = np.convolve(rec2, np.asarray([-r, 1.0], dtype=complex))
        err2 = np.max(np.abs(rec2 - c)) / scale
        if err2 > tol:
            raise AccuracyError(
                f"root finding reached residual {min(err, err2):.3e} > tol {tol:.3e}",
                best=z if err <= err2 else _merge_clusters(zc),
            )
        z = _merge_clusters(zc)
    return z


def resultant(p: CPoly, q: CPoly) -> complex:
    """Sylvester-matrix resultant.  Zero (within tolerance) iff p and q
    share a root."""
    p, q = _as_poly(p), _as_poly(q)
    if p.degree < 0 and q.degree < 0:
        raise DomainError("resultant of two zero polynomials is undefined")
    if p.degree < 0 or q.degree < 0:
        return 0.0 + 0.0j
    m, n = p.degree, q.degree
    if m == 0 and n == 0:
        return 1.0 + 0.0j
    # rows: n shifted copies of p (high to low), then m shifted copies of q
    size = m + n
    syl = np.zeros((size, size), dtype=complex)
    pa = p.array[::-1]
    qa = q.array[::-1]
    for i in range(n):
        syl[i, i : i + m + 1] = pa
    for i in range(m):
        syl[n + i, i : i + n + 1] = qa
    return complex(np.linalg.det(syl))


def wronskian(b1: CPoly, b2: CPoly) -> CPoly:
    """b1' * b2 - b2' * b1.  Antisymmetric; invariant under determinant-one
    real changes of basis, and scales by det for general ones."""
    b1, b2 = _as_poly(b1), _as_poly(b2)
    return b1.deriv() * b2 - b2.deriv() * b1
