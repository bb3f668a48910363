"""Spectral curves y^2 = lambda a(lambda) of finite-type sinh-Gordon data.

A curve is determined by its marked roots eta_1..eta_g in the punctured open
unit disk; the companion roots 1/conj(eta_j) and the normalisation of the
leading phase are forced by the reality and positivity conditions.  This
module also builds the adapted homology cycles (A_j around each root pair,
B_j through the cuts at the pair and at (0, infinity)) and the paths gamma_j
joining the two points over a Sym point.

Orientation conventions, fixed once for the whole package:

* all closed cycles run counterclockwise in the lambda plane;
* the starting sheet of every contour is the principal square root of
  lambda * a(lambda) at the contour's start point;
* gamma_j starts at (lambda_j, +y), loops counterclockwise around the
  designated branch point (0 by default), and returns on the other sheet.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import contours
from .contours import Arc, Line, reverse_path, route, separating_cycle, winding_numbers
from .errors import (
    DegeneracyError,
    DomainError,
    GeometryError,
    ParseError,
    ProximityError,
    RefinementError,
)
from .polyalg import CPoly, star

__all__ = [
    "INFINITY",
    "SpectralCurve",
    "Contour",
    "HomologyAtlas",
    "from_roots",
    "validate",
    "branch_points",
    "finite_branch_points",
    "branch_delta",
    "mirror_root",
    "y_continue",
    "continue_y_values",
    "anchored_y_start",
    "adapted_homology",
    "gamma_paths",
    "load_curve",
    "curve_to_dict",
]

INFINITY = complex(math.inf, 0.0)

MIN_ROOT_GAP = 1e-8
POSITIVITY_GRID = 1024


def mirror_root(eta: complex) -> complex:
    """The companion root 1/conj(eta) = eta / |eta|^2."""
    return eta / abs(eta) ** 2


@dataclass(frozen=True)
class SpectralCurve:
    """Hyperelliptic curve y^2 = lambda a(lambda) with a in normal form."""

    genus: int
    etas: tuple
    a: CPoly
    lead_phase: complex

    def __repr__(self):
        return f"SpectralCurve(genus={self.genus}, etas={list(self.etas)!r})"


@dataclass(frozen=True)
class Contour:
    """Piecewise path in the lambda plane plus a starting sheet marker.

    sheet = +1 means y at the start point is the globally anchored branch:
    the continuation of +sqrt(a(1)) from lambda = 1 along the canonical
    approach path (see anchored_y_start).  The positivity condition makes
    a(1) > 0, so the anchor itself never sits on a branch cut and moves
    continuously with the curve's roots.
    """

    pieces: tuple
    sheet: int = 1

    @property
    def start(self) -> complex:
        return complex(self.pieces[0].at(0.0))


@dataclass(frozen=True)
class HomologyAtlas:
    a_cycles: tuple
    b_cycles: tuple
    gammas: tuple
    delta: float
    winding_matrix: np.ndarray  # cycles x finite branch points
    intersections: np.ndarray  # designed A_j . B_k pairing


def from_roots(etas) -> SpectralCurve:
    """Build the unique normalised curve with marked roots ``etas``.

    a(lambda) = (-1)^g prod_j (conj(eta_j)/|eta_j|)
                (lambda - eta_j)(lambda - 1/conj(eta_j)).
    """
    etas = tuple(complex(e) for e in np.atleast_1d(np.asarray(etas, dtype=complex)))
    g = len(etas)
    for e in etas:
        r = abs(e)
        if r == 0 or abs(r - 1.0) < MIN_ROOT_GAP:
            raise DomainError(f"root {e} must satisfy 0 < |eta| < 1 strictly")
        if r >= 1.0:
            raise DomainError(f"root {e} lies outside the open unit disk")
    for i in range(g):
        for j in range(i + 1, g):
            if abs(etas[i] - etas[j]) <= MIN_ROOT_GAP * (1.0 + abs(etas[i])):
                raise DegeneracyError(f"duplicate roots {etas[i]} and {etas[j]}")
    coeffs = np.asarray([1.0], dtype=complex)
    phase = (-1.0 + 0.0j) if g % 2 else (1.0 + 0.0j)
    for e in etas:
        m = mirror_root(e)
        phase *= np.conj(e) / abs(e)
        quad = np.asarray([e * m, -(e + m), 1.0], dtype=complex)
        coeffs = np.convolve(coeffs, quad)
    curve = SpectralCurve(genus=g, etas=etas, a=CPoly(coeffs * phase), lead_phase=complex(phase))
    validate(curve)
    return curve


def validate(curve: SpectralCurve) -> dict:
    """Check all curve invariants; return the residual diagnostics.

    Raises DomainError / DegeneracyError on violations.
    """
    g = curve.genus
    a = curve.a
    if a.degree != 2 * g:
        raise DomainError(f"a has degree {a.degree}, expected {2 * g}")
    lead = a.coeffs[-1]
    if abs(abs(lead) - 1.0) > 1e-10:
        raise DomainError("leading coefficient of a must have modulus one")
    sa = star(a, 2 * g)
    scale = 1.0 + max(abs(c) for c in a.coeffs)
    reality_residual = max(
        (abs(x - y) for x, y in zip(sa.coeffs, a.coeffs)), default=0.0
    ) / scale
    if reality_residual > 1e-14:
        raise DomainError(f"reality condition violated: residual {reality_residual:.2e}")
    theta = np.linspace(0.0, 2.0 * np.pi, POSITIVITY_GRID, endpoint=False)
    lam = np.exp(1j * theta)
    vals = a(lam) * lam ** (-g)
    positivity_min = float(np.min(vals.real))
    imag_residual = float(np.max(np.abs(vals.imag))) / scale
    if positivity_min <= 0.0:
        raise DomainError(f"positivity fails on the unit circle (min {positivity_min:.2e})")
    gaps = []
    pts = finite_branch_points(curve)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            gaps.append(abs(pts[i] - pts[j]))
    if gaps and min(gaps) <= MIN_ROOT_GAP:
        raise DegeneracyError(f"branch points nearly collide (gap {min(gaps):.2e})")
    return {
        "reality_residual": reality_residual,
        "positivity_min": positivity_min,
        "positivity_imag_residual": imag_residual,
        "min_branch_gap": min(gaps) if gaps else math.inf,
    }


def finite_branch_points(curve: SpectralCurve) -> np.ndarray:
    """0 and the 2g roots of a, in the order [0, eta_1, mirror_1, ...]."""
    pts = [0.0 + 0.0j]
    for e in curve.etas:
        pts.append(e)
        pts.append(mirror_root(e))
    return np.asarray(pts, dtype=complex)


def branch_points(curve: SpectralCurve):
    """All 2g + 2 branch points of y^2 = lambda a(lambda), infinity included."""
    return list(finite_branch_points(curve)) + [INFINITY]


def branch_delta(curve: SpectralCurve) -> float:
    """Safety margin: 1e-2 times the minimum pairwise branch distance."""
    pts = finite_branch_points(curve)
    if len(pts) < 2:
        return 0.01
    d = np.abs(pts[:, None] - pts[None, :])
    np.fill_diagonal(d, np.inf)
    return 0.01 * float(np.min(d))


# ---------------------------------------------------------------------------
# analytic continuation of y
# ---------------------------------------------------------------------------


def continue_y_values(w: np.ndarray, y0: complex):
    """Continue y = sqrt(w) along an ordered sample of w values.

    Returns (y, ok): nearest-square-root selection seeded at y0; ``ok`` is
    False when some step turns the argument of w by 90 degrees or more, in
    which case the sampling is too coarse to disambiguate.
    """
    raw = np.sqrt(w)
    inner = raw[1:] * np.conj(raw[:-1])
    q = np.where(inner.real >= 0.0, 1.0, -1.0)
    margins = np.abs(inner.real) / np.maximum(np.abs(inner), 1e-300)
    ok = bool(np.all(margins > 0.05))
    signs = np.concatenate([[1.0], np.cumprod(q)])
    y = raw * signs
    s0 = 1.0 if abs(y[0] - y0) <= abs(y[0] + y0) else -1.0
    return s0 * y, ok


def anchored_y_start(curve: SpectralCurve, z0: complex) -> complex:
    """The canonical branch of y at z0.

    Continuation of +sqrt(a(1)) from lambda = 1 counterclockwise along the
    unit circle to the phase of z0, then along a routed radial path to z0.
    This pins every contour's starting sheet by a rule that varies
    continuously with the curve's roots (discontinuities only occur when a
    root crosses the approach path itself).
    """
    z0 = complex(z0)
    if z0 == 0:
        raise DomainError("cannot anchor y at the branch point 0")
    fbp = finite_branch_points(curve)
    th0 = float(np.angle(z0)) % (2.0 * np.pi)
    ring = complex(np.exp(1j * th0))
    pieces = []
    if th0 > 1e-15:
        pieces.append(Arc(0.0 + 0.0j, 1.0, 0.0, th0))
    if abs(z0 - ring) > 1e-15:
        delta = branch_delta(curve)
        poly = route(ring, z0, fbp, clearance=max(0.5 * delta, 1e-4))
        pieces.extend(Line(a, b) for a, b in zip(poly[:-1], poly[1:]))
    y0 = complex(np.sqrt(complex(curve.a(1.0))))
    if not pieces:
        return y0
    for n in (512, 2048, 8192, 32768):
        zs = [np.atleast_1d(1.0 + 0.0j)]
        for piece in pieces:
            frac = max(piece.length(), 1e-6)
            m = max(16, int(n * frac / max(sum(p.length() for p in pieces), 1e-6)))
            zs.append(piece.at(np.linspace(0.0, 1.0, m + 1))[1:])
        z = np.concatenate(zs)
        w = z * curve.a(z)
        y, ok = continue_y_values(w, y0)
        if ok:
            return complex(y[-1])
    raise RefinementError(
        f"could not anchor the square-root branch at {z0:.6g}"
    )


def y_continue(curve: SpectralCurve, path, y_start: complex, tol: float = 1e-8):
    """Continue y along explicit sample points of a path.

    Preconditions: y_start is a square root of lambda_0 a(lambda_0); every
    point keeps distance >= delta from all branch points.  Raises
    ProximityError or RefinementError accordingly.
    """
    z = np.asarray(path, dtype=complex)
    if z.ndim != 1 or len(z) < 2:
        raise DomainError("path must contain at least two points")
    w = z * curve.a(z)
    if abs(y_start * y_start - w[0]) > tol * (1.0 + abs(w[0])):
        raise DomainError("y_start is not a square root of lambda*a(lambda) at the path start")
    delta = branch_delta(curve)
    pts = finite_branch_points(curve)
    dmin = float(np.min(np.abs(z[:, None] - pts[None, :])))
    if dmin < delta:
        raise ProximityError(
            f"path approaches a branch point to {dmin:.2e} < delta {delta:.2e}"
        )
    y, ok = continue_y_values(w, y_start)
    if not ok:
        raise RefinementError("path sampling too coarse to disambiguate the square root")
    return y


# ---------------------------------------------------------------------------
# adapted homology
# ---------------------------------------------------------------------------


def adapted_homology(curve: SpectralCurve, sym=None) -> HomologyAtlas:
    """Adapted cycles: A_j encloses the pair (eta_j, mirror_j); B_j encloses
    (0, eta_j).  Winding numbers are verified by the argument principle; the
    designed intersection pairing A_j . B_k = delta_jk is reported.

    When ``sym`` is given, the two gamma paths are attached as well.
    """
    g = curve.genus
    fbp = finite_branch_points(curve)
    delta = branch_delta(curve)
    a_cycles = []
    b_cycles = []
    windings = []
    for j in range(g):
        eta = curve.etas[j]
        mir = mirror_root(eta)
        inside = (eta, mir)
        outside = np.asarray([p for p in fbp if p != eta and p != mir], dtype=complex)
        path = separating_cycle(inside, outside, delta)
        w = winding_numbers(path, fbp)
        expected = np.zeros(len(fbp), dtype=int)
        expected[1 + 2 * j] = 1
        expected[2 + 2 * j] = 1
        if not np.array_equal(w, expected):
            raise GeometryError(f"A_{j + 1} winding vector {w} != {expected}")
        a_cycles.append(Contour(tuple(path)))
        windings.append(w)
    for j in range(g):
        eta = curve.etas[j]
        inside = (0.0 + 0.0j, eta)
        outside = np.asarray([p for p in fbp if p != 0 and p != eta], dtype=complex)
        path = separating_cycle(inside, outside, delta)
        w = winding_numbers(path, fbp)
        expected = np.zeros(len(fbp), dtype=int)
        expected[0] = 1
        expected[1 + 2 * j] = 1
        if not np.array_equal(w, expected):
            raise GeometryError(f"B_{j + 1} winding vector {w} != {expected}")
        b_cycles.append(Contour(tuple(path)))
        windings.append(w)
    gammas = ()
    if sym is not None:
        gammas = gamma_paths(curve, sym[0], sym[1])
    return HomologyAtlas(
        a_cycles=tuple(a_cycles),
        b_cycles=tuple(b_cycles),
        gammas=gammas,
        delta=delta,
        winding_matrix=np.asarray(windings, dtype=int).reshape(2 * g, len(fbp)),
        intersections=np.eye(g, dtype=int),
    )


def gamma_paths(curve: SpectralCurve, lam1: complex, lam2: complex, around=0):
    """Paths from (lambda_j, +y) to (lambda_j, -y): out to the designated
    branch point (0 by default, infinity allowed), once around it, and back.
    """
    lam1, lam2 = complex(lam1), complex(lam2)
    for lam in (lam1, lam2):
        if abs(abs(lam) - 1.0) > 1e-9:
            raise DomainError(f"Sym point {lam} must lie on the unit circle")
    if abs(lam1 - lam2) < 1e-12:
        raise DomainError("Sym points must be distinct")
    fbp = finite_branch_points(curve)
    delta = branch_delta(curve)
    for lam in (lam1, lam2):
        if np.min(np.abs(fbp - lam)) < max(delta, 1e-9):
            raise DomainError(f"Sym point {lam} coincides with a branch point")

    nonzero = np.abs(fbp[np.abs(fbp) > 0])
    if around == 0:
        r = 0.5 * float(np.min(nonzero)) if nonzero.size else 0.5
        if r < 2.0 * delta:
            raise GeometryError("no room for a loop around 0 at the requested margin")
        center = 0.0 + 0.0j
    else:
        r = 2.0 * float(np.max(nonzero, initial=1.0)) + 1.0
        center = 0.0 + 0.0j

    out = []
    for lam in (lam1, lam2):
        p0 = r * lam / abs(lam)
        obstacles = fbp[np.abs(fbp - lam) > 1e-12]
        poly = route(lam, p0, obstacles, clearance=max(2.0 * delta, 1e-3))
        legs = [Line(a, b) for a, b in zip(poly[:-1], poly[1:])]
        th0 = float(np.angle(p0))
        loop = Arc(center, r, th0, th0 + 2.0 * np.pi)
        pieces = tuple(legs) + (loop,) + reverse_path(tuple(legs))
        out.append(Contour(pieces))
    return tuple(out)


# ---------------------------------------------------------------------------
# curve files
# ---------------------------------------------------------------------------


def curve_to_dict(curve: SpectralCurve, sym=None) -> dict:
    d = {
        "genus": curve.genus,
        "etas": [[e.real, e.imag] for e in curve.etas],
    }
    if sym is not None:
        d["sym"] = [[complex(s).real, complex(s).imag] for s in sym]
    return d


def _parse_complex_pair(v, what):
    if (
        not isinstance(v, (list, tuple))
        or len(v) != 2
        or not all(isinstance(x, (int, float)) for x in v)
    ):
        raise ParseError(f"{what} must be a [re, im] pair, got {v!r}")
    return complex(v[0], v[1])


def load_curve(source):
    """Load (curve, sym) from a JSON file path, JSON text, or a dict."""
    if isinstance(source, dict):
        data = source
    else:
        try:
            text = source if "{" in str(source) else open(source).read()
        except OSError as exc:
            raise ParseError(f"cannot read curve file: {exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed curve JSON at line {exc.lineno}, column {exc.colno}") from exc
    if not isinstance(data, dict) or "etas" not in data:
        raise ParseError("curve JSON must be an object with an 'etas' field")
    etas = [_parse_complex_pair(e, "eta") for e in data["etas"]]
    curve = from_roots(etas)
    if "genus" in data and int(data["genus"]) != curve.genus:
        raise ParseError(
            f"genus field {data['genus']} does not match {curve.genus} roots"
        )
    sym = None
    if data.get("sym") is not None:
        entries = data["sym"]
        if len(entries) != 2:
            raise ParseError("sym must contain exactly two points")
        sym = tuple(_parse_complex_pair(s, "sym point") for s in entries)
    return curve, sym
