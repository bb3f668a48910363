"""Piecewise-smooth paths in the lambda plane.

A path is a tuple of pieces; each piece maps the unit parameter interval to
the plane and knows its derivative.  Closed cycles used for period
integration are built either as a single ellipse (smooth, preferred) or as a
capsule-shaped chain around a routed polyline when no separating ellipse
exists.  Capsule corners may create tiny self-overlaps; that is harmless
because period integration only depends on winding numbers, which are
verified separately.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GeometryError

__all__ = [
    "Line",
    "Arc",
    "EllipseArc",
    "path_points",
    "path_length",
    "winding_numbers",
    "min_distance",
    "separating_cycle",
    "route",
    "capsule",
    "reverse_path",
]

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class Line:
    z0: complex
    z1: complex

    def at(self, t):
        t = np.asarray(t, dtype=float)
        return self.z0 + t * (self.z1 - self.z0)

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        return np.full(t.shape, self.z1 - self.z0, dtype=complex)

    def length(self):
        return abs(self.z1 - self.z0)

    def reversed(self):
        return Line(self.z1, self.z0)


@dataclass(frozen=True)
class Arc:
    """Circular arc, counterclockwise when th1 > th0."""

    center: complex
    radius: float
    th0: float
    th1: float

    def at(self, t):
        t = np.asarray(t, dtype=float)
        th = self.th0 + t * (self.th1 - self.th0)
        return self.center + self.radius * np.exp(1j * th)

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        th = self.th0 + t * (self.th1 - self.th0)
        return 1j * (self.th1 - self.th0) * self.radius * np.exp(1j * th)

    def length(self):
        return abs(self.th1 - self.th0) * self.radius

    def reversed(self):
        return Arc(self.center, self.radius, self.th1, self.th0)


@dataclass(frozen=True)
class EllipseArc:
    """Axis-aligned-in-rotated-frame elliptic arc, counterclockwise.

    z(t) = center + e^{i psi} (a cos th + i b sin th).
    """

    center: complex
    psi: float
    a: float
    b: float
    th0: float = 0.0
    th1: float = TWO_PI

    def at(self, t):
        t = np.asarray(t, dtype=float)
        th = self.th0 + t * (self.th1 - self.th0)
        return self.center + np.exp(1j * self.psi) * (
            self.a * np.cos(th) + 1j * self.b * np.sin(th)
        )

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        th = self.th0 + t * (self.th1 - self.th0)
        return (
            np.exp(1j * self.psi)
            * (self.th1 - self.th0)
            * (-self.a * np.sin(th) + 1j * self.b * np.cos(th))
        )

    def length(self):
        # crude upper estimate is fine: only used to apportion nodes
        return abs(self.th1 - self.th0) * 0.5 * (self.a + self.b)

    def reversed(self):
        return EllipseArc(self.center, self.psi, self.a, self.b, self.th1, self.th0)


def reverse_path(path):
    return tuple(p.reversed() for p in reversed(path))


def path_length(path) -> float:
    return float(sum(p.length() for p in path))


def path_points(path, n_per_piece):
    """Sample each piece at n+1 equally spaced parameters (endpoints shared)."""
    pts = []
    for piece, n in zip(path, n_per_piece):
        t = np.linspace(0.0, 1.0, int(n) + 1)
        pts.append(piece.at(t)[:-1])
    pts.append(np.atleast_1d(path[-1].at(1.0)))
    return np.concatenate(pts)


def _gl_nodes(order):
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w  # mapped to [0, 1]


def winding_numbers(path, points, nodes: int = 1024) -> np.ndarray:
    """Winding number of the (closed) path around each point, by quadrature
    of z'/(z - p).  Raises GeometryError when the result is not close to an
    integer, which signals a point too near the contour."""
    points = np.atleast_1d(np.asarray(points, dtype=complex))
    total = np.zeros(len(points), dtype=complex)
    lengths = np.array([p.length() for p in path])
    frac = lengths / max(lengths.sum(), 1e-300)
    for piece, f in zip(path, frac):
        n_panels = max(2, int(np.ceil(f * nodes / 12)))
        t01, w01 = _gl_nodes(12)
        for k in range(n_panels):
            t = (k + t01) / n_panels
            z = piece.at(t)
            dz = piece.deriv(t) / n_panels
            total += np.einsum("q,qp->p", w01, dz[:, None] / (z[:, None] - points[None, :]))
    w = total / (2j * np.pi)
    wr = np.round(w.real).astype(int)
    err = np.max(np.abs(w - wr))
    if err > 0.05:
        raise GeometryError(
            f"winding number quadrature off by {err:.2e}; contour passes too "
            "close to a marked point"
        )
    return wr


def min_distance(path, points, samples_per_piece: int = 256) -> float:
    """Minimum distance from the sampled path to any of the points."""
    points = np.atleast_1d(np.asarray(points, dtype=complex))
    if points.size == 0:
        return np.inf
    best = np.inf
    for piece in path:
        z = piece.at(np.linspace(0.0, 1.0, samples_per_piece))
        d = np.min(np.abs(z[:, None] - points[None, :]))
        best = min(best, float(d))
    return best


# ---------------------------------------------------------------------------
# separating contours
# ---------------------------------------------------------------------------


def _ellipse_between(f1: complex, f2: complex, two_a: float) -> EllipseArc:
    center = 0.5 * (f1 + f2)
    c = 0.5 * abs(f2 - f1)
    a = 0.5 * two_a
    b = float(np.sqrt(max(a * a - c * c, 0.0)))
    psi = float(np.angle(f2 - f1)) if abs(f2 - f1) > 0 else 0.0
    return EllipseArc(center, psi, a, b)


def separating_cycle(inside, outside, delta: float):
    """A closed counterclockwise cycle enclosing the two ``inside`` points and
    none of the ``outside`` points, keeping distance >= delta from all of
    them.

    Tries the confocal ellipse first; falls back to a capsule around a routed
    path between the two points.  Raises GeometryError when neither works.
    """
    f1, f2 = (complex(p) for p in inside)
    outside = np.atleast_1d(np.asarray(outside, dtype=complex))
    ell = abs(f2 - f1)
    if outside.size:
        s = np.abs(outside - f1) + np.abs(outside - f2)
        min_s = float(np.min(s))
    else:
        min_s = np.inf
    lo = ell + 2.0 * delta
    hi = min_s - 2.0 * delta
    if hi > lo:
        two_a = min(0.5 * (lo + hi), lo + 4.0 * max(ell, 1.0))
        path = (_ellipse_between(f1, f2, two_a),)
        if min_distance(path, np.concatenate([[f1, f2], outside])) >= delta:
            return path
    # routed capsule fallback
    clearance = 4.0 * delta
    for attempt in range(4):
        try:
            poly = route(f1, f2, outside, clearance)
        except GeometryError:
            clearance *= 0.5
            continue
        pts = np.concatenate([[f1, f2], outside]) if outside.size else np.array([f1, f2])
        r = 0.5 * clearance
        path = capsule(poly, r)
        if min_distance(path, outside) >= delta and r >= delta:
            return path
        clearance *= 0.5
    raise GeometryError(
        "no separating contour at margin "
        f"{delta:.2e} for pair ({f1:.4g}, {f2:.4g}); reduce the margin or "
        "perturb the configuration"
    )


def route(z0: complex, z1: complex, obstacles, clearance: float, depth: int = 12):
    """Polyline from z0 to z1 staying ``clearance`` away from obstacles.

    Straight when possible; otherwise detours around the worst offender and
    recurses.  Endpoints themselves are not treated as obstacles.
    """
    obstacles = np.atleast_1d(np.asarray(obstacles, dtype=complex))
    if depth <= 0:
        raise GeometryError("routing recursion exhausted")
    if obstacles.size == 0:
        return [z0, z1]
    d = z1 - z0
    ln = abs(d)
    if ln == 0:
        return [z0, z1]
    u = d / ln
    # perpendicular distance from each obstacle to the segment
    rel = (obstacles - z0) / u
    t = np.clip(rel.real, 0.0, ln)
    foot = z0 + t * u
    dist = np.abs(obstacles - foot)
    worst = int(np.argmin(dist))
    if dist[worst] >= clearance:
        return [z0, z1]
    o = obstacles[worst]
    f = foot[worst]
    side = f - o
    if abs(side) < 1e-14:
        side = 1j * u  # obstacle exactly on the segment: pick a side
    n = side / abs(side)
    w = o + n * (2.0 * clearance)
    left = route(z0, w, obstacles, clearance, depth - 1)
    right = route(w, z1, obstacles, clearance, depth - 1)
    return left[:-1] + right


def capsule(polyline, r: float):
    """Closed counterclockwise chain at distance r around a polyline.

    Built from offset segments, corner arcs, and half-turn end caps.  Corner
    arcs on the inner side of a bend overlap slightly; winding numbers around
    points at distance > r remain correct.
    """
    pts = [complex(p) for p in polyline]
    if len(pts) < 2:
        raise GeometryError("capsule needs a polyline with at least two points")
    dirs = []
    for a, b in zip(pts[:-1], pts[1:]):
        d = b - a
        if abs(d) < 1e-15:
            raise GeometryError("degenerate polyline segment")
        dirs.append(d / abs(d))
    north = [1j * d for d in dirs]  # left normals

    def short_arc(center, th0, th1):
        d_th = (th1 - th0 + np.pi) % TWO_PI - np.pi
        return Arc(center, r, th0, th0 + d_th)

    pieces = []
    # south side, forward (interior on the left -> counterclockwise cycle)
    for i, (a, b) in enumerate(zip(pts[:-1], pts[1:])):
        pieces.append(Line(a - r * north[i], b - r * north[i]))
        if i + 1 < len(dirs):
            pieces.append(
                short_arc(b, float(np.angle(-north[i])), float(np.angle(-north[i + 1])))
            )
    # end cap: half turn through the forward direction
    th = float(np.angle(-north[-1]))
    pieces.append(Arc(pts[-1], r, th, th + np.pi))
    # north side, backward
    for i in range(len(dirs) - 1, -1, -1):
        a, b = pts[i], pts[i + 1]
        pieces.append(Line(b + r * north[i], a + r * north[i]))
        if i > 0:
            pieces.append(
                short_arc(a, float(np.angle(north[i])), float(np.angle(north[i - 1])))
            )
    # start cap: half turn through the backward direction
    th = float(np.angle(north[0]))
    pieces.append(Arc(pts[0], r, th, th + np.pi))
    return tuple(pieces)
