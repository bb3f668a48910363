import numpy as np
import pytest

from cmctori.contours import (
    Arc,
    EllipseArc,
    Line,
    capsule,
    min_distance,
    path_length,
    reverse_path,
    route,
    separating_cycle,
    winding_numbers,
)
from cmctori.errors import GeometryError


class TestWinding:
    def test_circle(self):
        loop = (Arc(0.0 + 0.0j, 1.0, 0.0, 2 * np.pi),)
        w = winding_numbers(loop, [0.0, 0.5j, 2.0, -3.0 + 1j])
        assert list(w) == [1, 1, 0, 0]

    def test_ellipse(self):
        loop = (EllipseArc(1.0 + 0.0j, 0.3, 2.0, 0.5),)
        w = winding_numbers(loop, [1.0, 1.0 + 2.0j, -2.0])
        assert list(w) == [1, 0, 0]

    def test_reversed_orientation(self):
        loop = reverse_path((Arc(0.0 + 0.0j, 1.0, 0.0, 2 * np.pi),))
        assert list(winding_numbers(loop, [0.0])) == [-1]

    def test_point_on_contour_rejected(self):
        loop = (Arc(0.0 + 0.0j, 1.0, 0.0, 2 * np.pi),)
        with pytest.raises(GeometryError):
            winding_numbers(loop, [1.0 + 1e-9j])


class TestSeparatingCycle:
    def test_ellipse_preferred(self):
        cyc = separating_cycle([0.5, 2.0], [0.0, -0.7, 3.0 + 1j], 0.01)
        assert len(cyc) == 1 and isinstance(cyc[0], EllipseArc)
        w = winding_numbers(cyc, [0.5, 2.0, 0.0, -0.7, 3.0 + 1j])
        assert list(w) == [1, 1, 0, 0, 0]

    def test_capsule_fallback_for_collinear_blocker(self):
        # 0.6 sits on the segment between 0.3 and its target partner
        cyc = separating_cycle([0.3, 10.0 / 3.0], [0.6, 0.0], 0.002)
        w = winding_numbers(cyc, [0.3, 10.0 / 3.0, 0.6, 0.0])
        assert list(w) == [1, 1, 0, 0]
        assert min_distance(cyc, [0.6, 0.0]) >= 0.002

    def test_impossible_margin(self):
        with pytest.raises(GeometryError):
            separating_cycle([0.0, 1.0], [0.5 + 0.001j, 0.5 - 0.001j], 0.05)


class TestRouteAndCapsule:
    def test_straight_when_clear(self):
        assert route(0.0, 1.0 + 0.0j, [5.0 + 5.0j], 0.1) == [0.0, 1.0 + 0.0j]

    def test_detour(self):
        poly = route(0.0, 1.0 + 0.0j, [0.5 + 0.0j], 0.1)
        assert len(poly) > 2
        for a, b in zip(poly[:-1], poly[1:]):
            seg = (Line(a, b),)
            assert min_distance(seg, [0.5 + 0.0j]) >= 0.099

    def test_capsule_windings(self):
        poly = route(0.0, 1.0 + 0.0j, [0.5 + 0.02j], 0.12)
        cyc = capsule(poly, 0.05)
        w = winding_numbers(cyc, [0.0, 1.0, 0.5 + 0.02j, -1.0])
        assert list(w) == [1, 1, 0, 0]

    def test_path_length_positive(self):
        cyc = capsule([0.0, 1.0 + 0.0j], 0.1)
        assert path_length(cyc) > 2.0
