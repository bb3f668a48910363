import numpy as np
import pytest

from cmctori.bspace import compute_b_basis
from cmctori.curve import adapted_homology, from_roots
from cmctori.errors import CertificateError, DomainError
from cmctori.invariants import mobius_act
from cmctori.periods import QuadratureConfig
from cmctori.search import (
    NewtonOptions,
    certificate_to_dict,
    certify,
    density_scan,
    grassmann_plane,
    nearest_rational_plane,
    newton_refine,
    plane_distance,
    revalidate_certificate,
    sample_curve,
    search_torus,
)

CFG = QuadratureConfig()


@pytest.fixture(scope="module")
def g1_setup():
    curve = from_roots([0.5])
    atlas = adapted_homology(curve)
    basis = compute_b_basis(curve, atlas, CFG)
    plane = grassmann_plane(curve, 1j, -1j, atlas, CFG, basis=basis)
    return curve, atlas, basis, plane


class TestGrassmannPlane:
    def test_orthonormal(self, g1_setup):
        _, _, _, plane = g1_setup
        f = plane.frame
        assert np.allclose(f.T @ f, np.eye(2), atol=1e-12)

    def test_basis_independence(self, g1_setup):
        curve, atlas, basis, plane = g1_setup
        rng = np.random.default_rng(2)
        for _ in range(5):
            m = rng.normal(size=(2, 2))
            if abs(np.linalg.det(m)) < 0.2:
                continue
            plane2 = grassmann_plane(
                curve, 1j, -1j, atlas, CFG, basis=mobius_act(basis, m)
            )
            assert plane_distance(plane.frame, plane2.frame) < 1e-9

    def test_quadrature_stability(self, g1_setup):
        curve, atlas, basis, plane = g1_setup
        plane2 = grassmann_plane(curve, 1j, -1j, atlas, CFG.doubled(), basis=basis)
        assert plane_distance(plane.frame, plane2.frame) < 1e-8


class TestNearestRationalPlane:
    def test_axis_plane(self):
        frame = np.zeros((4, 2))
        frame[0, 0] = 1.0
        frame[1, 1] = 1.0
        approx = nearest_rational_plane(frame, 4)
        assert approx.distance < 1e-12
        span = np.stack([approx.m1, approx.m2]).astype(float)
        assert np.linalg.matrix_rank(span) == 2
        assert np.max(np.abs(span[:, 2:])) == 0

    def test_q_bound_validated(self):
        with pytest.raises(DomainError):
            nearest_rational_plane(np.eye(3)[:, :2], 0)

    def test_monotone_in_q(self, g1_setup):
        _, _, _, plane = g1_setup
        prev = None
        seed = None
        for q in (4, 8, 16, 32):
            approx = nearest_rational_plane(
                plane, q, seed_pairs=[seed] if seed else None
            )
            if prev is not None:
                assert approx.distance <= prev + 1e-15
            prev = approx.distance
            seed = (approx.m1, approx.m2)

    def test_entries_bounded(self, g1_setup):
        _, _, _, plane = g1_setup
        approx = nearest_rational_plane(plane, 8)
        assert np.max(np.abs(approx.m1)) <= 8
        assert np.max(np.abs(approx.m2)) <= 8


class TestNewtonRefine:
    def test_genus_zero_trivial(self):
        res = newton_refine(from_roots([]), 1j, -1j, [1, 0], [0, 1])
        assert res.ok and res.residual == 0.0

    def test_g1_convergence(self, g1_setup):
        curve, _, _, plane = g1_setup
        approx = nearest_rational_plane(plane, 8)
        res = newton_refine(curve, 1j, -1j, approx.m1, approx.m2, cfg=CFG)
        assert res.ok
        assert res.residual < 1e-8
        assert res.iterations <= 30

    def test_superlinear_tail(self, g1_setup):
        curve, _, _, plane = g1_setup
        approx = nearest_rational_plane(plane, 8)
        res = newton_refine(curve, 1j, -1j, approx.m1, approx.m2, cfg=CFG)
        tail = [v for v in res.trace if v > 1e-14]
        ratios = [b / a for a, b in zip(tail[:-1], tail[1:])]
        assert ratios[-1] < 0.05  # far better than linear halving

    def test_far_target_fails_controlled(self, g1_setup):
        curve, _, _, _ = g1_setup
        res = newton_refine(
            curve, 1j, -1j, [7, -8, 3], [1, 6, -5],
            NewtonOptions(max_iter=10), CFG,
        )
        assert not res.ok
        assert len(res.trace) >= 1
        # the damped iteration never increases the residual
        assert all(b <= a * (1 + 1e-12) for a, b in zip(res.trace[:-1], res.trace[1:]))


class TestCertify:
    def test_genus_zero(self):
        cert = certify(from_roots([]), 1j, -1j, [1, 0], [0, 1], CFG)
        assert cert.residual < 1e-10
        assert cert.residual_doubled < 1e-10

    def test_tampered_targets_revoked(self, g1_setup):
        curve, _, _, plane = g1_setup
        approx = nearest_rational_plane(plane, 8)
        res = newton_refine(curve, 1j, -1j, approx.m1, approx.m2, cfg=CFG)
        assert res.ok
        certify(res.curve, 1j, -1j, approx.m1, approx.m2, CFG)
        bad = approx.m1.copy()
        bad[0] += 1
        with pytest.raises(CertificateError):
            certify(res.curve, 1j, -1j, bad, approx.m2, CFG)

    def test_dependent_targets_rejected(self):
        with pytest.raises(DomainError):
            certify(from_roots([]), 1j, -1j, [1, 0], [2, 0], CFG)

    def test_serialization_revalidates(self, g1_setup):
        curve, _, _, plane = g1_setup
        approx = nearest_rational_plane(plane, 8)
        res = newton_refine(curve, 1j, -1j, approx.m1, approx.m2, cfg=CFG)
        cert = certify(res.curve, 1j, -1j, approx.m1, approx.m2, CFG, seed=7)
        data = certificate_to_dict(cert)
        cert2 = revalidate_certificate(data)
        assert cert2.residual < 1e-8
        assert np.array_equal(cert2.m1, cert.m1)
        assert cert2.seed == 7


class TestSampling:
    def test_annulus_and_separation(self):
        rng = np.random.default_rng(0)
        for g in (1, 2, 3):
            c = sample_curve(g, rng)
            for e in c.etas:
                assert 0.2 <= abs(e) <= 0.8


class TestPipeline:
    def test_search_g1(self):
        out = search_torus(1, 1j, -1j, q=8, seed=11, cfg=CFG)
        assert out.ok
        assert out.certificate.residual < 1e-8

    def test_density_scan_smoke(self):
        res = density_scan(1, 1j, -1j, samples=6, q_list=(4, 8), seed=5, cfg=CFG)
        assert len(res.rows) == 6
        for row in res.rows:
            assert row.distances[8] <= row.distances[4] + 1e-15
        assert 0.0 <= res.r_fraction <= 1.0

    def test_density_scan_workers_deterministic(self):
        a = density_scan(1, 1j, -1j, samples=4, q_list=(4,), seed=9, cfg=CFG)
        b = density_scan(1, 1j, -1j, samples=4, q_list=(4,), seed=9, cfg=CFG, workers=2)
        for ra, rb in zip(a.rows, b.rows):
            assert ra.etas == rb.etas
            assert ra.distances == rb.distances
