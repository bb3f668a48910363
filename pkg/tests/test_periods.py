import numpy as np
import pytest

from cmctori.contours import Arc
from cmctori.curve import Contour, adapted_homology, from_roots, gamma_paths
from cmctori.errors import DomainError, PreconditionError
from cmctori.periods import (
    QuadratureConfig,
    a_periods,
    b_periods,
    gamma_periods,
    integrate_theta,
    integrate_theta_many,
    phi_vector,
)
from cmctori.polyalg import CPoly

CFG = QuadratureConfig()


def gamma_oracle(c: complex, theta: float) -> complex:
    """Independent genus-0 value of the gamma integral for b = c + conj(c) l.

    Antiderivative of (c l^{-3/2} + conj(c) l^{-1/2}): q = 2(conj(c) sqrt(l)
    - c / sqrt(l)); the loop around 0 lands on the other sheet, so the
    integral is -2 q evaluated with the anchored branch sqrt(e^{i theta'})
    = e^{i theta'/2}, theta' = theta mod 2 pi.
    """
    thp = theta % (2.0 * np.pi)
    root = np.exp(1j * thp / 2.0)
    q = 2.0 * (np.conj(c) * root - c / root)
    return -2.0 * q


class TestQuadratureConfig:
    def test_validation(self):
        with pytest.raises(DomainError):
            QuadratureConfig(base_nodes=4)
        with pytest.raises(DomainError):
            QuadratureConfig(rel_tol=0.0)

    def test_doubled(self):
        assert QuadratureConfig().doubled().base_nodes == 512


class TestGenusZeroOracle:
    def test_spec_value(self):
        c0 = from_roots([])
        b = CPoly([1.0, 1.0])
        g1, _ = gamma_paths(c0, 1j, -1j)
        val = integrate_theta(c0, b, g1, CFG, expect_sheet_flip=True)
        assert abs(abs(val) - 4.0 * np.sqrt(2.0)) < 1e-12
        assert abs(val.real) < 1e-12  # purely imaginary

    def test_random_draws(self):
        rng = np.random.default_rng(17)
        c0 = from_roots([])
        for _ in range(25):
            c = complex(rng.normal(), rng.normal())
            th = float(rng.uniform(-np.pi, np.pi))
            lam = np.exp(1j * th)
            other = np.exp(1j * (th + 1.3))
            b = CPoly([c, np.conj(c)])
            g1, _ = gamma_paths(c0, lam, other)
            val = integrate_theta(c0, b, g1, CFG, expect_sheet_flip=True)
            assert abs(val - gamma_oracle(c, th)) < 1e-10 * (1.0 + abs(val))

    def test_zero_b(self):
        c0 = from_roots([])
        g1, _ = gamma_paths(c0, 1j, -1j)
        assert abs(integrate_theta(c0, CPoly([]), g1, CFG)) == 0.0


class TestClosedContours:
    def test_holomorphic_integrand_vanishes(self):
        c0 = from_roots([])
        loop = Contour((Arc(3.0 + 0j, 0.4, 0.0, 2 * np.pi),))
        v = integrate_theta(c0, CPoly([1.0, 1.0]), loop, CFG, expect_sheet_flip=False)
        assert abs(v) < 1e-13

    def test_degree_bound(self):
        c0 = from_roots([])
        loop = Contour((Arc(3.0 + 0j, 0.4, 0.0, 2 * np.pi),))
        with pytest.raises(DomainError):
            integrate_theta(c0, CPoly([1.0, 0.0, 1.0]), loop, CFG)

    def test_node_doubling_stability(self):
        c = from_roots([0.5])
        atlas = adapted_homology(c)
        b = CPoly([0.0, 1.0])  # b = lambda, not in the admissible plane
        v1 = integrate_theta_many(c, [b], atlas.a_cycles[0], CFG)[0]
        v2 = integrate_theta_many(c, [b], atlas.a_cycles[0], CFG.doubled())[0]
        assert abs(v1 - v2) < 1e-10 * (1.0 + abs(v1))

    def test_high_node_reference(self):
        # value matches a reference run at 8x node count
        c = from_roots([0.5])
        atlas = adapted_homology(c)
        b = CPoly([0.0, 1.0])
        ref_cfg = QuadratureConfig(base_nodes=2048, rel_tol=1e-12)
        v = integrate_theta_many(c, [b], atlas.a_cycles[0], CFG)[0]
        ref = integrate_theta_many(c, [b], atlas.a_cycles[0], ref_cfg)[0]
        assert abs(v - ref) < 1e-9 * (1.0 + abs(ref))


class TestSymmetryForcedStructure:
    def test_a_period_reality_random_curves(self):
        rng = np.random.default_rng(4)
        for g in (1, 2):
            for _ in range(3):
                r = 0.25 + 0.5 * rng.random(g)
                etas = r * np.exp(2j * np.pi * rng.random(g))
                try:
                    c = from_roots(etas)
                    atlas = adapted_homology(c)
                except Exception:
                    continue
                coeffs = rng.normal(size=g + 2)
                from cmctori.bspace import real_parametrization

                b = sum(
                    (float(x) * e for x, e in zip(coeffs, real_parametrization(g))),
                    CPoly([]),
                )
                ap = a_periods(c, b, atlas, CFG)
                assert np.max(np.abs(ap.imag)) < 1e-8

    def test_phi_reality_for_members(self):
        from cmctori.bspace import compute_b_basis

        c = from_roots([0.5, -0.3 + 0.4j])
        atlas = adapted_homology(c)
        basis = compute_b_basis(c, atlas, CFG)
        for b in basis.polys:
            pv = phi_vector(c, b, 1j, -1j, atlas, CFG)
            assert pv.residual_imag < 1e-8
            assert len(pv.entries) == c.genus + 2

    def test_phi_precondition(self):
        c = from_roots([0.5])
        atlas = adapted_homology(c)
        with pytest.raises(PreconditionError):
            phi_vector(c, CPoly([1.0, 0.0, 1.0]), 1j, -1j, atlas, CFG)


class TestGammaRerouting:
    def test_mod_a_independence(self):
        """Rerouting gamma around infinity instead of 0 changes phi entries of
        admissible members by less than 1e-8 up to the A-period lattice."""
        from cmctori.bspace import compute_b_basis

        c = from_roots([0.5])
        atlas = adapted_homology(c)
        basis = compute_b_basis(c, atlas, CFG)
        for b in basis.polys:
            v0 = gamma_periods(c, b, 1j, -1j, CFG, around=0)
            v1 = gamma_periods(c, b, 1j, -1j, CFG, around=np.inf)
            d = np.abs(np.abs(v0) - np.abs(v1))
            assert np.max(d) < 1e-8

    def test_genus0_exact_equality(self):
        c0 = from_roots([])
        b = CPoly([1.0, 1.0])
        v0 = gamma_periods(c0, b, 1j, -1j, CFG, around=0)
        v1 = gamma_periods(c0, b, 1j, -1j, CFG, around=np.inf)
        assert np.max(np.abs(np.abs(v0) - np.abs(v1))) < 1e-10
