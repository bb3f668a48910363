import numpy as np
import pytest

from cmctori.bspace import basis_from_coords, compute_b_basis, real_parametrization
from cmctori.curve import adapted_homology, from_roots
from cmctori.periods import QuadratureConfig, a_periods
from cmctori.polyalg import CPoly, coeffs_close, is_star_symmetric
from cmctori.search import plane_distance

CFG = QuadratureConfig()


class TestRealParametrization:
    def test_genus_zero(self):
        basis = real_parametrization(0)
        assert len(basis) == 2
        assert coeffs_close(basis[0], CPoly([1.0, 1.0]), 1e-15)
        assert coeffs_close(basis[1], CPoly([1j, -1j]), 1e-15)

    def test_genus_one(self):
        basis = real_parametrization(1)
        assert len(basis) == 3
        assert coeffs_close(basis[0], CPoly([1.0, 0.0, 1.0]), 1e-15)
        assert coeffs_close(basis[1], CPoly([1j, 0.0, -1j]), 1e-15)
        assert coeffs_close(basis[2], CPoly([0.0, 1.0, 0.0]), 1e-15)

    def test_dimension_count(self):
        for g in range(6):
            basis = real_parametrization(g)
            assert len(basis) == g + 2
            for b in basis:
                assert is_star_symmetric(b, g + 1)

    def test_spanning(self):
        # the real coordinates of the basis vectors are linearly independent
        for g in range(4):
            basis = real_parametrization(g)
            mat = np.zeros((len(basis), 2 * (g + 2)))
            for i, b in enumerate(basis):
                arr = np.zeros(g + 2, dtype=complex)
                arr[: len(b.coeffs)] = b.array
                mat[i] = np.concatenate([arr.real, arr.imag])
            assert np.linalg.matrix_rank(mat) == g + 2


class TestComputeBBasis:
    def test_genus_zero_full_space(self):
        c = from_roots([])
        basis = compute_b_basis(c, adapted_homology(c), CFG)
        assert coeffs_close(basis.b1, CPoly([1.0, 1.0]), 1e-14)
        assert coeffs_close(basis.b2, CPoly([1j, -1j]), 1e-14)

    def test_members_satisfy_reality_and_a_periods(self):
        c = from_roots([0.5])
        atlas = adapted_homology(c)
        basis = compute_b_basis(c, atlas, CFG)
        for b in basis.polys:
            assert is_star_symmetric(b, c.genus + 1, 1e-12)
            ap = a_periods(c, b, atlas, CFG)
            assert np.max(np.abs(ap)) < 1e-8
        assert basis.a_period_residual < 1e-8
        assert np.linalg.det(basis.gram) > 1e-12

    def test_rank_is_genus(self):
        rng = np.random.default_rng(9)
        for g in (1, 2, 3):
            r = 0.3 + 0.4 * rng.random(g)
            etas = r * np.exp(2j * np.pi * rng.random(g))
            c = from_roots(etas)
            atlas = adapted_homology(c)
            basis, diag = compute_b_basis(c, atlas, CFG, return_diagnostics=True)
            s = diag["singular_values"]
            assert len(s) == g
            assert s[-1] > 1e-8 * max(s[0], 1.0)
            assert basis.a_period_residual < 1e-8

    def test_span_stable_under_node_doubling(self):
        c = from_roots([0.5, -0.3 + 0.4j])
        atlas = adapted_homology(c)
        b_lo, d_lo = compute_b_basis(c, atlas, CFG, return_diagnostics=True)
        b_hi, d_hi = compute_b_basis(c, atlas, CFG.doubled(), return_diagnostics=True)
        f_lo = np.stack(d_lo["coords"], axis=1)
        f_hi = np.stack(d_hi["coords"], axis=1)
        assert plane_distance(f_lo, f_hi) < 1e-8


class TestBasisFromCoords:
    def test_reconstruction(self):
        bb = basis_from_coords(0, [1.0, 0.0], [0.0, 1.0])
        assert coeffs_close(bb.b1, CPoly([1.0, 1.0]), 1e-15)
        assert coeffs_close(bb.b2, CPoly([1j, -1j]), 1e-15)
        assert np.allclose(bb.gram, [[2.0, 0.0], [0.0, 2.0]])
