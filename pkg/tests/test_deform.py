import math

import numpy as np
import pytest

from cmctori.bspace import basis_from_coords, compute_b_basis
from cmctori.curve import adapted_homology, from_roots
from cmctori.deform import (
    attach_handle,
    b_limit_polys,
    build_handle_family,
    deform_b_family,
    handle_limit_check,
    track_f_degree,
)
from cmctori.errors import DomainError, DoublePointError, PreconditionError
from cmctori.invariants import align_basis_at, classify, residue_sum
from cmctori.periods import QuadratureConfig
from cmctori.polyalg import CPoly, coeffs_close, is_star_symmetric

CFG = QuadratureConfig()


def g0_basis():
    return basis_from_coords(0, [1.0, 0.0], [0.0, 1.0])


class TestAttachHandle:
    def test_cosh_polynomial(self):
        c = attach_handle(from_roots([]), 1.0, 0.1)
        assert c.genus == 1
        assert abs(c.etas[0] - math.exp(-0.1)) < 1e-14
        expect = CPoly([-1.0, 2.0 * math.cosh(0.1), -1.0])
        assert coeffs_close(c.a, expect, 1e-13)

    def test_double_point_error(self):
        with pytest.raises(DoublePointError):
            attach_handle(from_roots([]), 1.0, 0.0)

    def test_alpha_off_circle(self):
        with pytest.raises(DomainError):
            attach_handle(from_roots([]), 0.9, 0.1)

    def test_negative_t_same_curve(self):
        a = attach_handle(from_roots([]), 1j, 0.2)
        b = attach_handle(from_roots([]), 1j, -0.2)
        assert a.etas == b.etas

    def test_genus_two_validates(self):
        base = from_roots([0.5])
        c = attach_handle(base, np.exp(1j * np.pi / 4), 0.05)
        assert c.genus == 2  # from_roots already ran the invariant suite

    def test_invariants_over_alpha_grid(self):
        base = from_roots([0.5])
        for k in range(0, 64, 7):
            alpha = np.exp(2j * np.pi * k / 64)
            for t in (0.5, 0.1, 1e-3):
                c = attach_handle(base, alpha, t)
                assert c.genus == 2


class TestBFamily:
    def test_value_condition_held(self):
        fam = build_handle_family(from_roots([]), g0_basis(), 1.0, (0.2, 0.1), CFG)
        for member in fam.members:
            for b, base_b in zip(member.basis.polys, fam.base_basis.polys):
                target = -1j * fam.alpha * fam.sqrt_alpha_bar * complex(base_b(0.0))
                assert abs(complex(b(0.0)) - target) < 1e-10

    def test_members_star_symmetric_and_admissible(self):
        fam = build_handle_family(from_roots([]), g0_basis(), 1j, (0.1,), CFG)
        m = fam.members[0]
        for b in m.basis.polys:
            assert is_star_symmetric(b, m.curve.genus + 1, 1e-10)
        assert m.basis.a_period_residual < 1e-8

    def test_limit_polynomials(self):
        # t -> 0 limit: i sqrt(conj(alpha)) (lambda - alpha) b
        fam = build_handle_family(from_roots([]), g0_basis(), 1.0, (1e-3,), CFG)
        lims = b_limit_polys(fam)
        b1t = fam.members[0].basis.b1
        b2t = fam.members[0].basis.b2
        assert max(np.abs(b1t.array - lims[0].array)) < 1e-6
        assert max(np.abs(b2t.array - lims[1].array)) < 1e-6
        # and the limits are star-symmetric of the member degree
        for lim in lims:
            assert is_star_symmetric(lim, 2, 1e-12)

    def test_coefficient_paths_contract(self):
        base = from_roots([0.5])
        atlas = adapted_homology(base)
        basis = compute_b_basis(base, atlas, CFG)
        fam = build_handle_family(base, basis, 1j, (0.08, 0.04, 0.02, 0.01), CFG)
        bases = deform_b_family(fam)
        jumps = []
        for cur, nxt in zip(bases[:-1], bases[1:]):
            jumps.append(max(np.abs(cur.b1.array - nxt.b1.array)))
        assert all(b < a for a, b in zip(jumps[:-1], jumps[1:]))


class TestTrackFDegree:
    def test_genus0_to_1(self):
        fam = build_handle_family(from_roots([]), g0_basis(), 1.0, (0.01,), CFG)
        rep = track_f_degree(fam)[0]
        assert rep.deg_f == 2
        assert len(rep.new_roots) == 2
        assert np.all(rep.new_circle_dists < 1e-3)

    def test_second_handle(self):
        base = from_roots([math.exp(-0.35)])
        atlas = adapted_homology(base)
        basis = compute_b_basis(base, atlas, CFG)
        fam = build_handle_family(base, basis, 1j, (0.01,), CFG)
        rep = track_f_degree(fam)[0]
        assert rep.deg_f == 3
        assert len(rep.new_roots) == 2
        assert np.all(rep.new_circle_dists < 1e-3)

    def test_shared_root_precondition(self):
        bb = g0_basis()
        shared = type(bb)(b1=bb.b1, b2=2.0 * bb.b1, gram=bb.gram, a_period_residual=0.0)
        fam = build_handle_family(from_roots([]), shared, 1.0, (0.1,), CFG)
        with pytest.raises(PreconditionError):
            track_f_degree(fam)


class TestLimitLaw:
    def test_genus0_sign_flip(self):
        """Aligned genus-0 base: residue sum -i/2, limit after one handle +i/2."""
        base = from_roots([])
        aligned = align_basis_at(g0_basis(), 1.0)
        assert abs(residue_sum(base.a, aligned.b1, aligned.b2) - (-0.5j)) < 1e-12
        fam = build_handle_family(base, aligned, 1.0, (0.2, 0.1, 0.05, 0.025), CFG)
        rep = handle_limit_check(fam)
        assert abs(rep.target - 0.5j) < 1e-12
        assert rep.error < 1e-4
        assert rep.ok
        assert rep.observed_order >= 1.0

    def test_monotone_trend(self):
        base = from_roots([])
        aligned = align_basis_at(g0_basis(), 1.0)
        fam = build_handle_family(base, aligned, 1.0, (0.2, 0.1, 0.05, 0.025), CFG)
        rep = handle_limit_check(fam)
        gaps = [abs(s - rep.target) for s in rep.sums]
        assert all(b < a for a, b in zip(gaps[:-1], gaps[1:]))

    def test_unaligned_precondition(self):
        with pytest.raises(PreconditionError):
            fam = build_handle_family(from_roots([]), g0_basis(), 1.0, (0.1,), CFG)
            handle_limit_check(fam)

    def test_genus1_to_2(self):
        base = from_roots([math.exp(-0.35)])
        atlas = adapted_homology(base)
        basis = compute_b_basis(base, atlas, CFG)
        alpha = 1j
        aligned = align_basis_at(basis, alpha)
        base_sum = residue_sum(base.a, aligned.b1, aligned.b2)
        res_alpha = complex(base.a(alpha)) / (
            complex(aligned.b1.deriv()(alpha)) * complex(aligned.b2(alpha))
        )
        fam = build_handle_family(base, aligned, alpha, (0.2, 0.1, 0.05, 0.025), CFG)
        rep = handle_limit_check(fam)
        assert abs(rep.target - (base_sum - 2 * res_alpha)) < 1e-12
        assert rep.error < 1e-4
        assert rep.ok

    def test_member_classification_sign(self):
        """The deformed basis residue approaches minus the base value; the
        genus-one members stay in the regular set."""
        base = from_roots([])
        aligned = align_basis_at(g0_basis(), 1.0)
        fam = build_handle_family(base, aligned, 1.0, (0.05,), CFG)
        m = fam.members[0]
        val = residue_sum(m.curve.a, m.basis.b1, m.basis.b2)
        assert abs(val - 0.5j) < 5e-3
        label = classify(m.curve, m.basis)
        assert label.in_R
