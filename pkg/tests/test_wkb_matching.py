import math

import numpy as np
import pytest
from scipy.integrate import quad

import asymwell as aw
from asymwell import errors
from asymwell.specfun import pcf_d
from asymwell.wkb_matching import (LEFT_ANCHORED, RIGHT_ANCHORED,
                                   _ratio_formula, match_left, match_right,
                                   quadratic_action,
                                   quadratic_action_asymptotic)
from conftest import UNITS, make_pp


class TestBarrierAction:
    def test_symmetric_split(self, pp_symmetric):
        acts = aw.barrier_action(pp_symmetric, 0.5, c=0.0)
        assert acts.left_to_c == pytest.approx(acts.c_to_right, rel=1e-11)
        assert acts.total == pytest.approx(acts.left_to_c + acts.c_to_right,
                                           rel=1e-14)

    def test_total_independent_of_split(self, pp_symmetric):
        t1 = aw.barrier_action(pp_symmetric, 0.5, c=-0.7).total
        t2 = aw.barrier_action(pp_symmetric, 0.5, c=1.1).total
        assert t1 == pytest.approx(t2, rel=1e-12)

    def test_against_adaptive_quadrature(self, pp_symmetric):
        # independent oracle: QUADPACK with the turning points declared
        tp = aw.turning_points(pp_symmetric, 0.5)
        val, est = quad(lambda x: math.sqrt(max(2.0 * (pp_symmetric.v_at(x) - 0.5), 0.0)),
                        tp.a_nu_l, tp.a_nu_r, limit=200,
                        points=[tp.a_nu_l, tp.a_nu_r], epsabs=1e-12, epsrel=1e-11)
        acts = aw.barrier_action(pp_symmetric, 0.5)
        assert acts.total == pytest.approx(val, rel=1e-9)

    def test_pure_parabolic_patch(self):
        # wide parabolic region: the action from the turning point to the
        # join is exactly the scaled-coordinate integral int sqrt(z^2-1)
        pot = make_pp(a=7.0, d=5.0, height=13.5)
        acts = aw.barrier_action(pot, 0.5, c=pot.left.a + 3.0)
        assert acts.left_to_c == pytest.approx(quadratic_action(0.0, 3.0),
                                               rel=1e-10)

    def test_above_barrier_rejected(self, pp_symmetric):
        with pytest.raises(errors.NoBarrierError):
            aw.barrier_action(pp_symmetric, 5.0)

    def test_c_outside_rejected(self, pp_symmetric):
        with pytest.raises(errors.DomainError):
            aw.barrier_action(pp_symmetric, 0.5, c=-3.0)


class TestQuadraticAction:
    def test_ground_window(self):
        exact = 3.0 * math.sqrt(8.0) / 2.0 - 0.5 * math.log(3.0 + math.sqrt(8.0))
        assert quadratic_action(0.0, 3.0) == pytest.approx(exact, rel=1e-14)
        assert quadratic_action(0.0, 3.0) == pytest.approx(3.3612671001, rel=1e-9)

    def test_empty_interval(self):
        assert quadratic_action(1.5, math.sqrt(4.0)) == 0.0

    def test_asymptotic_form(self):
        exact = quadratic_action(0.0, 8.0)
        asym = quadratic_action_asymptotic(0.0, 8.0)
        assert abs(exact - asym) == pytest.approx(9.804e-4, rel=1e-3)
        assert abs(exact - asym) < 1e-2

    def test_below_turning_rejected(self):
        with pytest.raises(errors.DomainError):
            quadratic_action(1.0, 1.0)


class TestMatching:
    WELL = aw.WellParams.from_omega(0.0, 1.0, 0.0, 3.0, UNITS)

    def test_integer_order_kills_growing(self):
        coeffs = match_left(1.0, 0.0, 2.0, self.WELL)
        assert coeffs.a_coeff == 0.0

    def test_left_decaying_value(self):
        # sqrt(g_0)/(4 pi)^(1/4) e^{-2}, checked in extended precision
        coeffs = match_left(1.0, 0.0, 2.0, self.WELL)
        assert coeffs.b_coeff == pytest.approx(0.0745285064195, rel=1e-9)

    def test_left_sign_at_half_order(self):
        coeffs = match_left(1.0, 0.5, 2.0, self.WELL)
        assert coeffs.a_coeff < 0.0

    def test_right_integer_order_kills_decaying(self):
        coeffs = match_right(1.0, 0.0, 2.0, self.WELL)
        assert coeffs.b_coeff == 0.0

    def test_right_growing_value(self):
        coeffs = match_right(1.0, 0.0, 2.0, self.WELL)
        assert coeffs.a_coeff == pytest.approx(0.0745285064195, rel=1e-9)

    def test_right_sign_at_half_order(self):
        coeffs = match_right(1.0, 0.5, 2.0, self.WELL)
        assert coeffs.b_coeff < 0.0

    def test_validity_tags(self):
        assert match_left(1.0, 0.0, 4.0, self.WELL).validity == "hermite_limit"
        assert match_left(1.0, 0.3, 4.0, self.WELL).validity == "moderate"


class TestAmplitudeRatio:
    def test_formula_against_reference(self):
        # nu_L = 0 exact, nu_R = 0.3, S = 5, equal lengths: the growing
        # exponential makes the state left-localized
        val = _ratio_formula(0.0, 0.3, 1.0, 1.0, 5.0, LEFT_ANCHORED)
        assert val == pytest.approx(-214.142717729, rel=1e-9)
        assert abs(val) > math.exp(5.0)

    def test_unit_ratio_at_symmetric_roots(self, pp_symmetric):
        sol = aw.solve_pair_exact(pp_symmetric, 0, 0)
        for energy in (sol.e_minus, sol.e_plus):
            ratio = aw.amplitude_ratio(pp_symmetric, energy, LEFT_ANCHORED)
            assert abs(ratio) == pytest.approx(1.0, abs=2e-3)

    def test_consistency_closure(self, pp_symmetric):
        # at solved energies both anchored ratios must coincide: their
        # quotient is exactly the quantization condition
        sol = aw.solve_pair_exact(pp_symmetric, 0, 0)
        for energy in (sol.e_minus, sol.e_plus):
            lr2 = aw.amplitude_ratio(pp_symmetric, energy, LEFT_ANCHORED)
            lr1 = aw.amplitude_ratio(pp_symmetric, energy, RIGHT_ANCHORED)
            assert lr2 == pytest.approx(lr1, rel=1e-8)

    def test_half_integer_singular(self, pp_symmetric):
        # nu_L = 1/2 exactly: cos(pi nu_L) = 0
        with pytest.raises(errors.SingularInputError):
            aw.amplitude_ratio(pp_symmetric, 1.0, LEFT_ANCHORED)

    def test_integer_singular_right(self, pp_symmetric):
        with pytest.raises(errors.SingularInputError):
            aw.amplitude_ratio(pp_symmetric, 0.5, RIGHT_ANCHORED)


class TestWkbWavefunction:
    def test_unit_decaying_branch_at_anchor(self, pp_symmetric):
        coeffs = match_left(1.0, 0.0, 1.0, pp_symmetric.left)
        coeffs = type(coeffs)(a_coeff=0.0, b_coeff=1.0, c_left=1.0,
                              c_right=float("nan"), branch=coeffs.branch,
                              c_used=0.0, validity=coeffs.validity)
        p_c = math.sqrt(2.0 * (pp_symmetric.v_at(0.0) - 0.5))
        val = aw.wkb_wavefunction(pp_symmetric, 0.5, coeffs, 0.0, c=0.0)
        assert val == pytest.approx(math.sqrt(1.0 / p_c), rel=1e-12)

    def test_even_combination_is_flat_at_center(self, pp_symmetric):
        coeffs = match_left(1.0, 0.0, 1.0, pp_symmetric.left)
        coeffs = type(coeffs)(a_coeff=0.5, b_coeff=0.5, c_left=1.0,
                              c_right=float("nan"), branch=coeffs.branch,
                              c_used=0.0, validity=coeffs.validity)
        h = 1e-5
        lo = aw.wkb_wavefunction(pp_symmetric, 0.5, coeffs, -h, c=0.0)
        hi = aw.wkb_wavefunction(pp_symmetric, 0.5, coeffs, +h, c=0.0)
        mid = aw.wkb_wavefunction(pp_symmetric, 0.5, coeffs, 0.0, c=0.0)
        assert abs(hi - lo) / (2.0 * h) < 1e-6 * abs(mid) / h**0.0

    def test_matches_well_solution_in_overlap(self):
        # deep parabolic region: the WKB decaying branch anchored to the
        # left well reproduces C_L D_0 four oscillator lengths in
        pot = make_pp(a=7.0, d=5.0, height=13.5)
        energy = 0.5  # nu_L = 0 exactly
        acts = aw.barrier_action(pot, energy)
        coeffs = match_left(1.0, 0.0, acts.left_to_c, pot.left)
        x = pot.left.a + 4.0 * pot.left.l
        psi_wkb = aw.wkb_wavefunction(pot, energy, coeffs, x)
        z = math.sqrt(2.0) * (pot.left.a - x) / pot.left.l
        psi_exact = pcf_d(0.0, z).value
        assert psi_wkb == pytest.approx(psi_exact, rel=0.02)

    def test_too_close_to_turning_point(self, pp_symmetric):
        coeffs = match_left(1.0, 0.0, 1.0, pp_symmetric.left)
        with pytest.raises(errors.ValidityError):
            aw.wkb_wavefunction(pp_symmetric, 0.5, coeffs, -2.1, c=0.0)


class TestMixedParityResonance:
    def test_amplitude_ratio_unity(self):
        # (n_l, n_r) = (0, 1) degenerate via a one-quantum floor offset,
        # equal oscillator lengths: the near-degenerate limit predicts
        # |C_L/C_R| = sqrt(1! l_R / (0! l_L)) = 1 at the pair roots
        import warnings
        left = aw.WellParams.from_omega(-3.4, 1.0, 1.0, 2.4, UNITS)
        right = aw.WellParams.from_omega(3.4, 1.0, 0.0, 2.4, UNITS)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            pot = aw.build_piecewise_parabolic(left, right, (2.4, 2.4), 4.3)
        sol = aw.solve_pair_exact(pot, 0, 1)
        for energy in (sol.e_minus, sol.e_plus):
            lr2 = aw.amplitude_ratio(pot, energy, LEFT_ANCHORED)
            lr1 = aw.amplitude_ratio(pot, energy, RIGHT_ANCHORED)
            assert abs(lr2) == pytest.approx(1.0, abs=1e-3)
            assert lr2 == pytest.approx(lr1, rel=1e-8)
        # note: the oracle gap here exceeds sqrt(delta_eps^2 + Delta^2)
        # with harmonic eps's because the barrier distorts the n = 0 and
        # n = 1 diagonal energies by different amounts; same-parity pairs
        # are free of that asymmetry
