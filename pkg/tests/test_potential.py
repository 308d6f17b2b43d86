import math
import warnings

import numpy as np
import pytest

import asymwell as aw
from asymwell import errors
from conftest import UNITS, make_pp, make_quartic


class TestBiasedQuartic:
    def test_symmetric_wells(self):
        pot = make_quartic(4.0, 1.0 / 128.0)
        assert pot.left.a == pytest.approx(-4.0, abs=1e-10)
        assert pot.right.a == pytest.approx(4.0, abs=1e-10)
        assert pot.left.omega == pytest.approx(1.0, abs=1e-6)
        assert pot.right.omega == pytest.approx(1.0, abs=1e-6)
        assert pot.left.v_min == pytest.approx(0.0, abs=1e-12)

    def test_barrier_top(self):
        pot = make_quartic(4.0, 1.0 / 128.0)
        x_top, v_top = aw.barrier_top(pot)
        assert x_top == pytest.approx(0.0, abs=1e-9)
        assert v_top == pytest.approx(2.0, rel=1e-12)

    def test_symmetry_pointwise(self):
        pot = make_quartic(4.0, 1.0 / 128.0)
        x = np.linspace(0.0, 8.0, 401)
        assert np.max(np.abs(pot.V(x) - pot.V(-x))) < 1e-12

    def test_bias_lowers_left_minimum(self):
        # oracle: exact roots of the stationary cubic x^3 - 16 x + 0.32
        pot = make_quartic(4.0, 1.0 / 128.0, bias=0.01)
        diff = pot.right.v_min - pot.left.v_min
        assert diff == pytest.approx(0.079999749992, rel=1e-9)  # ~ 2*bias*a
        assert pot.left.a == pytest.approx(-4.009962747968, abs=1e-9)
        assert pot.right.a == pytest.approx(3.989962247930, abs=1e-9)

    def test_bias_splits_curvatures(self):
        pot = make_quartic(4.0, 1.0 / 128.0, bias=0.01)
        # exact: omega = sqrt(4k(3x0^2 - a^2)) at the cubic-root minima
        assert pot.left.omega == pytest.approx(1.003733712823, rel=1e-7)
        assert pot.right.omega == pytest.approx(0.996233472569, rel=1e-7)
        assert pot.left.omega != pot.right.omega

    def test_overbias_rejected(self):
        with pytest.raises(errors.ConstructionError):
            make_quartic(4.0, 1.0 / 128.0, bias=0.8)

    def test_shallow_barrier_warns(self):
        with pytest.warns(UserWarning):
            aw.build_biased_quartic(3.0, 1.0 / 128.0)

    def test_barrier_below_zero_point_rejected(self):
        with pytest.raises(errors.ConstructionError):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                aw.build_biased_quartic(2.1, 1.0 / 128.0)


class TestPiecewiseParabolic:
    def test_exact_parabola_region(self):
        left = aw.WellParams.from_omega(-5.0, 1.0, 0.0, 3.0, UNITS)
        right = aw.WellParams.from_omega(5.0, 1.0, 0.0, 3.0, UNITS)
        pot = aw.build_piecewise_parabolic(left, right, (3.0, 3.0), 6.0)
        assert pot.v_at(-5.0) == 0.0
        x = np.linspace(-8.0, -2.0, 301)
        assert np.max(np.abs(pot.V(x) - 0.5 * (x + 5.0) ** 2)) == 0.0
        assert pot.v_top == pytest.approx(6.0, rel=1e-12)

    def test_floor_offset_shifts_level(self):
        left = aw.WellParams.from_omega(-5.0, 1.0, 0.0, 3.0, UNITS)
        right = aw.WellParams.from_omega(5.0, 1.0, 0.5, 3.0, UNITS)
        pot = aw.build_piecewise_parabolic(left, right, (3.0, 3.0), 6.0)
        eps_l = aw.epsilon_level(pot.left, 0, UNITS)
        eps_r = aw.epsilon_level(pot.right, 0, UNITS)
        assert eps_r - eps_l == pytest.approx(0.5, abs=1e-14)

    def test_oscillator_lengths(self):
        left = aw.WellParams.from_omega(-5.0, 1.0, 0.0, 2.0, UNITS)
        right = aw.WellParams.from_omega(5.0, 2.0, 0.0, 2.0, UNITS)
        pot = aw.build_piecewise_parabolic(left, right, (2.0, 2.0), 9.0)
        assert pot.left.l == pytest.approx(1.0)
        assert pot.right.l == pytest.approx(1.0 / math.sqrt(2.0))

    def test_c1_continuity(self):
        left = aw.WellParams.from_omega(-5.0, 1.0, 0.0, 3.0, UNITS)
        right = aw.WellParams.from_omega(5.0, 1.0, 0.0, 3.0, UNITS)
        pot = aw.build_piecewise_parabolic(left, right, (3.0, 3.0), 6.0)
        # V and V' continuous across every knot (V'' jumps are allowed)
        eps = 1e-9
        probes = np.linspace(-2.5, 2.5, 101)
        v_left = pot.V(probes - eps)
        v_right = pot.V(probes + eps)
        dv_left = pot.dV(probes - eps)
        dv_right = pot.dV(probes + eps)
        assert np.max(np.abs(v_right - v_left)) < 1e-7
        assert np.max(np.abs(dv_right - dv_left)) < 1e-6
        # the cap never exceeds the designed height and attains it
        xs = np.linspace(-2.0, 2.0, 4001)
        vc = pot.V(xs)
        assert np.max(vc) <= 6.0 + 1e-12
        assert pot.v_at(0.0) == pytest.approx(6.0, rel=1e-13)

    def test_overlapping_joins_rejected(self):
        left = aw.WellParams.from_omega(-2.0, 1.0, 0.0, 3.0, UNITS)
        right = aw.WellParams.from_omega(2.0, 1.0, 0.0, 3.0, UNITS)
        with pytest.raises(errors.ConstructionError):
            aw.build_piecewise_parabolic(left, right, (3.0, 3.0), 6.0)

    def test_low_cap_rejected(self):
        left = aw.WellParams.from_omega(-5.0, 1.0, 0.0, 3.0, UNITS)
        right = aw.WellParams.from_omega(5.0, 1.0, 0.0, 3.0, UNITS)
        with pytest.raises(errors.ConstructionError):
            aw.build_piecewise_parabolic(left, right, (3.0, 3.0), 4.0)


class TestLocateWells:
    def test_quartic_closed_form(self):
        pot = make_quartic(4.0, 1.0 / 128.0)
        left, right = aw.locate_wells(pot)
        assert left.a == pytest.approx(-4.0, abs=1e-10)
        assert left.omega == pytest.approx(1.0, abs=1e-6)

    def test_piecewise_round_trip(self):
        pot = make_pp()
        left, right = aw.locate_wells(pot)
        assert left.a == pytest.approx(pot.left.a, abs=1e-10)
        assert left.omega == pytest.approx(pot.left.omega, abs=1e-8)
        assert left.v_min == pytest.approx(pot.left.v_min, abs=1e-10)
        assert right.a == pytest.approx(pot.right.a, abs=1e-10)
        # the certified extent may exceed the join width slightly: the cap
        # continues the parabola to first order, so the residual stays
        # below tolerance a little past the join
        assert left.parabolic_extent >= pot.left.parabolic_extent - 1e-9
        assert left.parabolic_extent <= pot.left.parabolic_extent + 0.05

    def test_biased_quartic_distinct_curvatures(self):
        pot = make_quartic(4.0, 1.0 / 128.0, bias=0.01)
        left, right = aw.locate_wells(pot)
        assert abs(left.omega - right.omega) > 1e-3

    def test_single_well_rejected(self):
        x = np.linspace(-5.0, 5.0, 201)
        with pytest.raises(errors.ShapeError):
            aw.build_from_table(x, 0.5 * x * x)


class TestParabolicCertification:
    def test_piecewise_is_exact(self):
        pot = make_pp()
        d = pot.left.parabolic_extent
        x = pot.left.a + np.linspace(-d, d, 801)
        model = pot.left.v_min + 0.5 * pot.left.omega ** 2 * (x - pot.left.a) ** 2
        assert np.max(np.abs(pot.V(x) - model)) <= 1e-9 * UNITS.hbar * pot.left.omega

    def test_quartic_within_tolerance(self):
        pot = make_quartic(4.0, 1.0 / 128.0)
        d = pot.left.parabolic_extent
        assert d > 0.0
        x = pot.left.a + np.linspace(-d, d, 801)
        model = pot.left.v_min + 0.5 * pot.left.omega ** 2 * (x - pot.left.a) ** 2
        bound = aw.potential.DEFAULT_PARABOLIC_TOL * UNITS.hbar * pot.left.omega
        assert np.max(np.abs(pot.V(x) - model)) <= 1.5 * bound


class TestTurningPoints:
    def test_parabolic_ground_turning(self):
        left = aw.WellParams.from_omega(-5.0, 1.0, 0.0, 3.0, UNITS)
        right = aw.WellParams.from_omega(5.0, 1.0, 0.0, 3.0, UNITS)
        pot = aw.build_piecewise_parabolic(left, right, (3.0, 3.0), 6.0)
        tp = aw.turning_points(pot, 0.5)
        # parabola: turning at a + l*sqrt(2 nu + 1) with nu = 0
        assert tp.a_nu_l == pytest.approx(-4.0, abs=1e-12)
        assert tp.a_nu_r == pytest.approx(4.0, abs=1e-12)

    def test_symmetry(self, pp_symmetric):
        for e in (0.3, 0.5, 1.2, 2.5):
            tp = aw.turning_points(pp_symmetric, e)
            assert tp.a_nu_l == pytest.approx(-tp.a_nu_r, abs=1e-11)

    def test_quartic_closed_form(self):
        pot = make_quartic(4.0, 1.0 / 128.0)
        tp = aw.turning_points(pot, 0.5)
        # roots of k (x^2 - 16)^2 = 1/2: inner pair at sqrt(16 - 8)
        assert tp.a_nu_r == pytest.approx(math.sqrt(8.0), rel=1e-12)
        assert tp.a_nu_l == pytest.approx(-math.sqrt(8.0), rel=1e-12)

    def test_straddle_barrier_top(self, pp_symmetric):
        for e in np.linspace(0.2, 4.5, 9):
            tp = aw.turning_points(pp_symmetric, float(e))
            assert tp.a_nu_l < pp_symmetric.x_top < tp.a_nu_r

    def test_above_barrier_rejected(self, pp_symmetric):
        with pytest.raises(errors.NoBarrierError):
            aw.turning_points(pp_symmetric, 10.0)

    def test_below_floor_rejected(self, pp_symmetric):
        with pytest.raises(errors.DomainError):
            aw.turning_points(pp_symmetric, -0.5)


class TestTabulated:
    def test_csv_round_trip(self, tmp_path):
        pot = make_quartic(4.0, 1.0 / 128.0)
        x = np.linspace(*pot.domain, 4001)
        path = tmp_path / "table.csv"
        with open(path, "w") as fh:
            fh.write("x,V\n")
            for xi, vi in zip(x, pot.V(x)):
                fh.write(f"{xi:.17g},{vi:.17g}\n")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rebuilt = aw.build_from_csv(str(path))
        assert rebuilt.left.a == pytest.approx(-4.0, abs=1e-6)
        assert rebuilt.left.omega == pytest.approx(1.0, abs=1e-4)
        assert rebuilt.v_top == pytest.approx(2.0, rel=1e-6)

    def test_bad_table_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x,V\n1,2\n")
        with pytest.raises(errors.ConstructionError):
            aw.build_from_csv(str(path))


class TestImmutability:
    def test_with_c_returns_new(self, pp_symmetric):
        other = pp_symmetric.with_c(0.4)
        assert other.c == 0.4
        assert pp_symmetric.c != 0.4
        assert other.left == pp_symmetric.left

    def test_c_outside_rejected(self, pp_symmetric):
        with pytest.raises(errors.ConstructionError):
            pp_symmetric.with_c(5.0)
