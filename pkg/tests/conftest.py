"""Shared test potentials and cached spectra.

The piecewise-parabolic well (separation 6.4, extent 3, cap height 4.7)
has barrier action S ~ 7.9 at the ground pair and satisfies the
quadratic-well hypothesis exactly; the quartic members cover the
only-approximately-parabolic regime.
"""

import warnings

import pytest

import asymwell as aw

UNITS = aw.UnitsConfig()


def make_pp(left_lift=0.0, a=3.2, omega=1.0, d=3.0, height=4.7):
    """Piecewise-parabolic double well; ``left_lift`` raises the left floor."""
    left = aw.WellParams.from_omega(-a, omega, left_lift, d, UNITS)
    right = aw.WellParams.from_omega(a, omega, 0.0, d, UNITS)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return aw.build_piecewise_parabolic(left, right, (d, d), height)


def make_quartic(half_separation, barrier_scale, bias=0.0):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return aw.build_biased_quartic(half_separation, barrier_scale, bias)


@pytest.fixture(scope="session")
def pp_symmetric():
    return make_pp()


@pytest.fixture(scope="session")
def quartic_mid():
    """S ~ 9 at the ground pair; splitting resolvable by the oracle."""
    return make_quartic(4.3, 1.0 / 128.0)


@pytest.fixture(scope="session")
def quartic_deep():
    """Deep, nearly parabolic wells; for eigenvalue-placement checks."""
    return make_quartic(7.0, 1.0 / 392.0)


@pytest.fixture(scope="session")
def pp_spectrum(pp_symmetric):
    grid = aw.default_grid(pp_symmetric, n_points=8001, count=4)
    return aw.solve_spectrum(pp_symmetric, grid, 4)


@pytest.fixture(scope="session")
def pp_delta(pp_symmetric):
    return aw.splitting_degenerate(pp_symmetric, 0, 0)
