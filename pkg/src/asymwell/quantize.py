"""Energy bookkeeping, the quantization condition, tunneling splittings,
and localization diagnostics.

An energy E is decomposed per well as E = v_min + (nu + 1/2) hbar omega.
For a near-degenerate pair (n_L, n_R) the offsets are measured from the
anchor E0 = (eps_L + eps_R)/2: nu_L = n_L + delta_nL + delta_L and
nu_R = n_R + delta_nR + (omega_L/omega_R) delta_L, which makes the sum
rule E_+ + E_- = eps_L + eps_R exact for the quadratic solver.

The quantization condition
    tan(pi nu_L) tan(pi nu_R) = (1/4) g_{nu_L} g_{nu_R} exp(-2 S(E))
is solved either exactly (bracketed root finding on its residual) or in
its quadratic small-offset approximation, which reproduces the two-level
splitting sqrt(delta_eps^2 + Delta^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from .errors import (DegeneracyStructureError, DomainError,
                     NearDegeneracyError, SingularInputError)
from .potential import DoubleWellPotential, UnitsConfig, WellParams
from .quadrature import tanh_sinh
from .specfun import _g_raw, cospi, pcf_d, tanpi
from .wkb_matching import LEFT_ANCHORED, RIGHT_ANCHORED, amplitude_ratio, barrier_action

ROOT_EXACT = "root_exact"
QUADRATIC_APPROX = "quadratic_approx"

# |delta_eps| must stay below hbar*min(omega)/NEAR_DEGENERACY_DIVISOR for
# the pair solvers (two-level validity knob)
NEAR_DEGENERACY_DIVISOR = 4.0

# search window half-width for the exact solver, hbar*min(omega)/WINDOW_DIVISOR
WINDOW_DIVISOR = 3.0

_NU_FLOOR = -0.45  # smallest order the residual machinery can evaluate


@dataclass(frozen=True)
class EnergyDecomposition:
    """E split per well into integer index, fixed detuning offset, and the
    energy-dependent offset delta_l shared by both wells."""

    energy: float
    nu_l: float
    nu_r: float
    n_l: int
    n_r: int
    delta_nl: float
    delta_nr: float
    delta_l: float
    eps_l: float
    eps_r: float
    delta_eps: float


@dataclass(frozen=True)
class PairSolution:
    """A near-degenerate level pair: eigenvalues, splitting, and method."""

    e_plus: float
    e_minus: float
    delta_split: float
    delta_e: float
    method: str
    decomposition_plus: EnergyDecomposition
    decomposition_minus: EnergyDecomposition


@dataclass(frozen=True)
class LocalizationReport:
    """Left/right probability ratio of a localized low-lying state."""

    ratio_r: float
    amp_ratio_sq: float
    branch: str
    left_prob: float | None = None
    right_prob: float | None = None

    def with_oracle(self, left_prob: float, right_prob: float) -> "LocalizationReport":
        return replace(self, left_prob=left_prob, right_prob=right_prob)


def nu_of_energy(well: WellParams, energy: float, units: UnitsConfig) -> float:
    """nu = (E - v_min)/(hbar omega) - 1/2; may be negative below the
    zero-point, callers restrict to the range they support."""
    return (energy - well.v_min) / (units.hbar * well.omega) - 0.5


def epsilon_level(well: WellParams, n: int, units: UnitsConfig) -> float:
    """Harmonic level v_min + (n + 1/2) hbar omega of one well."""
    if n != int(n) or n < 0:
        raise DomainError(f"level index must be a non-negative integer, got {n}")
    return well.v_min + (int(n) + 0.5) * units.hbar * well.omega


def decompose_energy(potential: DoubleWellPotential, energy: float,
                     n_l: int, n_r: int) -> EnergyDecomposition:
    """Bookkeeping of E against the (n_l, n_r) pair with the midpoint anchor."""
    units = potential.units
    eps_l = epsilon_level(potential.left, n_l, units)
    eps_r = epsilon_level(potential.right, n_r, units)
    anchor = 0.5 * (eps_l + eps_r)
    delta_nl = (anchor - eps_l) / (units.hbar * potential.left.omega)
    delta_nr = (anchor - eps_r) / (units.hbar * potential.right.omega)
    delta_l = (energy - anchor) / (units.hbar * potential.left.omega)
    return EnergyDecomposition(
        energy=energy,
        nu_l=nu_of_energy(potential.left, energy, units),
        nu_r=nu_of_energy(potential.right, energy, units),
        n_l=int(n_l), n_r=int(n_r),
        delta_nl=delta_nl, delta_nr=delta_nr, delta_l=delta_l,
        eps_l=eps_l, eps_r=eps_r, delta_eps=eps_l - eps_r)


def quantization_residual(potential: DoubleWellPotential, energy: float,
                          c: float | None = None) -> float:
    """f(E) = tan(pi nu_L) tan(pi nu_R)
              - (1/4) g_{nu_L} g_{nu_R} exp(-2 int p/hbar);
    its roots in a near-degenerate window are the pair eigenvalues."""
    units = potential.units
    nu_l = nu_of_energy(potential.left, energy, units)
    nu_r = nu_of_energy(potential.right, energy, units)
    if min(nu_l, nu_r) < _NU_FLOOR:
        raise DomainError(
            f"E={energy} too far below a zero-point (nu < {_NU_FLOOR})")
    if energy >= potential.v_top:
        raise DomainError(f"E={energy} not below the barrier top")
    for nu in (nu_l, nu_r):
        if abs(cospi(nu)) < 1e-12:
            raise SingularInputError(f"nu={nu} is half-integer: tan singular")
    action = barrier_action(potential, energy, c=c).total
    rhs = 0.25 * _g_raw(nu_l) * _g_raw(nu_r) * math.exp(-2.0 * action)
    return tanpi(nu_l) * tanpi(nu_r) - rhs


def _pair_preconditions(potential: DoubleWellPotential, n_l: int, n_r: int):
    units = potential.units
    eps_l = epsilon_level(potential.left, n_l, units)
    eps_r = epsilon_level(potential.right, n_r, units)
    omega_min = min(potential.left.omega, potential.right.omega)
    if abs(eps_l - eps_r) > units.hbar * omega_min / NEAR_DEGENERACY_DIVISOR:
        raise NearDegeneracyError(
            f"|eps_L - eps_R| = {abs(eps_l - eps_r):.6g} exceeds "
            f"hbar*min(omega)/{NEAR_DEGENERACY_DIVISOR:g}; levels are not near-degenerate")
    if max(eps_l, eps_r) >= potential.v_top:
        raise DomainError("pair levels must lie below the barrier top")
    return eps_l, eps_r, omega_min


def _anchor_action(potential: DoubleWellPotential, eps_l: float, eps_r: float) -> float:
    """Barrier action at the anchor energy between the integer-index
    turning points (the degenerate-pair prescription)."""
    return barrier_action(potential, 0.5 * (eps_l + eps_r)).total


def splitting_degenerate(potential: DoubleWellPotential, n_l: int, n_r: int) -> float:
    """Degenerate-pair tunneling splitting
    Delta = (hbar/pi) sqrt(g_{n_L} g_{n_R} omega_L omega_R) exp(-S)
    with S between the integer-index turning points."""
    eps_l, eps_r, _ = _pair_preconditions(potential, n_l, n_r)
    units = potential.units
    action = _anchor_action(potential, eps_l, eps_r)
    return (units.hbar / math.pi
            * math.sqrt(_g_raw(float(n_l)) * _g_raw(float(n_r))
                        * potential.left.omega * potential.right.omega)
            * math.exp(-action))


def solve_pair_quadratic(potential: DoubleWellPotential, n_l: int, n_r: int) -> PairSolution:
    """Quadratic approximation of the quantization condition:
    (delta_L + (omega_R/omega_L) delta_nR)(delta_L + delta_nL) =
    (omega_R/omega_L) [ sqrt(g_nL g_nR)/(2 pi) exp(-S) ]^2,
    solved in closed form.  The sum rule E_+ + E_- = eps_L + eps_R holds
    exactly by construction."""
    eps_l, eps_r, _ = _pair_preconditions(potential, n_l, n_r)
    units = potential.units
    om_l, om_r = potential.left.omega, potential.right.omega
    ratio = om_r / om_l
    action = _anchor_action(potential, eps_l, eps_r)
    rhs = ratio * (math.sqrt(_g_raw(float(n_l)) * _g_raw(float(n_r)))
                   / (2.0 * math.pi) * math.exp(-action)) ** 2
    anchor = 0.5 * (eps_l + eps_r)
    delta_nl = (anchor - eps_l) / (units.hbar * om_l)
    delta_nr = (anchor - eps_r) / (units.hbar * om_r)
    b = delta_nl + ratio * delta_nr
    disc = (delta_nl - ratio * delta_nr) ** 2 + 4.0 * rhs
    assert disc >= 0.0, "quadratic pair equation must have real roots"
    sqrt_disc = math.sqrt(disc)
    delta_plus = 0.5 * (-b + sqrt_disc)
    delta_minus = 0.5 * (-b - sqrt_disc)
    hw = units.hbar * om_l

    def energy_of(delta_l):
        return potential.left.v_min + (n_l + delta_nl + delta_l + 0.5) * hw

    e_plus = energy_of(delta_plus)
    e_minus = energy_of(delta_minus)
    delta_split = splitting_degenerate(potential, n_l, n_r)
    return PairSolution(
        e_plus=e_plus, e_minus=e_minus,
        delta_split=delta_split,
        delta_e=hw * sqrt_disc,
        method=QUADRATIC_APPROX,
        decomposition_plus=decompose_energy(potential, e_plus, n_l, n_r),
        decomposition_minus=decompose_energy(potential, e_minus, n_l, n_r))


def _window_bounds(potential: DoubleWellPotential, eps_l: float, eps_r: float,
                   omega_min: float) -> tuple[float, float]:
    units = potential.units
    mid = 0.5 * (eps_l + eps_r)
    half = units.hbar * omega_min / WINDOW_DIVISOR
    lo = mid - half
    hi = min(mid + half,
             potential.v_top - 1e-12 * (1.0 + abs(potential.v_top)))
    # keep both nu above the residual's floor
    for well in (potential.left, potential.right):
        lo = max(lo, well.v_min + (_NU_FLOOR + 0.5 + 1e-9) * units.hbar * well.omega)
    if lo >= hi:
        raise DomainError("empty energy window for the pair search")
    return lo, hi


def _collect_brackets(potential, grid, c):
    """Sign-change cells of the residual, skipping cells in which either
    nu crosses a half-integer (tan poles flip the sign without a root)."""
    units = potential.units
    vals = []
    for e in grid:
        try:
            vals.append(quantization_residual(potential, e, c=c))
        except SingularInputError:
            vals.append(math.nan)
    brackets = []
    for i in range(len(grid) - 1):
        f0, f1 = vals[i], vals[i + 1]
        if math.isnan(f0) or math.isnan(f1) or f0 == 0.0:
            continue
        if f0 * f1 >= 0.0:
            continue
        crosses_pole = False
        for well in (potential.left, potential.right):
            nu0 = nu_of_energy(well, grid[i], units)
            nu1 = nu_of_energy(well, grid[i + 1], units)
            if math.floor(nu0 - 0.5) != math.floor(nu1 - 0.5):
                crosses_pole = True
        if not crosses_pole:
            brackets.append((grid[i], grid[i + 1]))
    return brackets


def solve_pair_exact(potential: DoubleWellPotential, n_l: int, n_r: int,
                     c: float | None = None) -> PairSolution:
    """Bracketed roots of the quantization residual around the pair anchor.

    A coarse 200-point scan of the window catches well-separated roots; a
    fine scan around the quadratic-approximation prediction resolves pairs
    whose gap (~exp(-S)) is far below the coarse grid spacing.  Exactly two
    roots must survive, else the configuration is a localized single and
    DegeneracyStructureError is raised.
    """
    eps_l, eps_r, omega_min = _pair_preconditions(potential, n_l, n_r)
    lo, hi = _window_bounds(potential, eps_l, eps_r, omega_min)
    brackets = _collect_brackets(potential, np.linspace(lo, hi, 200), c)

    guess = solve_pair_quadratic(potential, n_l, n_r)
    gap_pred = guess.e_plus - guess.e_minus
    mid_pred = 0.5 * (guess.e_plus + guess.e_minus)
    spread = max(3.0 * gap_pred, 1e-7 * potential.units.hbar * omega_min)
    fine_lo = max(lo, mid_pred - spread)
    fine_hi = min(hi, mid_pred + spread)
    if fine_lo < fine_hi:
        # seed the fine grid with the predicted roots and the anchor so a
        # residual dip far narrower than any uniform spacing is still seen
        fine = np.unique(np.clip(np.concatenate([
            np.linspace(fine_lo, fine_hi, 121),
            [guess.e_minus - 0.5 * gap_pred, guess.e_minus, mid_pred,
             guess.e_plus, guess.e_plus + 0.5 * gap_pred],
        ]), fine_lo, fine_hi))
        brackets += _collect_brackets(potential, fine, c)

    dedupe = max(1e-15 * (1.0 + abs(mid_pred)),
                 min(1e-11 * (1.0 + abs(mid_pred)), 0.05 * gap_pred))
    roots = []
    for a, b in brackets:
        try:
            root = brentq(lambda e: quantization_residual(potential, e, c=c),
                          a, b, xtol=1e-15, rtol=8.9e-16)
        except (ValueError, SingularInputError):
            continue
        if all(abs(root - r) > dedupe for r in roots):
            roots.append(root)
    roots.sort()
    if len(roots) < 2:
        raise DegeneracyStructureError(
            f"found {len(roots)} quantization root(s) in the window for pair "
            f"({n_l}, {n_r}); the state is localized and non-degenerate "
            f"(use localization_report)")
    if len(roots) > 2:
        # keep the two closest to the anchor
        anchor = 0.5 * (eps_l + eps_r)
        roots.sort(key=lambda r: abs(r - anchor))
        roots = sorted(roots[:2])
    e_minus, e_plus = roots
    return PairSolution(
        e_plus=e_plus, e_minus=e_minus,
        delta_split=splitting_degenerate(potential, n_l, n_r),
        delta_e=e_plus - e_minus,
        method=ROOT_EXACT,
        decomposition_plus=decompose_energy(potential, e_plus, n_l, n_r),
        decomposition_minus=decompose_energy(potential, e_minus, n_l, n_r))


def _pcf_window_norm(nu: float) -> float:
    """int D_nu(z)^2 dz over the classically allowed window |z| <= sqrt(4 nu + 2)."""
    half = math.sqrt(4.0 * nu + 2.0)

    def f(z):
        z = np.atleast_1d(z)
        return np.array([pcf_d(nu, float(t)).value ** 2 for t in z])

    return tanh_sinh(f, -half, half, rtol=1e-10)


def localization_report(potential: DoubleWellPotential, energy: float,
                        branch: str) -> LocalizationReport:
    """Probability ratio R = |C_L/C_R|^2 (l_L/l_R) *
    int D_{nu_L}^2 / int D_{nu_R}^2 over the classically allowed windows.

    branch must match the near-integer side: 'left_anchored' when nu_L is
    close to an integer (left-localized, R large), 'right_anchored' when
    nu_R is (right-localized, R small).
    """
    if branch not in (LEFT_ANCHORED, RIGHT_ANCHORED):
        raise DomainError(f"unknown branch {branch!r}")
    units = potential.units
    nu_l = nu_of_energy(potential.left, energy, units)
    nu_r = nu_of_energy(potential.right, energy, units)
    amp = amplitude_ratio(potential, energy, branch)
    # a slightly sub-zero-point order (shallow well of a localized state)
    # gets the ground-state window
    ratio = (amp * amp * (potential.left.l / potential.right.l)
             * _pcf_window_norm(max(nu_l, 0.0)) / _pcf_window_norm(max(nu_r, 0.0)))
    return LocalizationReport(ratio_r=ratio, amp_ratio_sq=amp * amp, branch=branch)
