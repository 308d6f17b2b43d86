"""Barrier action integrals and the coefficients connecting the WKB
solution under the barrier to the parabolic-cylinder well solutions.

Inside the barrier the wavefunction is
    A sqrt(hbar/p) exp(+int_c^x p/hbar) + B sqrt(hbar/p) exp(-int_c^x p/hbar),
p = sqrt(2m(V-E)).  Matching its asymptotics in each well's quadratic
region onto C_L D_{nu_L} and C_R D_{nu_R} fixes (A, B) in terms of C_L or
of C_R; eliminating them yields the quantization condition, and their
ratio the localization amplitude ratio.

WKB cannot justify keeping an exponentially small coefficient next to an
exponentially large one, so each matched coefficient carries a validity
tag ('moderate' sine regime vs the Hermite-Gaussian near-integer limit)
and callers enforce the usage rules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularInputError, ValidityError
from .potential import DoubleWellPotential, WellParams, turning_points
from .quadrature import tanh_sinh
from .specfun import _g_raw, cospi, sinpi

LEFT_ANCHORED = "left_anchored"
RIGHT_ANCHORED = "right_anchored"

# half-width of the analytic endpoint patch, in units of the local
# oscillator length
_CAP_FRACTION = 1e-3


@dataclass(frozen=True)
class ActionIntegrals:
    """Barrier action int p/hbar dy between the inner turning points and
    its split at the reference point c."""

    total: float
    left_to_c: float
    c_to_right: float
    energy: float
    c_used: float


@dataclass(frozen=True)
class MatchingCoefficients:
    """(A, B) of the barrier WKB form anchored to one well's amplitude.

    ``branch`` records which matching produced the pair; ``validity``
    records which coefficient the approximation actually supports:
    'moderate' (growing-side coefficient trustworthy) or 'hermite_limit'
    (near-integer order: decaying-side coefficient trustworthy).
    """

    a_coeff: float
    b_coeff: float
    c_left: float
    c_right: float
    branch: str
    c_used: float
    validity: str


def _endpoint_cap(potential: DoubleWellPotential, x_t: float, tau: float) -> float:
    """Analytic int p/hbar over the first ``tau`` of barrier inward of the
    turning point x_t: V - E is replaced by its local model
    b*s + (a/2)*s^2 (s = distance into the barrier), which avoids the
    cancellation of V(x) - E right at the turning point."""
    m = potential.units.mass
    hbar = potential.units.hbar
    b = abs(potential.dv_at(x_t))  # |V'| along the inward direction
    if b <= 0.0:
        raise DomainError("vanishing slope at a turning point")
    hs = 0.5 * tau
    a2 = (potential.dv_at(x_t + hs) - potential.dv_at(x_t - hs)) / (2.0 * hs)
    root_b = math.sqrt(b)
    return math.sqrt(2.0 * m) / hbar * (
        (2.0 / 3.0) * root_b * tau ** 1.5 + (a2 / (10.0 * root_b)) * tau ** 2.5)


def _integrate_piecewise(f, lo: float, hi: float, breakpoints, rtol: float) -> float:
    """tanh-sinh over [lo, hi], subdivided at interior breakpoints so that
    derivative kinks of piecewise potentials sit on subinterval ends."""
    if hi < lo:
        return -_integrate_piecewise(f, hi, lo, breakpoints, rtol)
    inner = sorted(b for b in breakpoints if lo < b < hi)
    total = 0.0
    prev = lo
    for b in [*inner, hi]:
        total += tanh_sinh(f, prev, b, rtol=rtol)
        prev = b
    return total


def _momentum_integrand(potential: DoubleWellPotential, energy: float):
    m = potential.units.mass
    hbar = potential.units.hbar

    def integrand(x):
        v = potential.V(x)
        return np.sqrt(np.maximum(2.0 * m * (v - energy), 0.0)) / hbar

    return integrand


def barrier_action(potential: DoubleWellPotential, energy: float,
                   c: float | None = None) -> ActionIntegrals:
    """int p(y)/hbar dy between the inner turning points at ``energy``,
    split at ``c`` (default: the potential's reference point).

    Endpoint square-root zeros are handled by an analytic local model
    within 1e-3 oscillator lengths of each turning point and tanh-sinh
    quadrature elsewhere, subdivided at the potential's breakpoints.
    """
    if c is None:
        c = potential.c
    tp = turning_points(potential, energy)
    if not (tp.a_nu_l < c < tp.a_nu_r):
        raise DomainError(
            f"c={c} outside the forbidden region ({tp.a_nu_l:.6g}, {tp.a_nu_r:.6g})")
    tau_l = _CAP_FRACTION * potential.left.l
    tau_r = _CAP_FRACTION * potential.right.l
    integrand = _momentum_integrand(potential, energy)
    cap_l = _endpoint_cap(potential, tp.a_nu_l, tau_l)
    cap_r = _endpoint_cap(potential, tp.a_nu_r, tau_r)
    bps = potential.breakpoints
    left = cap_l + _integrate_piecewise(integrand, tp.a_nu_l + tau_l, c, bps, 1e-13)
    right = _integrate_piecewise(integrand, c, tp.a_nu_r - tau_r, bps, 1e-13) + cap_r
    return ActionIntegrals(total=left + right, left_to_c=left,
                           c_to_right=right, energy=energy, c_used=c)


def quadratic_action(nu: float, z_upper: float) -> float:
    """Exact int_{sqrt(2 nu + 1)}^{z_upper} sqrt(z^2 - 2 nu - 1) dz,
    the action accumulated inside an exactly parabolic region in scaled
    coordinates."""
    b2 = 2.0 * nu + 1.0
    b = math.sqrt(b2)
    if z_upper < b:
        raise DomainError(f"z_upper={z_upper} below the turning coordinate {b}")
    root = math.sqrt(max(z_upper * z_upper - b2, 0.0))
    return 0.5 * z_upper * root - 0.5 * b2 * math.log((z_upper + root) / b)


def quadratic_action_asymptotic(nu: float, z_upper: float) -> float:
    """Three-term large-z form of ``quadratic_action``:
    z^2/2 - (nu + 1/2)/2 - (nu + 1/2) ln( sqrt(2) z / sqrt(nu + 1/2) ).
    Error is O((nu + 1/2)^2 / z^2)."""
    b2 = 2.0 * nu + 1.0
    if z_upper < math.sqrt(b2):
        raise DomainError(f"z_upper={z_upper} below the turning coordinate")
    half = nu + 0.5
    return (0.5 * z_upper * z_upper - 0.5 * half
            - half * math.log(math.sqrt(2.0) * z_upper / math.sqrt(half)))


def _validity_tag(nu: float, action: float) -> str:
    """Heuristic: 1/|sin(pi nu)| is 'moderate' while it stays below
    exp(action/2); beyond that the order is effectively integer and only
    the Hermite-Gaussian-limit coefficient is supported."""
    s = abs(sinpi(nu))
    if s == 0.0:
        return "hermite_limit"
    return "moderate" if 1.0 / s <= math.exp(0.5 * abs(action)) else "hermite_limit"


def match_left(c_left: float, nu_l: float, action_left_to_c: float,
               well: WellParams) -> MatchingCoefficients:
    """(A, B) from matching the barrier WKB form onto C_L D_{nu_L} in the
    left well's quadratic region:

        A = -sin(pi nu_L) sqrt(2 nu_L!) / (pi^(1/4) sqrt(l_L g_{nu_L}))
              * exp(+int_{a_{nu_L}}^c p/hbar) * C_L
        B =  cos(pi nu_L) sqrt(nu_L! g_{nu_L}) / ((4 pi)^(1/4) sqrt(l_L))
              * exp(-int_{a_{nu_L}}^c p/hbar) * C_L

    A vanishes exactly at integer order.
    """
    if nu_l <= -0.5:
        raise DomainError(f"nu_l={nu_l} below -1/2")
    g = _g_raw(nu_l)
    fact = math.gamma(nu_l + 1.0)
    a_coeff = (-sinpi(nu_l) * math.sqrt(2.0 * fact)
               / (math.pi ** 0.25 * math.sqrt(well.l * g))
               * math.exp(action_left_to_c) * c_left)
    b_coeff = (cospi(nu_l) * math.sqrt(fact * g)
               / ((4.0 * math.pi) ** 0.25 * math.sqrt(well.l))
               * math.exp(-action_left_to_c) * c_left)
    return MatchingCoefficients(a_coeff=a_coeff, b_coeff=b_coeff,
                                c_left=c_left, c_right=math.nan,
                                branch=LEFT_ANCHORED, c_used=math.nan,
                                validity=_validity_tag(nu_l, action_left_to_c))


def match_right(c_right: float, nu_r: float, action_c_to_right: float,
                well: WellParams) -> MatchingCoefficients:
    """Mirror of ``match_left`` for the right well:

        A =  cos(pi nu_R) sqrt(nu_R! g_{nu_R}) / ((4 pi)^(1/4) sqrt(l_R))
               * exp(-int_c^{a_{nu_R}} p/hbar) * C_R
        B = -sin(pi nu_R) sqrt(2 nu_R!) / (pi^(1/4) sqrt(l_R g_{nu_R}))
               * exp(+int_c^{a_{nu_R}} p/hbar) * C_R

    B vanishes exactly at integer order.
    """
    if nu_r <= -0.5:
        raise DomainError(f"nu_r={nu_r} below -1/2")
    g = _g_raw(nu_r)
    fact = math.gamma(nu_r + 1.0)
    a_coeff = (cospi(nu_r) * math.sqrt(fact * g)
               / ((4.0 * math.pi) ** 0.25 * math.sqrt(well.l))
               * math.exp(-action_c_to_right) * c_right)
    b_coeff = (-sinpi(nu_r) * math.sqrt(2.0 * fact)
               / (math.pi ** 0.25 * math.sqrt(well.l * g))
               * math.exp(action_c_to_right) * c_right)
    return MatchingCoefficients(a_coeff=a_coeff, b_coeff=b_coeff,
                                c_left=math.nan, c_right=c_right,
                                branch=RIGHT_ANCHORED, c_used=math.nan,
                                validity=_validity_tag(nu_r, action_c_to_right))


def _ratio_formula(nu_l: float, nu_r: float, l_l: float, l_r: float,
                   action: float, branch: str) -> float:
    """C_L/C_R from the matched-coefficient pair selected by ``branch``."""
    size = math.sqrt(math.gamma(nu_r + 1.0) * l_l / (math.gamma(nu_l + 1.0) * l_r))
    g_l, g_r = _g_raw(nu_l), _g_raw(nu_r)
    if branch == LEFT_ANCHORED:
        cl = cospi(nu_l)
        if abs(cl) < 1e-12:
            raise SingularInputError(
                f"nu_l={nu_l} is half-integer: left-anchored ratio singular")
        return -2.0 * sinpi(nu_r) / cl * size / math.sqrt(g_l * g_r) * math.exp(action)
    if branch == RIGHT_ANCHORED:
        sl = sinpi(nu_l)
        if abs(sl) < 1e-12:
            raise SingularInputError(
                f"nu_l={nu_l} is integer: right-anchored ratio singular")
        return -cospi(nu_r) / (2.0 * sl) * size * math.sqrt(g_l * g_r) * math.exp(-action)
    raise DomainError(f"unknown branch {branch!r}")


def amplitude_ratio(potential: DoubleWellPotential, energy: float,
                    branch: str) -> float:
    """C_L/C_R at the given energy.

    branch='left_anchored' uses the decaying-side pair (valid when nu_L is
    near an integer; the ratio is exponentially large, left localization);
    branch='right_anchored' uses the growing-side pair (valid when nu_R is
    near an integer; exponentially small ratio, right localization).
    """
    from .quantize import nu_of_energy  # local import to avoid a cycle

    nu_l = nu_of_energy(potential.left, energy, potential.units)
    nu_r = nu_of_energy(potential.right, energy, potential.units)
    if min(nu_l, nu_r) <= -0.5:
        raise DomainError(f"energy {energy} gives nu below -1/2")
    action = barrier_action(potential, energy).total
    return _ratio_formula(nu_l, nu_r, potential.left.l, potential.right.l,
                          action, branch)


def wkb_wavefunction(potential: DoubleWellPotential, energy: float,
                     coeffs: MatchingCoefficients, x: float,
                     c: float | None = None) -> float:
    """Barrier WKB wavefunction
    A sqrt(hbar/p) e^{+w(x)} + B sqrt(hbar/p) e^{-w(x)}, w = int_c^x p/hbar,
    valid only in the forbidden region at least half an oscillator length
    away from both turning points."""
    if c is None:
        c = potential.c if math.isnan(coeffs.c_used) else coeffs.c_used
    tp = turning_points(potential, energy)
    if not (tp.a_nu_l + 0.5 * potential.left.l <= x <= tp.a_nu_r - 0.5 * potential.right.l):
        raise ValidityError(
            f"x={x} within half an oscillator length of a turning point")
    m = potential.units.mass
    hbar = potential.units.hbar
    integrand = _momentum_integrand(potential, energy)
    # signed accumulated action: negative for x < c
    w = _integrate_piecewise(integrand, c, x, potential.breakpoints, 1e-12)
    p = math.sqrt(max(2.0 * m * (potential.v_at(x) - energy), 0.0))
    if p <= 0.0:
        raise ValidityError(f"x={x} is not in the classically forbidden region")
    amp = math.sqrt(hbar / p)
    return coeffs.a_coeff * amp * math.exp(w) + coeffs.b_coeff * amp * math.exp(-w)
