"""Two-level reduction: normalized WKB tails, the tunneling matrix
element, the 2x2 Hamiltonian with its mixing angle, and the flux
(Wronskian) identity for the splitting.

The left and right localized states are harmonic-oscillator states whose
barrier tails are normalized WKB exponentials

    psi_L(x) = N_L sqrt(hbar/p) exp(-int_c^x p/hbar),
    psi_R(x) = N_R sqrt(hbar/p) exp(+int_c^x p/hbar),

and the tunneling matrix element is Delta~ = (-1)^{n_R} (2 hbar^2/m) N_L N_R,
algebraically identical to the degenerate splitting formula.  Restricted
to their span, the Hamiltonian is 2x2 with detuning delta_eps and
off-diagonal (-1)^{n_R+1} Delta~/2; its eigenvectors are parametrized by
a mixing angle theta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError
from .potential import DoubleWellPotential, UnitsConfig
from .quantize import (epsilon_level, splitting_degenerate,
                       _pair_preconditions)
from .specfun import _g_raw
from .wkb_matching import barrier_action, match_left


@dataclass(frozen=True)
class TwoLevelModel:
    """Assembled two-level data for a pair (n_l, n_r).

    ``tail_overlap`` is the computed barrier-region overlap of the two
    localized states; the 2x2 model treats it as exactly zero, and this
    diagnostic quantifies how good that is."""

    wkb_norm_left: float
    wkb_norm_right: float
    tilde_delta: float
    eps_l: float
    eps_r: float
    theta: float
    n_l: int
    n_r: int
    tail_overlap: float


def _tail_actions(potential: DoubleWellPotential, n_l: int, n_r: int,
                  c: float | None) -> tuple[float, float]:
    """Split of the anchor-energy barrier action at c."""
    eps_l = epsilon_level(potential.left, n_l, potential.units)
    eps_r = epsilon_level(potential.right, n_r, potential.units)
    acts = barrier_action(potential, 0.5 * (eps_l + eps_r), c=c)
    return acts.left_to_c, acts.c_to_right


def wkb_norm_left(potential: DoubleWellPotential, n_l: int,
                  c: float | None = None, n_r: int | None = None) -> float:
    """N_L = sqrt(g_{n_L}/(2 pi)) / l_L * exp(-int_{a_{n_L}}^c p/hbar).

    The anchor energy pairs n_l with n_r (default: n_l) so that the
    product N_L N_R is evaluated at a single energy and is c-invariant.
    """
    left_act, _ = _tail_actions(potential, n_l, n_l if n_r is None else n_r, c)
    return (math.sqrt(_g_raw(float(n_l)) / (2.0 * math.pi)) / potential.left.l
            * math.exp(-left_act))


def wkb_norm_right(potential: DoubleWellPotential, n_r: int,
                   c: float | None = None, n_l: int | None = None) -> float:
    """N_R = (-1)^{n_R} sqrt(g_{n_R}/(2 pi)) / l_R * exp(-int_c^{a_{n_R}} p/hbar);
    the sign tracks the odd-state oscillator tail."""
    _, right_act = _tail_actions(potential, n_r if n_l is None else n_l, n_r, c)
    return ((-1.0) ** (int(n_r) % 2)
            * math.sqrt(_g_raw(float(n_r)) / (2.0 * math.pi)) / potential.right.l
            * math.exp(-right_act))


def tilde_delta(potential: DoubleWellPotential, n_l: int, n_r: int,
                c: float | None = None) -> float:
    """Delta~ = (-1)^{n_R} (2 hbar^2/m) N_L N_R; positive for all n_R and
    independent of c (the split exponentials recombine)."""
    units = potential.units
    n_left = wkb_norm_left(potential, n_l, c=c, n_r=n_r)
    n_right = wkb_norm_right(potential, n_r, c=c, n_l=n_l)
    return ((-1.0) ** (int(n_r) % 2) * 2.0 * units.hbar ** 2 / units.mass
            * n_left * n_right)


def two_level_hamiltonian(eps_l: float, eps_r: float, tilde_delta_value: float,
                          n_r: int) -> np.ndarray:
    """2x2 symmetric Hamiltonian on the (psi_L, psi_R) span."""
    off = (-1.0) ** ((int(n_r) + 1) % 2) * 0.5 * tilde_delta_value
    return np.array([[eps_l, off], [off, eps_r]])


def mixing_angle(delta_eps: float, tilde_delta_value: float, n_r: int) -> float:
    """theta with cos(theta) = delta_eps / sqrt(delta_eps^2 + Delta~^2) and
    sin(theta) = (-1)^{n_R+1} Delta~ / sqrt(...); in (-pi/2, pi/2) for
    delta_eps > 0 and tending to (-1)^{n_R+1} pi/2 as delta_eps -> 0+."""
    if delta_eps == 0.0 and tilde_delta_value == 0.0:
        raise DomainError("mixing angle undefined with zero detuning and zero coupling")
    sin_num = (-1.0) ** ((int(n_r) + 1) % 2) * tilde_delta_value
    return math.atan2(sin_num, delta_eps)


def two_level_states(theta: float, n_r: int) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient vectors of the pair eigenstates on (psi_L, psi_R):
    psi_+ = (cos theta/2, sin theta/2),
    psi_- = (-1)^{n_R} (-sin theta/2, cos theta/2)."""
    ch, sh = math.cos(0.5 * theta), math.sin(0.5 * theta)
    sign = (-1.0) ** (int(n_r) % 2)
    return np.array([ch, sh]), sign * np.array([-sh, ch])


def tail_overlap(potential: DoubleWellPotential, n_l: int, n_r: int,
                 c: float | None = None) -> float:
    """Barrier-region overlap int psi_L psi_R dx of the localized states.

    Under the barrier the exponentials of the two tails cancel pointwise,
    so the product is N_L N_R hbar / p(x); integrating between the
    turning points (inverse-square-root endpoint zeros handled by analytic
    caps like the action integrals) gives the overlap the 2x2 model
    neglects."""
    from .potential import turning_points
    from .wkb_matching import _integrate_piecewise

    units = potential.units
    m = units.mass
    n_left = wkb_norm_left(potential, n_l, c=c, n_r=n_r)
    n_right = wkb_norm_right(potential, n_r, c=c, n_l=n_l)
    eps_l = epsilon_level(potential.left, n_l, units)
    eps_r = epsilon_level(potential.right, n_r, units)
    energy = 0.5 * (eps_l + eps_r)
    tp = turning_points(potential, energy)
    tau_l = 1e-3 * potential.left.l
    tau_r = 1e-3 * potential.right.l
    # int_0^tau ds / sqrt(2 m b s) with b = |V'| at the turning point
    cap_l = 2.0 * math.sqrt(tau_l / (2.0 * m * abs(potential.dv_at(tp.a_nu_l))))
    cap_r = 2.0 * math.sqrt(tau_r / (2.0 * m * abs(potential.dv_at(tp.a_nu_r))))

    def inv_p(x):
        v = potential.V(x)
        return 1.0 / np.sqrt(2.0 * m * (v - energy))

    integral = cap_l + cap_r + _integrate_piecewise(
        inv_p, tp.a_nu_l + tau_l, tp.a_nu_r - tau_r,
        potential.breakpoints, 1e-10)
    return n_left * n_right * units.hbar * integral


def build_two_level(potential: DoubleWellPotential, n_l: int, n_r: int,
                    c: float | None = None) -> TwoLevelModel:
    """Assemble the full two-level model for the pair (n_l, n_r)."""
    units = potential.units
    _pair_preconditions(potential, n_l, n_r)
    eps_l = epsilon_level(potential.left, n_l, units)
    eps_r = epsilon_level(potential.right, n_r, units)
    td = tilde_delta(potential, n_l, n_r, c=c)
    return TwoLevelModel(
        wkb_norm_left=wkb_norm_left(potential, n_l, c=c, n_r=n_r),
        wkb_norm_right=wkb_norm_right(potential, n_r, c=c, n_l=n_l),
        tilde_delta=td,
        eps_l=eps_l, eps_r=eps_r,
        theta=mixing_angle(eps_l - eps_r, td, n_r),
        n_l=int(n_l), n_r=int(n_r),
        tail_overlap=tail_overlap(potential, n_l, n_r, c=c))


def wkb_tail_functions(potential: DoubleWellPotential, n_l: int, n_r: int,
                       c: float | None = None):
    """Analytic barrier tails of the localized pair states and their
    derivatives: (psi_L, dpsi_L, psi_R, dpsi_R), each a scalar callable
    valid in the forbidden region.

    Each localized state is truncated to zero beyond the far well's
    certified parabolic edge (psi_L for x > a_R - d_R, psi_R mirrored),
    which is where "localized in one well" stops meaning anything.
    """
    if c is None:
        c = potential.c
    units = potential.units
    m, hbar = units.mass, units.hbar
    n_left = wkb_norm_left(potential, n_l, c=c, n_r=n_r)
    n_right = wkb_norm_right(potential, n_r, c=c, n_l=n_l)
    eps_l = epsilon_level(potential.left, n_l, units)
    eps_r = epsilon_level(potential.right, n_r, units)
    energy = 0.5 * (eps_l + eps_r)
    trunc_l = potential.right.a - potential.right.parabolic_extent
    trunc_r = potential.left.a + potential.left.parabolic_extent

    def p_of(x: float) -> float:
        val = 2.0 * m * (potential.v_at(x) - energy)
        if val <= 0.0:
            raise DomainError(f"x={x} not in the forbidden region")
        return math.sqrt(val)

    def dp_of(x: float) -> float:
        return m * potential.dv_at(x) / p_of(x)

    def w_of(x: float) -> float:
        from .wkb_matching import _integrate_piecewise, _momentum_integrand

        return _integrate_piecewise(_momentum_integrand(potential, energy),
                                    c, x, potential.breakpoints, 1e-12)

    def psi_l(x: float) -> float:
        if x > trunc_l:
            return 0.0
        return n_left * math.sqrt(hbar / p_of(x)) * math.exp(-w_of(x))

    def dpsi_l(x: float) -> float:
        if x > trunc_l:
            return 0.0
        p = p_of(x)
        return psi_l(x) * (-dp_of(x) / (2.0 * p) - p / hbar)

    def psi_r(x: float) -> float:
        if x < trunc_r:
            return 0.0
        return n_right * math.sqrt(hbar / p_of(x)) * math.exp(w_of(x))

    def dpsi_r(x: float) -> float:
        if x < trunc_r:
            return 0.0
        p = p_of(x)
        return psi_r(x) * (-dp_of(x) / (2.0 * p) + p / hbar)

    return psi_l, dpsi_l, psi_r, dpsi_r


def flux_splitting(psi_left_tail: Callable[[float], float],
                   psi_right_tail: Callable[[float], float],
                   c: float, units: UnitsConfig, n_r: int = 0,
                   dpsi_left: Callable[[float], float] | None = None,
                   dpsi_right: Callable[[float], float] | None = None,
                   fd_step: float | None = None) -> float:
    """Splitting from the probability-flux (Wronskian) identity
    Delta~ = (-1)^{n_R} (hbar^2/m) [psi_L psi_R' - psi_R psi_L'](c).

    Derivatives are taken analytically when supplied, otherwise by 5-point
    central differences with step ``fd_step``.
    """
    if dpsi_left is None or dpsi_right is None:
        if fd_step is None:
            fd_step = 1e-3

        def fd(f):
            def d(x):
                return (-f(x + 2 * fd_step) + 8 * f(x + fd_step)
                        - 8 * f(x - fd_step) + f(x - 2 * fd_step)) / (12 * fd_step)
            return d

        dpsi_left = dpsi_left or fd(psi_left_tail)
        dpsi_right = dpsi_right or fd(psi_right_tail)
    wronskian = (psi_left_tail(c) * dpsi_right(c)
                 - psi_right_tail(c) * dpsi_left(c))
    return ((-1.0) ** (int(n_r) % 2) * units.hbar ** 2 / units.mass * wronskian)


def ab_ratio_check(potential: DoubleWellPotential, n_l: int, n_r: int,
                   branch_sign: int, c: float | None = None
                   ) -> tuple[float, float]:
    """Consistency of the matched coefficients with the two-level norms:
    returns (B/A from the left matching at nu = n +- Delta/(2 hbar omega),
    the predicted -+ (-1)^{n_R} N_L/N_R)."""
    if branch_sign not in (+1, -1):
        raise DomainError("branch_sign must be +1 or -1")
    if c is None:
        c = potential.c
    units = potential.units
    delta = splitting_degenerate(potential, n_l, n_r)
    eps_l = epsilon_level(potential.left, n_l, units)
    eps_r = epsilon_level(potential.right, n_r, units)
    energy = (0.5 * (eps_l + eps_r)
              + branch_sign * 0.5 * delta)
    nu_l = (energy - potential.left.v_min) / (units.hbar * potential.left.omega) - 0.5
    acts = barrier_action(potential, energy, c=c)
    coeffs = match_left(1.0, nu_l, acts.left_to_c, potential.left)
    lhs = coeffs.b_coeff / coeffs.a_coeff
    n_left = wkb_norm_left(potential, n_l, c=c, n_r=n_r)
    n_right = wkb_norm_right(potential, n_r, c=c, n_l=n_l)
    rhs = -branch_sign * (-1.0) ** (int(n_r) % 2) * n_left / n_right
    return lhs, rhs
