"""Parabolic cylinder functions D_nu, the g correction factors, and
harmonic-oscillator (Hermite-Gaussian) wavefunctions.

D_nu(z) solves  psi'' + (nu + 1/2 - z^2/4) psi = 0  and decays like
z^nu exp(-z^2/4) as z -> +inf.  Three independent evaluation routes are
provided:

* ``pcf_d`` -- power series about z=0 combined with the large-|z|
  expansion, routed adaptively by tracked error estimates (the recessive
  branch cancels catastrophically in the series at moderate |z|, so a
  fixed switch radius cannot reach full accuracy);
* ``pcf_d_asymptotic`` -- the large-|z| expansion on its own, for use and
  testing in its validity region;
* ``pcf_d_ode`` -- direct Numerov integration of the defining equation
  from z=0, with a step-doubling error estimate.  This is the in-package
  oracle for the other two.

Supported envelope: nu in [-0.5, 12], |z| <= 40.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import eval_hermite

from .errors import DomainError, RangeError

NU_MIN = -0.5
NU_MAX = 12.0
Z_MAX = 40.0

# |z| cap for the power series: the largest running term grows like
# exp(z^2/2) and must stay well below overflow.
_SERIES_Z_MAX = 26.0

_EPS = 2.2e-16


def sinpi(x: float) -> float:
    """sin(pi*x) with exact reduction: exactly zero at integer x."""
    n = round(x)
    r = math.sin(math.pi * (x - n))
    return -r if n % 2 else r


def cospi(x: float) -> float:
    """cos(pi*x) with exact reduction: exactly zero at half-integer x."""
    n = round(x)
    r = math.cos(math.pi * (x - n))
    return -r if n % 2 else r


def tanpi(x: float) -> float:
    """tan(pi*x) with exact reduction; exact zero at integers."""
    r = x - round(x)
    return math.tan(math.pi * r)


def _inv_gamma(x: float) -> float:
    """1/Gamma(x), zero at the poles (non-positive integers)."""
    if x <= 0.0 and x == round(x):
        return 0.0
    if x > 170.0:
        return math.exp(-math.lgamma(x))
    return 1.0 / math.gamma(x)


def pcf_d_at_zero(nu: float) -> tuple[float, float]:
    """(D_nu(0), D_nu'(0)); exact seeds for the series and the ODE oracle."""
    d0 = 2.0 ** (nu / 2.0) * math.sqrt(math.pi) * _inv_gamma((1.0 - nu) / 2.0)
    d1 = -(2.0 ** ((nu + 1.0) / 2.0)) * math.sqrt(math.pi) * _inv_gamma(-nu / 2.0)
    return d0, d1


@dataclass(frozen=True)
class PcfEvaluation:
    """One D_nu(z) evaluation with its error estimate and the route used."""

    value: float
    abs_error_estimate: float
    regime: str  # 'series' | 'asymptotic' | 'ode'


def _check_envelope(nu: float, z: float) -> None:
    if not (NU_MIN <= nu <= NU_MAX):
        raise RangeError(f"order nu={nu} outside supported [{NU_MIN}, {NU_MAX}]")
    if not (abs(z) <= Z_MAX):
        raise RangeError(f"|z|={abs(z)} outside supported envelope <= {Z_MAX}")
    if not (math.isfinite(nu) and math.isfinite(z)):
        raise RangeError("non-finite argument")


def _series_eval(nu: float, z: float) -> tuple[float, float]:
    """Power series of D_nu(z) = exp(-z^2/4) u(z), u'' - z u' + nu u = 0.

    Returns (value, absolute error estimate).  The estimate tracks the
    cancellation between even and odd partial sums: the absolute sum of
    terms can exceed the result by exp(z^2/2), which multiplies the
    rounding unit.
    """
    d0, d1 = pcf_d_at_zero(nu)
    total = d0 + d1 * z
    abs_total = abs(d0) + abs(d1 * z)
    te, to = d0, d1 * z  # terms themselves; each stays below exp(z^2/2)
    z2 = z * z
    consecutive_small = 0
    k_min = int(z2) + 8
    k = 0
    while k < 3000:
        te = te * (k - nu) * z2 / ((k + 1.0) * (k + 2.0))
        to = to * ((k + 1.0) - nu) * z2 / ((k + 2.0) * (k + 3.0))
        total += te + to
        abs_total += abs(te) + abs(to)
        if not math.isfinite(abs_total):
            return math.nan, math.inf
        if abs(te) + abs(to) < 1e-18 * abs_total:
            consecutive_small += 1
            if consecutive_small >= 3 and k > k_min:
                break
        else:
            consecutive_small = 0
        k += 2
    scale = math.exp(-z2 / 4.0)
    value = scale * total
    abs_err = scale * abs_total * 2.0 * _EPS
    return value, abs_err


def _asymptotic_branch_sum(numerator: Callable[[int], float], z2: float,
                           max_corrections: int | None) -> tuple[float, float]:
    """Sum 1 + sum_k t_k with t_{k+1}/t_k = numerator(k)/((k+1) 2 z^2),
    truncating at the smallest term (or after ``max_corrections`` terms).
    Returns (sum, truncation error estimate)."""
    t = 1.0
    s = 1.0
    k = 0
    while True:
        if max_corrections is not None and k >= max_corrections:
            nxt = t * numerator(k) / ((k + 1.0) * z2)
            return s, abs(nxt)
        nxt = t * numerator(k) / ((k + 1.0) * z2)
        if abs(nxt) >= abs(t) or k > 500:
            return s, abs(nxt)
        t = nxt
        s += t
        k += 1
        if abs(t) < 1e-18 * abs(s):
            return s, abs(t)


def _asymptotic_eval(nu: float, z: float,
                     max_corrections: int | None = None) -> tuple[float, float]:
    """Large-|z| expansion.  For z < 0 both the decaying cos-branch and the
    growing sin-branch contribute; for z > 0 only the decaying branch, with
    unit coefficient.  Returns (value, absolute error estimate)."""
    az = abs(z)
    z2 = 2.0 * z * z
    s_dec, e_dec = _asymptotic_branch_sum(
        lambda k: -(nu - 2 * k) * (nu - 2 * k - 1.0), z2, max_corrections)
    if z >= 0.0:
        pref = az ** nu * math.exp(-z * z / 4.0)
        value = pref * s_dec
        abs_err = abs(pref) * e_dec + _EPS * abs(value)
        return value, abs_err
    pref_dec = cospi(nu) * az ** nu * math.exp(-z * z / 4.0)
    spi = sinpi(nu)
    if spi != 0.0:
        s_gro, e_gro = _asymptotic_branch_sum(
            lambda k: (nu + 2 * k + 1.0) * (nu + 2 * k + 2.0), z2, max_corrections)
        pref_gro = (-spi * math.gamma(nu + 1.0) * math.sqrt(2.0 / math.pi)
                    * az ** (-nu - 1.0) * math.exp(z * z / 4.0))
    else:
        s_gro = e_gro = pref_gro = 0.0
    value = pref_dec * s_dec + pref_gro * s_gro
    abs_err = (abs(pref_dec) * e_dec + abs(pref_gro) * e_gro
               + _EPS * (abs(pref_dec * s_dec) + abs(pref_gro * s_gro)))
    return value, abs_err


def _asymptotic_admissible(nu: float, z: float) -> bool:
    return abs(z) >= max(4.0, math.sqrt(2.0 * nu + 1.0) + 1.0)


def pcf_d(nu: float, z: float) -> PcfEvaluation:
    """Evaluate D_nu(z) for real order and argument.

    Routes between the power series and the large-|z| expansion by the
    smaller tracked error estimate; near-integer orders and the recessive
    branch are handled without the catastrophic cancellation a fixed
    switch radius would incur.
    """
    _check_envelope(nu, z)
    candidates: list[tuple[float, float, str]] = []
    if abs(z) <= _SERIES_Z_MAX:
        v, e = _series_eval(nu, z)
        if math.isfinite(v) and math.isfinite(e):
            candidates.append((v, e, "series"))
    if _asymptotic_admissible(nu, z):
        v, e = _asymptotic_eval(nu, z)
        if math.isfinite(v) and math.isfinite(e):
            candidates.append((v, e, "asymptotic"))
    if not candidates:
        raise RangeError(f"no evaluation route for nu={nu}, z={z}")
    value, err, regime = min(candidates, key=lambda c: c[1])
    return PcfEvaluation(value=value, abs_error_estimate=err, regime=regime)


def pcf_d_asymptotic(nu: float, z: float,
                     corrections: int | None = None) -> PcfEvaluation:
    """Large-|z| expansion of D_nu(z) on its own.

    By default the printed 1/z^2 correction series of each branch is summed
    to its optimal truncation; ``corrections`` caps the number of correction
    terms per branch (``corrections=1`` keeps only the leading 1/(2z^2)
    correction).  Requires |z| >= max(6, 3*sqrt(2 nu + 1)).
    """
    _check_envelope(nu, z)
    threshold = max(6.0, 3.0 * math.sqrt(2.0 * nu + 1.0))
    if abs(z) < threshold:
        raise RangeError(
            f"|z|={abs(z)} below asymptotic threshold {threshold:.3f} for nu={nu}")
    v, e = _asymptotic_eval(nu, z, max_corrections=corrections)
    return PcfEvaluation(value=v, abs_error_estimate=e, regime="asymptotic")


def _numerov_march(nu: float, z: float, h: float) -> tuple[float, float, float]:
    """Numerov integration of psi'' = (z^2/4 - nu - 1/2) psi from 0 to z.
    Returns (psi(z), max |psi| along the path, max |psi| inside the
    classically allowed region |t| <= sqrt(4 nu + 2))."""
    n = max(2, int(round(abs(z) / h)))
    h = abs(z) / n * (1.0 if z > 0 else -1.0)
    d0, d1 = pcf_d_at_zero(nu)
    f0 = -nu - 0.5
    # Taylor start exploits f'(0)=0, f''(0)=1/2 of f(t) = t^2/4 - nu - 1/2
    psi_prev = d0
    psi_cur = (d0 + h * d1 + h * h / 2 * f0 * d0 + h ** 3 / 6 * f0 * d1
               + h ** 4 / 24 * (0.5 + f0 * f0) * d0
               + h ** 5 / 120 * (1.5 + f0 * f0) * d1)
    peak = peak_allowed = max(abs(psi_prev), abs(psi_cur))
    z_turn = math.sqrt(4.0 * nu + 2.0)
    h2_12 = h * h / 12.0

    def w(t: float) -> float:
        return 1.0 - h2_12 * (t * t / 4.0 - nu - 0.5)

    c_prev = w(0.0)
    c_cur = w(h)
    for i in range(1, n):
        c_next = w((i + 1) * h)
        psi_next = ((12.0 - 10.0 * c_cur) * psi_cur - c_prev * psi_prev) / c_next
        psi_prev, psi_cur = psi_cur, psi_next
        c_prev, c_cur = c_cur, c_next
        a = abs(psi_cur)
        if a > peak:
            peak = a
        if abs((i + 1) * h) <= z_turn and a > peak_allowed:
            peak_allowed = a
    return psi_cur, peak, peak_allowed


def pcf_d_ode(nu: float, z: float, rtol: float = 1e-9) -> PcfEvaluation:
    """Independent oracle for D_nu(z): integrate the defining equation from
    the exact z=0 seeds at three step sizes and Richardson-extrapolate.

    The error estimate combines step-doubling with an amplified-roundoff
    floor: on the recessive branch the growing companion solution magnifies
    rounding noise by exp((z^2 - z_t^2)/4), which limits the reachable |z|.
    Raises RangeError when the estimate exceeds ``rtol`` (growth-limited)
    rather than returning an untrustworthy value.
    """
    _check_envelope(nu, z)
    if abs(z) > 15.0:
        raise RangeError(f"ODE oracle growth-limited to |z| <= 15, got {z}")
    if z == 0.0:
        return PcfEvaluation(value=pcf_d_at_zero(nu)[0],
                             abs_error_estimate=0.0, regime="ode")
    v1, _, _ = _numerov_march(nu, z, 0.008)
    v2, _, _ = _numerov_march(nu, z, 0.004)
    v3, peak, peak_allowed = _numerov_march(nu, z, 0.002)
    extrap_21 = (16.0 * v2 - v1) / 15.0
    extrap_32 = (16.0 * v3 - v2) / 15.0
    value = extrap_32
    # roundoff injected near the turning region is magnified by the growing
    # companion solution; on the dominant branch the value grows with it,
    # so the floor uses whichever scale is larger
    z_turn_sq = 4.0 * nu + 2.0
    amplification = math.exp(max(0.0, z * z - z_turn_sq) / 4.0)
    steps = abs(z) / 0.002
    roundoff_floor = _EPS * math.sqrt(steps) * max(abs(value),
                                                   peak_allowed * amplification)
    err = max(abs(v3 - v2) / 15.0, abs(extrap_32 - extrap_21), roundoff_floor)
    if not math.isfinite(value):
        raise RangeError(f"ODE integration overflowed at nu={nu}, z={z}")
    # near an isolated zero of D_nu a purely relative target is unattainable;
    # the certification scale falls back to a percent of the path peak
    scale = max(abs(value), 1e-2 * peak)
    if err > rtol * scale:
        raise RangeError(
            f"ODE oracle cannot certify rtol={rtol:g} at nu={nu}, z={z} "
            f"(estimate {err:.2e} vs scale {scale:.2e}); growth-limited")
    return PcfEvaluation(value=value, abs_error_estimate=err, regime="ode")


def g_factor(nu: float) -> float:
    """Semiclassical correction factor
    g_nu = sqrt(2 pi)/nu! (nu + 1/2)^(nu + 1/2) exp(-nu - 1/2),
    with the factorial extended by Gamma.  Tends to 1 from above for large
    nu and corrects the naive splitting prefactor for low-lying states.
    """
    if nu < 0.0:
        raise DomainError(f"g factor needs nu >= 0, got {nu}")
    return _g_raw(nu)


def _g_raw(nu: float) -> float:
    """g at real order, valid down to nu > -0.5 (internal use)."""
    if nu <= -0.5:
        raise DomainError(f"g factor undefined for nu <= -0.5, got {nu}")
    x = nu + 0.5
    # log form avoids overflow of (nu+1/2)^(nu+1/2) for large nu
    return math.exp(0.5 * math.log(2.0 * math.pi) + x * math.log(x) - x
                    - math.lgamma(nu + 1.0))


def hermite_gaussian(n: int, center: float, l: float, x):
    """Normalized n-th harmonic oscillator eigenfunction with oscillator
    length ``l`` centered at ``center``; vectorized in x."""
    if n != int(n) or n < 0:
        raise DomainError(f"quantum number must be a non-negative integer, got {n}")
    n = int(n)
    if n > 12:
        raise RangeError(f"oscillator wavefunction supported for n <= 12, got {n}")
    if l <= 0.0:
        raise DomainError("oscillator length must be positive")
    xi = (np.asarray(x, dtype=float) - center) / l
    norm = 1.0 / (math.pi ** 0.25 * math.sqrt(2.0 ** n * math.factorial(n) * l))
    out = norm * eval_hermite(n, xi) * np.exp(-0.5 * xi * xi)
    if np.ndim(x) == 0:
        return float(out)
    return out


def pcf_hermite_identity(n: int, z: float) -> tuple[float, float]:
    """(pcf_d(n, z), 2^(-n/2) exp(-z^2/4) H_n(z/sqrt 2)) for integer order;
    the two must agree, which ties the series/asymptotic routes to the
    closed Hermite form."""
    if n != int(n) or n < 0:
        raise DomainError(f"identity needs a non-negative integer, got {n}")
    n = int(n)
    if n > 12:
        raise RangeError(f"identity supported for n <= 12, got {n}")
    lhs = pcf_d(float(n), z).value
    rhs = 2.0 ** (-n / 2.0) * math.exp(-z * z / 4.0) * float(eval_hermite(n, z / math.sqrt(2.0)))
    return lhs, rhs
