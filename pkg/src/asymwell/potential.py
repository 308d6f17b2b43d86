"""Double-well potential abstraction, built-in families, well-parameter
extraction, and classical turning points.

A potential is an immutable bundle of a vectorized evaluator x -> (V, V')
together with certified per-well parameters: minimum position, curvature
frequency, floor value, oscillator length, and the half-width over which
the well is quadratic to a stated tolerance.  Everything downstream (WKB
matching, quantization, the oracle) consumes this bundle.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .errors import (ConstructionError, DomainError, NoBarrierError,
                     ShapeError)

# |V - quadratic model| <= this multiple of hbar*omega certifies the
# parabolic neighborhood of a black-box well (config knob; the built
# piecewise-parabolic family is exact).
DEFAULT_PARABOLIC_TOL = 1e-6


@dataclass(frozen=True)
class UnitsConfig:
    """Physical constants of the Schrodinger problem."""

    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0.0 and self.mass > 0.0):
            raise ConstructionError("hbar and mass must be strictly positive")

    def osc_length(self, omega: float) -> float:
        return math.sqrt(self.hbar / (self.mass * omega))


@dataclass(frozen=True)
class WellParams:
    """One parabolic well: V(x) ~ v_min + (1/2) m omega^2 (x - a)^2 for
    |x - a| <= parabolic_extent, with oscillator length l = sqrt(hbar/(m omega))."""

    a: float
    omega: float
    v_min: float
    l: float
    parabolic_extent: float

    def __post_init__(self):
        if self.omega <= 0.0 or self.l <= 0.0 or self.parabolic_extent <= 0.0:
            raise ConstructionError("omega, l and parabolic_extent must be positive")

    @classmethod
    def from_omega(cls, a: float, omega: float, v_min: float,
                   parabolic_extent: float, units: UnitsConfig) -> "WellParams":
        return cls(a=a, omega=omega, v_min=v_min,
                   l=units.osc_length(omega), parabolic_extent=parabolic_extent)


@dataclass(frozen=True)
class TurningPair:
    """Inner classical turning points V(a_nu_l) = V(a_nu_r) = energy."""

    a_nu_l: float
    a_nu_r: float
    energy: float


@dataclass(frozen=True)
class DoubleWellPotential:
    """Immutable double well: evaluator, certified wells, barrier reference
    point c, domain, and units.  All operations on it are pure.

    ``breakpoints`` lists abscissae where higher derivatives of V jump
    (piecewise-family joins and knots); quadratures subdivide there to keep
    their exponential convergence.
    """

    evaluator: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]
    left: WellParams
    right: WellParams
    c: float
    domain: tuple[float, float]
    units: UnitsConfig
    x_top: float
    v_top: float
    breakpoints: tuple[float, ...] = ()

    def __post_init__(self):
        if not (self.left.a < self.c < self.right.a):
            raise ConstructionError("reference point c must lie between the minima")
        if not (self.domain[0] < self.left.a < self.right.a < self.domain[1]):
            raise ConstructionError("domain must contain both minima")
        if not (self.v_top > max(self.left.v_min, self.right.v_min)):
            raise ConstructionError("barrier top must exceed both well floors")

    def V(self, x):
        v, _ = self.evaluator(np.asarray(x, dtype=float))
        return v

    def dV(self, x):
        _, dv = self.evaluator(np.asarray(x, dtype=float))
        return dv

    def v_at(self, x: float) -> float:
        return float(self.V(np.array([x]))[0])

    def dv_at(self, x: float) -> float:
        return float(self.dV(np.array([x]))[0])

    def with_c(self, c: float) -> "DoubleWellPotential":
        """Same potential with a different barrier reference point;
        downstream results must not depend on this choice."""
        return replace(self, c=float(c))


def _second_derivative(vfun: Callable[[float], float], x0: float, h: float) -> float:
    """Central second difference (2nd order) with one Richardson step."""
    def d2(step):
        return (vfun(x0 + step) - 2.0 * vfun(x0) + vfun(x0 - step)) / step ** 2
    return (4.0 * d2(h / 2.0) - d2(h)) / 3.0


def _certify_extent(vfun: Callable[[float], float], a: float, omega: float,
                    v_min: float, units: UnitsConfig, tol: float,
                    d_max: float) -> float:
    """Largest half-width d such that |V - quadratic| <= tol*hbar*omega on
    |x - a| <= d, found by doubling then bisecting on a residual scan."""
    bound = tol * units.hbar * omega
    curv = 0.5 * units.mass * omega ** 2

    def residual_ok(d):
        offs = np.linspace(-d, d, 41)
        xs = a + offs
        model = v_min + curv * offs ** 2
        vals = np.array([vfun(x) for x in xs])
        return np.max(np.abs(vals - model)) <= bound

    d = 0.05 * units.osc_length(omega)
    if residual_ok(d):
        while d * 2.0 <= d_max and residual_ok(d * 2.0):
            d *= 2.0
        lo, hi = d, min(2.0 * d, d_max)
    else:
        lo, hi = 0.25 * d, d
        while lo > 1e-12 * d and not residual_ok(lo):
            lo *= 0.25
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        if residual_ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def _well_from_minimum(vfun, x0: float, units: UnitsConfig, tol: float,
                       d_max: float) -> WellParams:
    """Certified WellParams at an already-located minimum x0."""
    # curvature by Richardson second difference, step refined once l is known
    h0 = max(1e-4, 1e-3 * abs(x0) if x0 != 0 else 1e-3)
    curv = _second_derivative(vfun, x0, h0)
    if curv <= 0.0:
        raise ShapeError(f"stationary point at x={x0} is not a minimum")
    omega = math.sqrt(curv / units.mass)
    h = units.osc_length(omega) / 100.0
    curv = _second_derivative(vfun, x0, h)
    if curv <= 0.0:
        raise ShapeError(f"stationary point at x={x0} is not a minimum")
    omega = math.sqrt(curv / units.mass)
    extent = _certify_extent(vfun, x0, omega, vfun(x0), units, tol, d_max)
    return WellParams.from_omega(x0, omega, vfun(x0), extent, units)


def _locate_wells_impl(evaluator, domain, units: UnitsConfig,
                       parabolic_tol: float) -> tuple[WellParams, WellParams]:
    lo, hi = domain

    def v_at(x):
        return float(evaluator(np.array([x], dtype=float))[0][0])

    def dv_at(x):
        return float(evaluator(np.array([x], dtype=float))[1][0])

    xs = np.linspace(lo, hi, 4001)
    dv = evaluator(xs)[1]
    sign = np.sign(dv)
    crossings = np.nonzero(np.diff(sign) != 0)[0]
    minima = []
    for i in crossings:
        if sign[i] < 0 <= sign[i + 1]:  # V' goes - to +: a minimum
            minima.append(brentq(dv_at, xs[i], xs[i + 1], xtol=1e-13))
    if len(minima) != 2:
        raise ShapeError(f"expected exactly two minima, found {len(minima)}")
    d_max = 0.49 * (minima[1] - minima[0]) + max(minima[0] - lo, hi - minima[1])
    wells = [_well_from_minimum(v_at, m, units, parabolic_tol, d_max)
             for m in minima]
    return wells[0], wells[1]


def locate_wells(potential: DoubleWellPotential,
                 parabolic_tol: float = DEFAULT_PARABOLIC_TOL
                 ) -> tuple[WellParams, WellParams]:
    """Re-derive both wells from the raw evaluator: bracketed derivative
    roots for the minima, Richardson second differences for the curvature,
    and a residual scan certifying the parabolic extent.

    Raises ShapeError unless the derivative has exactly two minima-type
    roots inside the domain.
    """
    return _locate_wells_impl(potential.evaluator, potential.domain,
                              potential.units, parabolic_tol)


def barrier_top(potential: DoubleWellPotential) -> tuple[float, float]:
    """Interior maximum of V between the wells."""
    return potential.x_top, potential.v_top


def _find_barrier_top(vfun_vec, dvfun, a_l: float, a_r: float) -> tuple[float, float]:
    xs = np.linspace(a_l, a_r, 2001)[1:-1]
    i = int(np.argmax(vfun_vec(xs)))
    lo = xs[max(i - 2, 0)]
    hi = xs[min(i + 2, len(xs) - 1)]
    if dvfun(lo) > 0.0 > dvfun(hi):
        x_top = brentq(dvfun, lo, hi, xtol=1e-13)
    else:
        x_top = xs[i]
    return x_top, None


def turning_points(potential: DoubleWellPotential, energy: float) -> TurningPair:
    """Inner turning points of the barrier at the given energy, one on each
    side of the barrier top, bracketed and refined to ~1e-12 relative."""
    if energy >= potential.v_top:
        raise NoBarrierError(
            f"E={energy} at or above barrier top {potential.v_top}: no forbidden region")
    if energy <= max(potential.left.v_min, potential.right.v_min):
        raise DomainError(
            f"E={energy} below a well floor: turning pair does not bracket the barrier")

    def f(x):
        return potential.v_at(x) - energy

    a_nu_l = brentq(f, potential.left.a, potential.x_top, xtol=1e-14, rtol=8.9e-16)
    a_nu_r = brentq(f, potential.x_top, potential.right.a, xtol=1e-14, rtol=8.9e-16)
    return TurningPair(a_nu_l=a_nu_l, a_nu_r=a_nu_r, energy=energy)


def _assemble(evaluator, units: UnitsConfig, domain, parabolic_tol,
              warn_shallow=True, breakpoints=()) -> DoubleWellPotential:
    """Shared tail of all builders: locate wells, barrier top, pick c."""
    left, right = _locate_wells_impl(evaluator, domain, units, parabolic_tol)

    def v_vec(x):
        return evaluator(np.asarray(x, dtype=float))[0]

    def dv_at(x):
        return float(evaluator(np.array([x], dtype=float))[1][0])

    x_top, _ = _find_barrier_top(v_vec, dv_at, left.a, right.a)
    v_top = float(v_vec(np.array([x_top]))[0])
    if v_top <= max(left.v_min, right.v_min):
        raise ConstructionError("no barrier between the located minima")
    zp = max(left.v_min + 0.5 * units.hbar * left.omega,
             right.v_min + 0.5 * units.hbar * right.omega)
    if v_top <= zp:
        raise ConstructionError(
            "barrier top below the zero-point energy: no forbidden region for bound states")
    if warn_shallow and v_top - max(left.v_min, right.v_min) < 2.0 * units.hbar * max(
            left.omega, right.omega):
        warnings.warn("barrier height is not large compared with hbar*omega; "
                      "semiclassical results will be rough", stacklevel=3)
    return DoubleWellPotential(evaluator=evaluator, left=left, right=right,
                               c=x_top, domain=domain, units=units,
                               x_top=x_top, v_top=v_top,
                               breakpoints=tuple(breakpoints))


def build_biased_quartic(half_separation: float, barrier_scale: float,
                         bias: float = 0.0,
                         units: UnitsConfig = UnitsConfig(),
                         parabolic_tol: float = DEFAULT_PARABOLIC_TOL
                         ) -> DoubleWellPotential:
    """V(x) = k (x^2 - a^2)^2 + bias*x with a = half_separation,
    k = barrier_scale.  The standard smooth test family; its wells are only
    approximately parabolic."""
    a, k, eps = float(half_separation), float(barrier_scale), float(bias)
    if a <= 0.0 or k <= 0.0:
        raise ConstructionError("half_separation and barrier_scale must be positive")
    eps_crit = 8.0 * k * a ** 3 / (3.0 * math.sqrt(3.0))
    if abs(eps) >= eps_crit:
        raise ConstructionError(
            f"|bias|={abs(eps)} >= {eps_crit:.6g}: one minimum disappears")

    def evaluator(x):
        x = np.asarray(x, dtype=float)
        q = x * x - a * a
        return k * q * q + eps * x, 4.0 * k * x * q + eps

    # domain: far enough out that V exceeds the barrier top by a wide margin
    v_top_est = k * a ** 4 + abs(eps) * a
    omega_est = math.sqrt(8.0 * k * a * a / units.mass)
    span = a
    while k * (span * span - a * a) ** 2 - abs(eps) * span < v_top_est + 20.0 * units.hbar * omega_est:
        span *= 1.25
    domain = (-span, span)
    return _assemble(evaluator, units, domain, parabolic_tol)


def _monotone_rise(x0: float, y0: float, s0: float, x1: float, y1: float):
    """Cubic Hermite pieces rising monotonically from (x0, y0) with slope
    s0 >= 0 to (x1, y1) with zero slope.  A single cubic overshoots when
    the start slope exceeds three times the secant (Fritsch-Carlson), so a
    knot hugging the tangent is inserted in that case."""
    w = x1 - x0
    dy = y1 - y0
    if s0 <= 3.0 * dy / w:
        return [(x0, x1, y0, y1, s0, 0.0)]
    theta = min(0.5, dy / (s0 * w))
    xk = x0 + theta * w
    yk = y0 + 0.5 * s0 * theta * w
    sk = min(0.5 * s0, (y1 - yk) / (x1 - xk))
    return [(x0, xk, y0, yk, s0, sk), (xk, x1, yk, y1, sk, 0.0)]


def _reflect_pieces(pieces):
    return [(-b, -a, yb, ya, -sb, -sa) for (a, b, ya, yb, sa, sb) in
            reversed(pieces)]


def _hermite_eval(x, piece):
    x0, x1, y0, y1, s0, s1 = piece
    w = x1 - x0
    t = (x - x0) / w
    t2 = t * t
    t3 = t2 * t
    v = ((2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * w * s0
         + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * w * s1)
    dv = ((6 * t2 - 6 * t) * y0 / w + (3 * t2 - 4 * t + 1) * s0
          + (-6 * t2 + 6 * t) * y1 / w + (3 * t2 - 2 * t) * s1)
    return v, dv


def build_piecewise_parabolic(left: WellParams, right: WellParams,
                              join_half_widths: tuple[float, float],
                              barrier_height: float,
                              units: UnitsConfig = UnitsConfig()
                              ) -> DoubleWellPotential:
    """Exactly parabolic wells capped by monotone cubic Hermite chains that
    meet with zero slope at the cap maximum, matching value and slope at
    both joins.  V and V' are globally continuous, the cap's interior
    maximum equals barrier_height exactly, and parabolic_extent equals the
    join half-widths exactly.

    This family satisfies the quadratic-well hypothesis of the matching
    method exactly, so it is the reference test potential.
    """
    d_l, d_r = float(join_half_widths[0]), float(join_half_widths[1])
    if d_l <= 0.0 or d_r <= 0.0:
        raise ConstructionError("join half-widths must be positive")
    j_l = left.a + d_l
    j_r = right.a - d_r
    if j_l >= j_r:
        raise ConstructionError(
            f"joins overlap: left join {j_l} >= right join {j_r}")
    m = units.mass
    curv_l = m * left.omega ** 2
    curv_r = m * right.omega ** 2
    vj_l = left.v_min + 0.5 * curv_l * d_l ** 2
    vj_r = right.v_min + 0.5 * curv_r * d_r ** 2
    sj_l = curv_l * d_l          # V'(j_l) > 0
    sj_r = -curv_r * d_r         # V'(j_r) < 0
    if barrier_height <= max(vj_l, vj_r):
        raise ConstructionError(
            f"barrier_height {barrier_height} must exceed both join values "
            f"({vj_l:.6g}, {vj_r:.6g})")
    x_m = 0.5 * (j_l + j_r)
    pieces = (_monotone_rise(j_l, vj_l, sj_l, x_m, barrier_height)
              + _reflect_pieces(_monotone_rise(-j_r, vj_r, -sj_r, -x_m,
                                               barrier_height)))
    knots = np.array([p[0] for p in pieces[1:]])

    def evaluator(x):
        x = np.asarray(x, dtype=float)
        v = np.empty_like(x)
        dv = np.empty_like(x)
        m_l = x <= j_l
        m_r = x >= j_r
        dx = x[m_l] - left.a
        v[m_l] = left.v_min + 0.5 * curv_l * dx * dx
        dv[m_l] = curv_l * dx
        dx = x[m_r] - right.a
        v[m_r] = right.v_min + 0.5 * curv_r * dx * dx
        dv[m_r] = curv_r * dx
        cap = (~m_l) & (~m_r)
        idx = np.searchsorted(knots, x[cap], side="right")
        for k, piece in enumerate(pieces):
            sel = np.zeros_like(x, dtype=bool)
            sel[cap] = idx == k
            if np.any(sel):
                v[sel], dv[sel] = _hermite_eval(x[sel], piece)
        return v, dv

    top_energy = barrier_height + 14.0 * units.hbar * max(left.omega, right.omega)
    margin_l = math.sqrt(2.0 * (top_energy - left.v_min) / curv_l) + 6.0 * left.l
    margin_r = math.sqrt(2.0 * (top_energy - right.v_min) / curv_r) + 6.0 * right.l
    domain = (left.a - margin_l, right.a + margin_r)

    boundaries = sorted({j_l, j_r} | {p[0] for p in pieces} | {p[1] for p in pieces})
    pot = _assemble(evaluator, units, domain, parabolic_tol=1e-9,
                    warn_shallow=True, breakpoints=boundaries)
    # the family is parabolic by construction out to the joins; the scan can
    # only under-certify, so pin the exact extents and well parameters
    exact_left = WellParams.from_omega(left.a, left.omega, left.v_min, d_l, units)
    exact_right = WellParams.from_omega(right.a, right.omega, right.v_min, d_r, units)
    return replace(pot, left=exact_left, right=exact_right)


def build_from_table(x: Sequence[float], v: Sequence[float],
                     units: UnitsConfig = UnitsConfig(),
                     parabolic_tol: float = DEFAULT_PARABOLIC_TOL
                     ) -> DoubleWellPotential:
    """Black-box potential from tabulated (x, V) samples, interpolated by a
    cubic spline; well parameters are extracted numerically."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if x.ndim != 1 or x.shape != v.shape or len(x) < 8:
        raise ConstructionError("need matching 1-D x and V arrays with >= 8 samples")
    if np.any(np.diff(x) <= 0.0):
        raise ConstructionError("x samples must be strictly increasing")
    spline = CubicSpline(x, v)
    dspline = spline.derivative()

    def evaluator(xs):
        xs = np.asarray(xs, dtype=float)
        return spline(xs), dspline(xs)

    domain = (float(x[0]), float(x[-1]))
    return _assemble(evaluator, units, domain, parabolic_tol)


def build_from_csv(path: str, units: UnitsConfig = UnitsConfig(),
                   parabolic_tol: float = DEFAULT_PARABOLIC_TOL
                   ) -> DoubleWellPotential:
    """Tabulated potential from a CSV file with columns x, V (header row
    optional)."""
    data = np.genfromtxt(path, delimiter=",", comments="#")
    if data.ndim != 2 or data.shape[1] < 2:
        raise ConstructionError(f"{path}: expected two CSV columns x, V")
    if np.isnan(data[0]).any():  # header row
        data = data[1:]
    if np.isnan(data).any():
        raise ConstructionError(f"{path}: non-numeric entries in table")
    return build_from_table(data[:, 0], data[:, 1], units, parabolic_tol)
