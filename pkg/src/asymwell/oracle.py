"""Exact grid eigensolver for the 1D Schrodinger equation; ground truth
for every semiclassical result in the package.

The Hamiltonian is discretized on a uniform grid with Dirichlet walls,
either with the standard 3-point kinetic stencil (2nd order, symmetric
tridiagonal, LAPACK) or with the Numerov-corrected discretization
(4th order, solved as a generalized pencil by shift-invert Lanczos with a
fixed start vector; deterministic).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq
from scipy.sparse.linalg import LinearOperator, eigsh, splu

from .errors import CoverageError, DomainError
from .potential import DoubleWellPotential
from .quantize import epsilon_level

TUNNELING_PAIR = "tunneling_pair"
LOCALIZED_SINGLES = "localized_singles"

# a state mixed less than this in its minor well counts as localized
_MIXING_THRESHOLD = 0.02


@dataclass(frozen=True)
class GridSpec:
    x_lo: float
    x_hi: float
    n_points: int

    def __post_init__(self):
        if self.n_points < 501:
            raise DomainError("n_points must be >= 501")
        if not self.x_lo < self.x_hi:
            raise DomainError("x_lo must be below x_hi")

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_lo, self.x_hi, self.n_points)

    @property
    def h(self) -> float:
        return (self.x_hi - self.x_lo) / (self.n_points - 1)

    def halved(self) -> "GridSpec":
        return GridSpec(self.x_lo, self.x_hi, 2 * (self.n_points - 1) + 1)


@dataclass(frozen=True)
class SpectrumResult:
    """Lowest eigenpairs on a grid; eigenvectors are trapezoid-normalized
    with deterministic sign (first significant component positive)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # shape (n_points, count)
    grid: GridSpec


def default_grid(potential: DoubleWellPotential, n_points: int = 8001,
                 count: int = 8) -> GridSpec:
    """Grid covering both wells plus at least six oscillator lengths of
    classically forbidden margin beyond the outer turning points of the
    highest requested level."""
    units = potential.units
    n_top = max(1, (count + 1) // 2)
    e_max = max(epsilon_level(potential.left, n_top, units),
                epsilon_level(potential.right, n_top, units),
                max(potential.left.v_min, potential.right.v_min)
                + (n_top + 0.5) * units.hbar
                * max(potential.left.omega, potential.right.omega))

    def outer_turning(a, direction):
        x = a
        step = potential.left.l if direction < 0 else potential.right.l
        while potential.v_at(x + direction * step) < e_max:
            step *= 1.5
            if abs(step) > 1e6:
                raise CoverageError("potential never exceeds the requested energy")
        return brentq(lambda t: potential.v_at(t) - e_max,
                      min(x, x + direction * step), max(x, x + direction * step))

    x_lo = outer_turning(potential.left.a, -1.0) - 6.0 * potential.left.l
    x_hi = outer_turning(potential.right.a, +1.0) + 6.0 * potential.right.l
    x_lo = max(x_lo, potential.domain[0])
    x_hi = min(x_hi, potential.domain[1])
    return GridSpec(x_lo, x_hi, n_points)


def _normalize(x: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    out = np.empty_like(vecs)
    for j in range(vecs.shape[1]):
        v = vecs[:, j]
        norm = math.sqrt(np.trapezoid(v * v, x))
        v = v / norm
        significant = np.nonzero(np.abs(v) > 1e-6 * np.max(np.abs(v)))[0]
        if v[significant[0]] < 0.0:
            v = -v
        out[:, j] = v
    return out


def _solve_numerov(x: np.ndarray, v_diag: np.ndarray, count: int,
                   hbar: float, mass: float) -> tuple[np.ndarray, np.ndarray]:
    """Numerov pencil  -c K psi + B V psi = E B psi  with B = I + K/12,
    equivalent to the standard symmetric problem M = -c B^{-1} K + V.
    Solved by shift-invert Lanczos: (M - s)^{-1} y = A_s^{-1} (B y) with
    the tridiagonal A_s = -c K + B (V - s) factorized once."""
    n = len(x)
    h = x[1] - x[0]
    c = hbar * hbar / (2.0 * mass * h * h)
    main = np.full(n, -2.0)
    off = np.ones(n - 1)
    K = sp.diags([off, main, off], [-1, 0, 1], format="csc")
    B = (sp.identity(n, format="csc") + K / 12.0).tocsc()
    sigma = float(np.min(v_diag)) - 0.5 * hbar * math.sqrt(
        max(np.max(v_diag) - np.min(v_diag), 1.0) / mass)
    A_s = (-c * K + B @ sp.diags(v_diag - sigma)).tocsc()
    lu_shift = splu(A_s)
    lu_b = splu(B)

    def op_inv(y):
        return lu_shift.solve(B @ y)

    def m_mat(y):
        return -c * lu_b.solve(K @ y) + v_diag * y

    shape = (n, n)
    vals, vecs = eigsh(LinearOperator(shape, matvec=m_mat, dtype=float),
                       k=count, sigma=sigma, which="LM",
                       OPinv=LinearOperator(shape, matvec=op_inv, dtype=float),
                       v0=np.ones(n), tol=0, maxiter=2000)
    order = np.argsort(vals)
    return vals[order], vecs[:, order]


def solve_spectrum(potential: DoubleWellPotential, grid: GridSpec,
                   count: int, numerov: bool = False) -> SpectrumResult:
    """Lowest ``count`` eigenpairs with Dirichlet boundary conditions.

    Checks afterwards that the walls sit at least 5 hbar*omega above the
    highest computed level, so boundary truncation is negligible.
    """
    if count < 1 or count > 20:
        raise DomainError("count must be between 1 and 20")
    x = grid.x
    h = grid.h
    v_diag = np.asarray(potential.V(x), dtype=float)
    hbar, mass = potential.units.hbar, potential.units.mass
    if numerov:
        vals, vecs = _solve_numerov(x, v_diag, count, hbar, mass)
    else:
        kin = hbar * hbar / (mass * h * h)
        diag = kin + v_diag
        off = np.full(len(x) - 1, -0.5 * kin)
        vals, vecs = eigh_tridiagonal(diag, off, select="i",
                                      select_range=(0, count - 1))
    guard = 5.0 * hbar * max(potential.left.omega, potential.right.omega)
    if min(v_diag[0], v_diag[-1]) < vals[-1] + guard:
        raise CoverageError(
            f"grid walls too low: edge potential {min(v_diag[0], v_diag[-1]):.6g} "
            f"< E_max {vals[-1]:.6g} + {guard:.6g}")
    return SpectrumResult(eigenvalues=np.asarray(vals),
                          eigenvectors=_normalize(x, np.asarray(vecs)),
                          grid=grid)


def eigenvalue_error_estimate(potential: DoubleWellPotential, grid: GridSpec,
                              count: int, numerov: bool = False) -> np.ndarray:
    """Richardson error estimate per eigenvalue from a grid-halving pair."""
    coarse = solve_spectrum(potential, grid, count, numerov=numerov)
    fine = solve_spectrum(potential, grid.halved(), count, numerov=numerov)
    factor = 15.0 if numerov else 3.0
    return np.abs(fine.eigenvalues - coarse.eigenvalues) / factor


def pair_splitting(spectrum: SpectrumResult, pair_index: int) -> float:
    """Gap E_{2k+1} - E_{2k} of the pair with index k."""
    j = 2 * pair_index + 1
    if pair_index < 0 or j >= len(spectrum.eigenvalues):
        raise DomainError(f"pair_index {pair_index} out of range")
    return float(spectrum.eigenvalues[j] - spectrum.eigenvalues[j - 1])


def probability_split(eigenvector: np.ndarray, grid: GridSpec,
                      c: float) -> tuple[float, float]:
    """(left, right) trapezoid probabilities of |psi|^2 split at c; the two
    add up to the total norm exactly."""
    x = grid.x
    if not (x[0] <= c <= x[-1]):
        raise CoverageError(f"c={c} outside the grid")
    rho = np.asarray(eigenvector, dtype=float) ** 2
    total = float(np.trapezoid(rho, x))
    i = int(np.searchsorted(x, c))
    if i == 0:
        left = 0.0
    else:
        left = float(np.trapezoid(rho[:i], x[:i]))
        # partial trapezoid of the cell containing c
        if i < len(x):
            rho_c = rho[i - 1] + (rho[i] - rho[i - 1]) * (c - x[i - 1]) / (x[i] - x[i - 1])
            left += 0.5 * (rho[i - 1] + rho_c) * (c - x[i - 1])
    return left, total - left


@dataclass(frozen=True)
class PairClassification:
    kind: str  # TUNNELING_PAIR | LOCALIZED_SINGLES
    state_indices: tuple[int, int]
    gap: float
    left_probs: tuple[float, float]


def resolve_pair_or_single(spectrum: SpectrumResult,
                           potential: DoubleWellPotential,
                           n_l: int, n_r: int) -> PairClassification:
    """Classify the oracle states nearest eps_L and eps_R as a tunneling
    pair (small gap, both states mixed across the barrier) or as localized
    non-degenerate singles."""
    units = potential.units
    eps_l = epsilon_level(potential.left, n_l, units)
    eps_r = epsilon_level(potential.right, n_r, units)
    vals = spectrum.eigenvalues
    i = int(np.argmin(np.abs(vals - eps_l)))
    j = int(np.argmin(np.abs(vals - eps_r)))
    if i == j:
        # both targets point at one state: partner is the nearer neighbor
        candidates = [k for k in (i - 1, i + 1) if 0 <= k < len(vals)]
        j = min(candidates, key=lambda k: abs(vals[k] - 0.5 * (eps_l + eps_r)))
    i, j = min(i, j), max(i, j)
    gap = float(vals[j] - vals[i])
    probs = []
    for idx in (i, j):
        left, right = probability_split(spectrum.eigenvectors[:, idx],
                                        spectrum.grid, potential.c)
        probs.append(left / (left + right))
    omega_min = min(potential.left.omega, potential.right.omega)
    mixed = all(min(p, 1.0 - p) >= _MIXING_THRESHOLD for p in probs)
    kind = (TUNNELING_PAIR
            if gap <= units.hbar * omega_min / 4.0 and mixed
            else LOCALIZED_SINGLES)
    return PairClassification(kind=kind, state_indices=(i, j), gap=gap,
                              left_probs=(probs[0], probs[1]))


def spectrum_to_csv(spectrum: SpectrumResult, path: str) -> None:
    """CSV with columns index, eigenvalue."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("index,eigenvalue\n")
        for i, e in enumerate(spectrum.eigenvalues):
            fh.write(f"{i},{e:.17g}\n")


def eigenvectors_to_csv(spectrum: SpectrumResult, path: str) -> None:
    """CSV with columns x, psi_0, psi_1, ..."""
    x = spectrum.grid.x
    count = spectrum.eigenvectors.shape[1]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("x," + ",".join(f"psi_{j}" for j in range(count)) + "\n")
        for i in range(len(x)):
            row = ",".join(f"{spectrum.eigenvectors[i, j]:.17g}" for j in range(count))
            fh.write(f"{x[i]:.17g},{row}\n")
