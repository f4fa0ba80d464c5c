"""Finite-difference oracle for the sec^2 Schrodinger problem.

The q-box is discretized with the 3-point Laplacian, Dirichlet walls inset
slightly from the singular endpoints, and the lowest eigenvalues of the
resulting symmetric tridiagonal matrix are located by Sturm-sequence
bisection.  Three nested grids give a Richardson-extrapolated spectrum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .closed_form import energy_from_gap, potential_strength
from .errors import RejectBranch, RejectCount, RejectGrid
from .model import ModelParams

DEFAULT_MARGIN = 1e-6


@dataclass(frozen=True)
class GridSpec:
    n_points: int
    half_width: float
    margin: float = DEFAULT_MARGIN

    def __post_init__(self):
        if self.n_points < 64:
            raise RejectGrid("need at least 64 interior points")
        if not 0 < self.margin <= 1e-3:
            raise RejectGrid("margin must lie in (0, 1e-3]")
        if self.half_width <= 0:
            raise RejectGrid("half width must be positive")

    @property
    def wall(self) -> float:
        return self.half_width * (1.0 - self.margin)

    @property
    def spacing(self) -> float:
        return 2.0 * self.wall / (self.n_points + 1)

    def nodes(self) -> np.ndarray:
        return -self.wall + self.spacing * np.arange(1, self.n_points + 1)

    @classmethod
    def for_params(cls, params: ModelParams, n_points: int,
                   margin: float = DEFAULT_MARGIN) -> "GridSpec":
        return cls(n_points, potential_strength(params).box_half_width, margin)


@dataclass(frozen=True)
class Tridiagonal:
    diag: np.ndarray
    off: np.ndarray

    def __len__(self):
        return len(self.diag)

    def gershgorin(self) -> tuple[float, float]:
        a = np.abs(np.concatenate(([0.0], self.off)))
        b = np.abs(np.concatenate((self.off, [0.0])))
        r = a + b
        return float(np.min(self.diag - r)), float(np.max(self.diag + r))


@dataclass(frozen=True)
class EigenResult:
    e_values: np.ndarray
    grid: GridSpec | None
    order_estimate: float | None = None


def laplacian(grid: GridSpec, potential: np.ndarray | None = None) -> Tridiagonal:
    """-d^2/dq^2 (+ diagonal potential) with Dirichlet walls."""
    h = grid.spacing
    diag = np.full(grid.n_points, 2.0 / h**2)
    if potential is not None:
        diag = diag + potential
    off = np.full(grid.n_points - 1, -1.0 / h**2)
    return Tridiagonal(diag, off)


def discretize(params: ModelParams, grid: GridSpec) -> Tridiagonal:
    """-d^2/dq^2 + v0 sec^2(sqrt(beta) q) on the inset box."""
    v0 = potential_strength(params).v0
    q = grid.nodes()
    return laplacian(grid, v0 / np.cos(params.sqrt_beta * q) ** 2)


def sturm_count(op: Tridiagonal, shifts: np.ndarray) -> np.ndarray:
    """Number of eigenvalues strictly below each shift.

    Counts negative pivots of the LDL^T factorization of ``T - shift``.
    """
    shifts = np.asarray(shifts, dtype=float)
    d, e2 = op.diag, op.off**2
    tiny = np.finfo(float).tiny
    count = np.zeros(shifts.shape, dtype=np.int64)
    piv = d[0] - shifts
    piv = np.where(piv == 0.0, -tiny, piv)
    count += piv < 0
    # a pivot of -tiny overflows the next quotient to -inf; the count stays right
    with np.errstate(over="ignore"):
        for i in range(1, len(d)):
            piv = (d[i] - shifts) - e2[i - 1] / piv
            piv = np.where(piv == 0.0, -tiny, piv)
            count += piv < 0
    return count


def eigen_lowest(op: Tridiagonal, k: int, rtol: float = 1e-12,
                 sections: int = 32) -> EigenResult:
    """The ``k`` smallest eigenvalues by Sturm-sequence multisection.

    Every bracket is cut at ``sections - 1`` interior shifts per pass (plain
    bisection when ``sections == 2``), all shifts sharing one sweep of the
    recurrence.  A bracket is done once its width is below
    ``rtol * max(1, |eigenvalue|)`` or it can no longer be split in floating
    point.
    """
    n = len(op)
    if k < 1 or k > n:
        raise RejectCount(f"requested {k} eigenvalues from an operator of size {n}")
    glo, ghi = op.gershgorin()
    lo = np.full(k, glo)
    hi = np.full(k, ghi)
    idx = np.arange(k)[:, None]
    frac = np.arange(1, sections) / sections
    for _ in range(200):
        width = hi - lo
        active = width > rtol * np.maximum(1.0, np.abs(0.5 * (lo + hi)))
        active &= (0.5 * (lo + hi) > lo) & (0.5 * (lo + hi) < hi)
        if not active.any():
            break
        shifts = lo[:, None] + width[:, None] * frac[None, :]
        below = sturm_count(op, shifts)
        # eigenvalue i lies below a shift when more than i eigenvalues do
        left = below > idx
        first = np.where(left.any(axis=1), left.argmax(axis=1), sections - 1)
        rows = np.arange(k)
        new_hi = np.where(first < sections - 1,
                          shifts[rows, np.minimum(first, sections - 2)], hi)
        new_lo = np.where(first > 0, shifts[rows, np.maximum(first - 1, 0)], lo)
        hi = np.where(active, new_hi, hi)
        lo = np.where(active, new_lo, lo)
    return EigenResult(0.5 * (lo + hi), None)


def solve(params: ModelParams, k: int, grid: GridSpec) -> EigenResult:
    res = eigen_lowest(discretize(params, grid), k)
    return EigenResult(res.e_values, grid)


def nested_grids(params: ModelParams, n_points: int = 2047, levels: int = 3,
                 margin: float = DEFAULT_MARGIN) -> list[GridSpec]:
    """Grids whose spacing halves at each level: N -> 2N + 1."""
    grids = []
    n = n_points
    for _ in range(levels):
        grids.append(GridSpec.for_params(params, n, margin))
        n = 2 * n + 1
    return grids


def richardson(coarse: np.ndarray, mid: np.ndarray, fine: np.ndarray):
    """Two-stage extrapolation removing h^2 and h^4 terms.

    Returns the extrapolated values and the observed order of the raw
    sequence, log2((coarse - mid) / (mid - fine)), for the lowest value.
    """
    r1 = (4.0 * mid - coarse) / 3.0
    r2 = (4.0 * fine - mid) / 3.0
    extrap = (16.0 * r2 - r1) / 15.0
    num, den = coarse[0] - mid[0], mid[0] - fine[0]
    order = math.log2(num / den) if num * den > 0 else float("nan")
    return extrap, order


def refine_operators(ops: list[Tridiagonal], grids: list[GridSpec], k: int) -> EigenResult:
    if len(ops) < 3:
        raise RejectGrid("extrapolation needs at least three grids")
    for a, b in zip(grids, grids[1:]):
        if not math.isclose(a.spacing, 2.0 * b.spacing, rel_tol=1e-12):
            raise RejectGrid("grids must be nested with halving spacing")
    vals = [eigen_lowest(op, k).e_values for op in ops]
    extrap, order = richardson(*vals[-3:])
    return EigenResult(extrap, grids[-1], order)


def refine(params: ModelParams, k: int, grids: list[GridSpec]) -> EigenResult:
    """Richardson-extrapolated lowest ``k`` eigenvalues from nested grids."""
    if len(grids) < 3:
        raise RejectGrid("extrapolation needs at least three grids")
    return refine_operators([discretize(params, g) for g in grids], grids, k)


def energy_from_e(params: ModelParams, e: float) -> float:
    """Klein-Gordon energy from a Schrodinger eigenvalue (positive branch)."""
    v0 = potential_strength(params).v0
    if not e > v0:
        raise RejectBranch(f"eigenvalue {e} does not exceed the floor v0={v0}")
    return energy_from_gap(params, e - v0)


def e_from_energy(params: ModelParams, E: float) -> float:
    """Forward energy map: v0 + (lambda E + mu m c^2)^2 / (hbar (lambda^2 - mu^2))^2."""
    v0 = potential_strength(params).v0
    return v0 + ((params.lam * E + params.mu * params.rest_energy)
                 / (params.hbar * params.delta)) ** 2
