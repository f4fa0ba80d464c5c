"""Sampled complex functions, CSV I/O and fourth-order finite differences."""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import RejectGrid

MIN_SAMPLES = 9


@dataclass(frozen=True)
class SampledFunction:
    """Complex samples on a strictly increasing grid in ``space`` ('p' or 'q')."""

    coord: np.ndarray
    values: np.ndarray
    space: str = "p"

    def __post_init__(self):
        coord = np.asarray(self.coord, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        if coord.ndim != 1 or coord.shape != values.shape:
            raise RejectGrid("coord and values must be 1-D arrays of equal length")
        if self.space not in ("p", "q"):
            raise RejectGrid(f"unknown space {self.space!r}")
        coord.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "coord", coord)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.coord)

    def with_values(self, values) -> "SampledFunction":
        return SampledFunction(self.coord, values, self.space)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("coord,re,im\n")
        for x, v in zip(self.coord, self.values):
            buf.write(f"{fmt(x)},{fmt(v.real)},{fmt(v.imag)}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, space: str = "p") -> "SampledFunction":
        lines = text.strip().splitlines()
        if lines[0].strip() != "coord,re,im":
            raise RejectGrid("expected header 'coord,re,im'")
        rows = np.array([[float(t) for t in ln.split(",")] for ln in lines[1:]])
        out = cls(rows[:, 0], rows[:, 1] + 1j * rows[:, 2], space)
        check_grid(out.coord)
        return out


def fmt(x: float) -> str:
    """17 significant digits; round-trips binary64 exactly."""
    return f"{x:.17g}"


def check_grid(x: np.ndarray) -> None:
    if len(x) < MIN_SAMPLES:
        raise RejectGrid(f"need at least {MIN_SAMPLES} samples, got {len(x)}")
    if not np.all(np.diff(x) > 0):
        raise RejectGrid("grid must be strictly increasing")


def is_uniform(x: np.ndarray, rtol: float = 1e-9) -> bool:
    d = np.diff(x)
    return bool(np.all(np.abs(d - d.mean()) <= rtol * abs(d.mean())))


@lru_cache(maxsize=None)
def fd_weights(order: int, offsets: tuple[int, ...]) -> np.ndarray:
    """Finite-difference weights for the ``order``-th derivative at 0 (Fornberg)."""
    z = np.asarray(offsets, dtype=float)
    n = len(z)
    c = np.zeros((n, order + 1))
    c1, c4 = 1.0, z[0]
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, order)
        c2, c5, c4 = 1.0, c4, z[i]
        for j in range(i):
            c3 = z[i] - z[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, order].copy()


# Fourth-order stencils.  First derivative: 5 points; second derivative needs
# 6 points when one-sided.
_STENCILS = {
    1: {"center": (-2, -1, 0, 1, 2), "left": [(0, 1, 2, 3, 4), (-1, 0, 1, 2, 3)]},
    2: {"center": (-2, -1, 0, 1, 2),
        "left": [(0, 1, 2, 3, 4, 5), (-1, 0, 1, 2, 3, 4)]},
}


def derivative(values: np.ndarray, h: float, order: int) -> np.ndarray:
    """``order``-th derivative (1 or 2) on a uniform grid, 4th-order accurate.

    Interior points use centred 5-point stencils; the two points at each end
    use one-sided stencils of the same order.
    """
    v = np.asarray(values)
    n = len(v)
    if n < MIN_SAMPLES:
        raise RejectGrid(f"need at least {MIN_SAMPLES} samples, got {n}")
    spec = _STENCILS[order]
    out = np.zeros_like(v)
    w = fd_weights(order, spec["center"])
    for k, off in enumerate(spec["center"]):
        out[2:n - 2] += w[k] * v[2 + off:n - 2 + off]
    for i, offs in enumerate(spec["left"]):
        w = fd_weights(order, offs)
        out[i] = sum(wk * v[i + o] for wk, o in zip(w, offs))
        wr = fd_weights(order, tuple(-o for o in offs))
        out[n - 1 - i] = sum(wk * v[n - 1 - i - o] for wk, o in zip(wr, offs))
    return out / h**order


def trapezoid_norm(values: np.ndarray, weights: np.ndarray, h: float) -> float:
    """sqrt(sum |v|^2 w h) with trapezoid end weights."""
    dens = np.abs(values) ** 2 * weights
    return math.sqrt(h * (dens.sum() - 0.5 * (dens[0] + dens[-1])))
