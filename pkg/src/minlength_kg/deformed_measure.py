"""Deformed scalar product, hermiticity of x, Gram matrices.

The weight ``(1 + beta p^2)^(gamma/beta - 1)`` is the one that makes
``x = i hbar [(1 + beta p^2) d/dp + gamma p]`` symmetric: integrating by
parts leaves ``i hbar \\int phi* psi [2 gamma p w - ((1 + beta p^2) w)'] dp``,
which vanishes for all test functions only at that exponent.

All p-integrals are taken on the compact q-box via ``p = tan(sqrt(beta) q)/sqrt(beta)``
with Gauss-Legendre nodes, so there are no infinite limits.
"""
from __future__ import annotations

import io
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .closed_form import _check_level, dpsi_dq, kg_energy, potential_strength, psi_q
from .errors import RejectConvergence, RejectLevel
from .model import ModelParams
from .sampling import fmt

DEFAULT_ORDER = 256
TAIL_TOL = 1e-12


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    order: int


@dataclass(frozen=True)
class GramMatrix:
    entries: np.ndarray
    n_max: int

    def max_off_diagonal(self) -> float:
        off = self.entries - np.diag(np.diag(self.entries))
        return float(np.max(np.abs(off))) if self.n_max > 1 else 0.0

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("m,n,re,im\n")
        for m in range(self.n_max):
            for n in range(self.n_max):
                z = self.entries[m, n]
                buf.write(f"{m},{n},{fmt(z.real)},{fmt(z.imag)}\n")
        return buf.getvalue()


@lru_cache(maxsize=32)
def _leggauss(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def quadrature_rule(params: ModelParams, order: int = DEFAULT_ORDER) -> QuadratureRule:
    """Gauss-Legendre rule on the open q-box."""
    half = potential_strength(params).box_half_width
    x, w = _leggauss(order)
    return QuadratureRule(half * x, half * w, order)


def default_exponent(params: ModelParams) -> float:
    return params.gamma / params.beta - 1.0


def weight(params: ModelParams, p, exponent: float | None = None):
    if exponent is None:
        exponent = default_exponent(params)
    out = (1.0 + params.beta * np.asarray(p, dtype=float) ** 2) ** exponent
    return out if out.ndim else float(out)


def _weighted(params: ModelParams, prod, p, exponent: float | None):
    """prod * w(p) * dp/dq, combined in log space.

    Near the walls w * dp/dq can overflow while prod underflows.
    """
    if exponent is None:
        exponent = default_exponent(params)
    log_w = (exponent + 1.0) * np.log1p(params.beta * p**2)
    mag = np.abs(prod)
    with np.errstate(divide="ignore"):
        log_mag = np.log(mag)
    return np.exp(log_mag + log_w + 1j * np.angle(prod))


def _integrate(params: ModelParams, integrand_q: Callable, order: int, tail_tol: float):
    rule = quadrature_rule(params, order)
    vals = integrand_q(rule.nodes)
    peak = np.max(np.abs(vals))
    tail = max(abs(vals[0]), abs(vals[-1]))
    if peak > 0 and tail > tail_tol * peak:
        raise RejectConvergence(
            f"integrand at the box edge is {tail / peak:.3g} of its peak")
    return complex(np.sum(rule.weights * vals))


def inner_product(params: ModelParams, phi: Callable, psi: Callable,
                  order: int = DEFAULT_ORDER, exponent: float | None = None,
                  tail_tol: float = TAIL_TOL) -> complex:
    """<phi|psi> = int conj(phi) psi w dp for callables of p."""
    sb = params.sqrt_beta

    def integrand(q):
        p = np.tan(sb * q) / sb
        return _weighted(params, np.conj(phi(p)) * psi(p), p, exponent)

    return _integrate(params, integrand, order, tail_tol)


def _level_functions(params: ModelParams, n: int):
    """psi_n and x psi_n as callables of q (exact derivative)."""
    E = kg_energy(params, n)
    sb = params.sqrt_beta

    def val(q):
        return psi_q(params, E, n, q)

    def xval(q):
        p = np.tan(sb * q) / sb
        return 1j * params.hbar * (dpsi_dq(params, E, n, q) + params.gamma * p * val(q))

    return E, val, xval


def _q_inner(params: ModelParams, f: Callable, g: Callable, order: int,
             exponent: float | None = None, tail_tol: float = TAIL_TOL) -> complex:
    """Like :func:`inner_product` but for callables of q."""
    sb = params.sqrt_beta

    def integrand(q):
        p = np.tan(sb * q) / sb
        return _weighted(params, np.conj(f(q)) * g(q), p, exponent)

    return _integrate(params, integrand, order, tail_tol)


def raw_gram(params: ModelParams, n_max: int, order: int = DEFAULT_ORDER) -> np.ndarray:
    """Unnormalized <psi_m|psi_n> for m, n < n_max."""
    if n_max < 1:
        raise RejectLevel("Gram dimension must be at least 1")
    fns = [_level_functions(params, n)[1] for n in range(n_max)]
    G = np.zeros((n_max, n_max), dtype=complex)
    for m in range(n_max):
        for n in range(m, n_max):
            G[m, n] = _q_inner(params, fns[m], fns[n], order)
            G[n, m] = np.conj(G[m, n])
    return G


def _normalize(G: np.ndarray) -> np.ndarray:
    d = np.sqrt(np.abs(np.diag(G)))
    return G / np.outer(d, d)


def gram(params: ModelParams, n_max: int, order: int = DEFAULT_ORDER) -> GramMatrix:
    """Normalized Gram matrix of psi_0 .. psi_{n_max-1} (unit diagonal)."""
    G = _normalize(raw_gram(params, n_max, order))
    np.fill_diagonal(G, 1.0)
    return GramMatrix(G, n_max)


def kg_gram(params: ModelParams, n_max: int, order: int = DEFAULT_ORDER) -> GramMatrix:
    """Normalized matrix of <psi_m|(E_m + E_n - 2 mu x) psi_n>.

    The energy enters the momentum-space equation linearly through the
    vector coupling, so states of different energy are orthogonal in this
    kernel rather than in the bare scalar product; with ``mu = 0`` the two
    coincide up to the constant ``E_m + E_n``.
    """
    if n_max < 1:
        raise RejectLevel("Gram dimension must be at least 1")
    levels = [_level_functions(params, n) for n in range(n_max)]
    G = np.zeros((n_max, n_max), dtype=complex)
    for m in range(n_max):
        Em, fm, _ = levels[m]
        for n in range(m, n_max):
            En, fn, xfn = levels[n]

            def kernel(q, En=En, fn=fn, xfn=xfn, Em=Em):
                return (Em + En) * fn(q) - 2.0 * params.mu * xfn(q)

            G[m, n] = _q_inner(params, fm, kernel, order)
            G[n, m] = np.conj(G[m, n])
    return GramMatrix(_normalize(G), n_max)


def normalization(params: ModelParams, n: int, order: int = DEFAULT_ORDER) -> float:
    """N_n with <N_n psi_n | N_n psi_n> = 1."""
    n = _check_level(n)
    f = _level_functions(params, n)[1]
    return float(1.0 / np.sqrt(_q_inner(params, f, f, order).real))


@dataclass(frozen=True)
class SmoothFunction:
    """A p-space function with its exact first derivative."""

    value: Callable
    deriv: Callable

    def __call__(self, p):
        return self.value(p)


def apply_position(params: ModelParams, f: SmoothFunction) -> Callable:
    """x f = i hbar [(1 + beta p^2) f' + gamma p f]."""
    def xf(p):
        p = np.asarray(p, dtype=float)
        return 1j * params.hbar * ((1.0 + params.beta * p**2) * f.deriv(p)
                                   + params.gamma * p * f.value(p))
    return xf


def gaussian_function(center: float, width: float, coeffs) -> SmoothFunction:
    """(a + b x + c x^2) exp(-x^2 / (2 width^2)) with x = p - center."""
    a, b, c = coeffs

    def value(p):
        x = np.asarray(p, dtype=float) - center
        return (a + b * x + c * x * x) * np.exp(-0.5 * (x / width) ** 2)

    def deriv(p):
        x = np.asarray(p, dtype=float) - center
        poly = a + b * x + c * x * x
        return (b + 2 * c * x - poly * x / width**2) * np.exp(-0.5 * (x / width) ** 2)

    return SmoothFunction(value, deriv)


def random_test_pairs(count: int, seed: int = 0) -> list[tuple[SmoothFunction, SmoothFunction]]:
    """Pairs of Gaussian-envelope functions with O(1) overlap."""
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(count):
        center = rng.uniform(0.3, 1.5)
        fs = []
        for _ in range(2):
            shift = center + rng.uniform(-0.2, 0.2)
            width = rng.uniform(0.7, 1.5)
            b, c = 0.3 * (rng.normal(size=2) + 1j * rng.normal(size=2))
            fs.append(gaussian_function(shift, width, (1.0, b, c)))
        pairs.append((fs[0], fs[1]))
    return pairs


def hermiticity_defect(params: ModelParams, phi: SmoothFunction, psi: SmoothFunction,
                       exponent: float | None = None, order: int = DEFAULT_ORDER) -> float:
    """|<phi|x psi> - <x phi|psi>| under the weight with ``exponent``."""
    left = inner_product(params, phi, apply_position(params, psi), order, exponent)
    right = inner_product(params, apply_position(params, phi), psi, order, exponent)
    return abs(left - right)
