"""Momentum-space ODE and its reduction to Schrodinger form.

With ``F = 1 + beta p^2`` the Klein-Gordon equation in the momentum
representation reads ``[-f d^2/dp^2 + g d/dp + h] psi = eps psi`` where

    f = F^2
    g = -2 F [p (beta + gamma) - i K]
    h = -p^2 [gamma (beta + gamma) - c^2/(hbar^2 (lambda^2 - mu^2))] + 2 i gamma K p
    eps = gamma + (E^2 - m^2 c^4) / (hbar^2 (lambda^2 - mu^2))

and ``K = (mu E + m c^2 lambda) / (hbar (lambda^2 - mu^2))``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .closed_form import kg_energy, ode_eigenvalue, potential_strength, psi as psi_fn
from .errors import RejectGrid
from .model import ModelParams
from .sampling import SampledFunction, check_grid, derivative, is_uniform


@dataclass(frozen=True)
class OdeCoefficients:
    f: Callable
    g: Callable
    h: Callable
    eps: float


@dataclass(frozen=True)
class GaugeTransform:
    q_of_p: Callable
    p_of_q: Callable
    chi: Callable
    rho: Callable


def build_coefficients(params: ModelParams, E: float) -> OdeCoefficients:
    b, gam = params.beta, params.gamma
    K = params.coupling(E)
    kappa = params.c**2 / (params.hbar**2 * params.delta)

    def f(p):
        return (1.0 + b * np.asarray(p) ** 2) ** 2

    def g(p):
        p = np.asarray(p)
        return -2.0 * (1.0 + b * p**2) * (p * (b + gam) - 1j * K)

    def h(p):
        p = np.asarray(p)
        return -p**2 * (gam * (b + gam) - kappa) + 2j * gam * K * p

    return OdeCoefficients(f, g, h, ode_eigenvalue(params, E))


def q_map(params: ModelParams, p):
    sb = params.sqrt_beta
    return np.arctan(sb * np.asarray(p, dtype=float)) / sb


def p_of_q(params: ModelParams, q):
    sb = params.sqrt_beta
    return np.tan(sb * np.asarray(q, dtype=float)) / sb


def chi(params: ModelParams, E: float, p):
    """(f' + 2 g) / (4 f), reduced: (i K - gamma p) / (1 + beta p^2)."""
    p = np.asarray(p, dtype=float)
    return (1j * params.coupling(E) - params.gamma * p) / (1.0 + params.beta * p**2)


def gauge_factor(params: ModelParams, E: float, p):
    """rho(p) = exp(int_0^p chi) in closed form.

    ``(1 + beta p^2)^(-gamma/(2 beta)) * exp(i K arctan(sqrt(beta) p)/sqrt(beta))``
    """
    p = np.asarray(p, dtype=float)
    mod = (1.0 + params.beta * p**2) ** (-params.gamma / (2.0 * params.beta))
    out = mod * np.exp(1j * params.coupling(E) * q_map(params, p))
    return out if out.ndim else complex(out)


def gauge_transform(params: ModelParams, E: float) -> GaugeTransform:
    return GaugeTransform(
        q_of_p=lambda p: q_map(params, p),
        p_of_q=lambda q: p_of_q(params, q),
        chi=lambda p: chi(params, E, p),
        rho=lambda p: gauge_factor(params, E, p),
    )


def q_grid(params: ModelParams, n: int, margin: float = 1e-6) -> np.ndarray:
    """``n`` points uniform in q on the closed box inset by ``margin``."""
    half = potential_strength(params).box_half_width * (1.0 - margin)
    return np.linspace(-half, half, n)


def sample(params: ModelParams, fn: Callable, q: np.ndarray) -> SampledFunction:
    """Sample a p-space function on the image of a q grid."""
    p = p_of_q(params, q)
    return SampledFunction(p, fn(p), "p")


def p_derivatives(params: ModelParams, psi: SampledFunction):
    """First and second p-derivatives of sampled ``psi``, 4th-order.

    Uniform-in-q grids are differentiated in q and converted by the chain
    rule; uniform-in-p grids directly.
    """
    if psi.space != "p":
        raise RejectGrid("expected a p-space sampled function")
    p = psi.coord
    check_grid(p)
    v = psi.values
    q = q_map(params, p)
    if is_uniform(q):
        hq = (q[-1] - q[0]) / (len(q) - 1)
        d1q = derivative(v, hq, 1)
        d2q = derivative(v, hq, 2)
        F = 1.0 + params.beta * p**2
        dF = 2.0 * params.beta * p
        return d1q / F, (d2q - dF * d1q) / F**2
    if is_uniform(p):
        hp = (p[-1] - p[0]) / (len(p) - 1)
        return derivative(v, hp, 1), derivative(v, hp, 2)
    raise RejectGrid("grid must be uniform in p or in q")


def apply_raw_operator(params: ModelParams, E: float,
                       psi: SampledFunction) -> SampledFunction:
    """[-f d^2/dp^2 + g d/dp + h] psi on the samples of ``psi``."""
    co = build_coefficients(params, E)
    p = psi.coord
    d1, d2 = p_derivatives(params, psi)
    if not np.any(psi.values):
        return psi.with_values(np.zeros(len(p), dtype=complex))
    return psi.with_values(-co.f(p) * d2 + co.g(p) * d1 + co.h(p) * psi.values)


def measure_density(params: ModelParams, p) -> np.ndarray:
    """Deformed weight times dp/dq: integrand factor for integrals over q."""
    p = np.asarray(p, dtype=float)
    return (1.0 + params.beta * p**2) ** (params.gamma / params.beta)


def deformed_norm(params: ModelParams, psi: SampledFunction, skip: int = 0) -> float:
    """Deformed norm of samples on a uniform-in-q grid (trapezoid in q).

    ``skip`` drops that many nodes at each end (zeroes them in the sum).
    """
    q = q_map(params, psi.coord)
    if not is_uniform(q):
        raise RejectGrid("deformed_norm needs a uniform-in-q grid")
    hq = (q[-1] - q[0]) / (len(q) - 1)
    dens = np.abs(psi.values) ** 2 * measure_density(params, psi.coord)
    if skip:
        dens[:skip] = 0.0
        dens[-skip:] = 0.0
    return math.sqrt(hq * (dens.sum() - 0.5 * (dens[0] + dens[-1])))


def eigen_residual(params: ModelParams, n: int, size: int, margin: float = 1e-6) -> float:
    """Relative residual ``||(L - eps_n) psi_n|| / ||psi_n||`` on a q grid.

    The two nodes at each wall, where the stencils are one-sided, are left
    out of the residual norm: there the weight ``(1 + beta p^2)^(gamma/beta)``
    reaches ~1e29 and amplifies stencil error on values that are zero to
    working precision.
    """
    E = kg_energy(params, n)
    eps = ode_eigenvalue(params, E)
    s = sample(params, lambda p: psi_fn(params, E, n, p), q_grid(params, size, margin))
    r = apply_raw_operator(params, E, s)
    r = r.with_values(r.values - eps * s.values)
    return deformed_norm(params, r, skip=2) / deformed_norm(params, s)


def schrodinger_reduction(params: ModelParams, E: float, u: Callable,
                          n: int = 2001, margin: float = 0.3):
    """Apply the raw operator to ``rho * u(q(p))`` and undo the gauge.

    Returns ``(q, lhs, rhs)`` where ``lhs = rho^-1 (L - eps + e) rho u`` and
    ``rhs = -u'' + v0 sec^2(sqrt(beta) q) u`` with ``u''`` from the same
    stencil.  The two agree to discretization order when the reduction holds.
    ``margin`` keeps the comparison away from the walls, where the
    sec^2 factor amplifies round-off.
    """
    q = q_grid(params, n, margin)
    p = p_of_q(params, q)
    rho = gauge_factor(params, E, p)
    samples = SampledFunction(p, rho * u(q), "p")
    out = apply_raw_operator(params, E, samples).values / rho
    form = potential_strength(params)
    K = params.coupling(E)
    e = (ode_eigenvalue(params, E) - params.gamma + K * K) + form.v0
    lhs = out - ode_eigenvalue(params, E) * u(q) + e * u(q)
    hq = q[1] - q[0]
    rhs = -derivative(u(q), hq, 2) + form.v0 / np.cos(params.sqrt_beta * q) ** 2 * u(q)
    return q, lhs, rhs
