"""Closed-form spectrum and eigenfunctions.

The momentum-space Klein-Gordon equation maps onto a Schrodinger problem in
``q = arctan(sqrt(beta) p) / sqrt(beta)`` with the trigonometric
Poschl-Teller potential ``v0 sec^2(sqrt(beta) q)`` on the open box
``|q| < pi / (2 sqrt(beta))``.  Its levels are ``e_n = (A + sqrt(beta) n)^2``
with ``A (A - sqrt(beta)) = v0``.

The Schrodinger energy relates to the Klein-Gordon energy through

    e = (lambda E + mu m c^2)^2 / (hbar^2 (lambda^2 - mu^2)^2) + v0,

which follows from the identity
``(E^2 - m^2 c^4)(lambda^2 - mu^2) + (mu E + m c^2 lambda)^2
= (lambda E + mu m c^2)^2``.  We take the positive root of
``lambda E + mu m c^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RejectDomain, RejectLevel
from .model import ModelParams


@dataclass(frozen=True)
class SchrodingerForm:
    v0: float
    a_coeff: float
    box_half_width: float


@dataclass(frozen=True)
class SpectrumEntry:
    n: int
    e_n: float
    E_n: float
    eps_n: float


def _check_level(n: int) -> int:
    if n < 0 or int(n) != n:
        raise RejectLevel(f"level must be a non-negative integer, got {n}")
    return int(n)


def potential_strength(params: ModelParams) -> SchrodingerForm:
    beta, sb = params.beta, params.sqrt_beta
    v0 = params.c**2 / (beta * params.hbar**2 * params.delta)
    a = 0.5 * (sb + math.sqrt(beta + 4.0 * v0))
    return SchrodingerForm(v0=v0, a_coeff=a, box_half_width=math.pi / (2.0 * sb))


def ladder_slope(params: ModelParams) -> float:
    """sqrt(beta) * A, computed without the cancellation in A*A - v0.

    Equals ``e_0 - v0`` and the superpotential slope of the factorization.
    """
    beta = params.beta
    return 0.5 * (beta + math.sqrt(beta**2 + 4.0 * params.c**2
                                   / (params.hbar**2 * params.delta)))


def jacobi_index(params: ModelParams) -> float:
    """A / sqrt(beta); the Jacobi parameters are this minus one half."""
    return potential_strength(params).a_coeff / params.sqrt_beta


def schrodinger_energy(params: ModelParams, n: int) -> float:
    n = _check_level(n)
    a = potential_strength(params).a_coeff
    return (a + params.sqrt_beta * n) ** 2


def schrodinger_gap(params: ModelParams, n: int) -> float:
    """e_n - v0 = beta n^2 + (2n + 1) sqrt(beta) A, free of cancellation."""
    n = _check_level(n)
    return params.beta * n * n + (2 * n + 1) * ladder_slope(params)


def energy_from_gap(params: ModelParams, gap: float) -> float:
    """Klein-Gordon energy from ``e - v0`` on the positive branch."""
    root = params.hbar * params.delta * math.sqrt(gap)
    return (root - params.mu * params.rest_energy) / params.lam


def kg_energy(params: ModelParams, n: int) -> float:
    """Klein-Gordon energy E_n, evaluated from the closed formula.

    ``E_n = -mu m c^2/lambda + hbar (lambda^2 - mu^2)/lambda
    * sqrt(beta (n^2 + n + 1/2)
           + beta (n + 1/2) sqrt(1 + 4 c^2 / (hbar^2 beta^2 (lambda^2 - mu^2))))``
    """
    n = _check_level(n)
    p = params
    inner = p.beta * (n * n + n + 0.5) + p.beta * (n + 0.5) * math.sqrt(
        1.0 + 4.0 * p.c**2 / (p.hbar**2 * p.beta**2 * p.delta))
    return -p.mu * p.rest_energy / p.lam + p.hbar * p.delta / p.lam * math.sqrt(inner)


def kg_energy_from_map(params: ModelParams, n: int) -> float:
    """E_n by inverting the energy map at e_n (second route, same answer)."""
    return energy_from_gap(params, schrodinger_gap(params, n))


def ode_eigenvalue(params: ModelParams, E: float) -> float:
    """epsilon = gamma + (E^2 - m^2 c^4) / (hbar^2 (lambda^2 - mu^2))."""
    p = params
    return p.gamma + (E * E - p.rest_energy**2) / (p.hbar**2 * p.delta)


def spectrum(params: ModelParams, n_max: int) -> list[SpectrumEntry]:
    out = []
    for n in range(_check_level(n_max) + 1):
        E = kg_energy(params, n)
        out.append(SpectrumEntry(n, schrodinger_energy(params, n), E,
                                 ode_eigenvalue(params, E)))
    return out


def kg_energy_expansion(params: ModelParams, n: int) -> tuple[float, float]:
    """Zeroth-order energy and first-order coefficient of E_n in beta."""
    n = _check_level(n)
    p = params
    e0 = (-p.mu * p.rest_energy / p.lam
          + math.sqrt(p.hbar * p.c / p.lam**2) * p.delta**0.75 * math.sqrt(2 * n + 1))
    c1 = (math.sqrt(p.hbar**3 / (4.0 * p.c * p.lam**2)) * p.delta**1.25
          * (n * n + n + 0.5) / math.sqrt(2 * n + 1))
    return e0, c1


def jacobi_eval(n: int, a: float, b: float, x):
    """P_n^(a,b)(x) by forward three-term recurrence in the degree."""
    if a <= -1 or b <= -1:
        raise RejectDomain("Jacobi parameters must exceed -1")
    n = _check_level(n)
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0):
        raise RejectDomain("Jacobi abscissa outside [-1, 1]")
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev if x.ndim else float(p_prev)
    p_cur = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x
    for k in range(2, n + 1):
        s = 2 * k + a + b
        a1 = 2 * k * (k + a + b) * (s - 2)
        a2 = (s - 1) * (a * a - b * b)
        a3 = (s - 2) * (s - 1) * s
        a4 = 2 * (k + a - 1) * (k + b - 1) * s
        p_prev, p_cur = p_cur, ((a2 + a3 * x) * p_cur - a4 * p_prev) / a1
    return p_cur if x.ndim else float(p_cur)


def jacobi_derivative(n: int, a: float, b: float, x):
    """d/dx P_n^(a,b)(x) = (n + a + b + 1)/2 * P_{n-1}^(a+1,b+1)(x)."""
    n = _check_level(n)
    if n == 0:
        return np.zeros_like(np.asarray(x, dtype=float))
    return 0.5 * (n + a + b + 1) * jacobi_eval(n - 1, a + 1, b + 1, x)


def _phi_parts(params: ModelParams, n: int, q):
    sb = params.sqrt_beta
    k = jacobi_index(params)
    alpha = k - 0.5
    return sb, k, alpha, np.cos(sb * q), np.sin(sb * q)


def phi(params: ModelParams, n: int, q):
    """Unnormalized Schrodinger eigenfunction in q (real)."""
    q = np.asarray(q, dtype=float)
    half = potential_strength(params).box_half_width
    if np.any(np.abs(q) >= half):
        raise RejectDomain("q outside the open box")
    _, k, alpha, cos, sin = _phi_parts(params, n, q)
    out = cos**k * jacobi_eval(n, alpha, alpha, sin)
    return out if out.ndim else float(out)


def envelope_exponent(params: ModelParams) -> float:
    """Exponent s in |psi_n(p)| ~ (1 + beta p^2)^(-s) (times the Jacobi factor).

    ``s = gamma/(2 beta) + A/(2 sqrt(beta))``: the gauge modulus contributes
    ``gamma/(2 beta)`` and ``cos(sqrt(beta) q)^(A/sqrt(beta))`` contributes
    the other half.
    """
    return params.gamma / (2.0 * params.beta) + 0.5 * jacobi_index(params)


def psi_q(params: ModelParams, E: float, n: int, q):
    """psi_n expressed as a function of q; see :func:`psi`."""
    q = np.asarray(q, dtype=float)
    _, k, alpha, cos, sin = _phi_parts(params, n, q)
    env = cos ** (params.gamma / params.beta + k)
    return env * jacobi_eval(n, alpha, alpha, sin) * np.exp(1j * params.coupling(E) * q)


def dpsi_dq(params: ModelParams, E: float, n: int, q):
    """Exact q-derivative of :func:`psi_q`."""
    q = np.asarray(q, dtype=float)
    sb, k, alpha, cos, sin = _phi_parts(params, n, q)
    s = params.gamma / params.beta + k
    K = params.coupling(E)
    P = jacobi_eval(n, alpha, alpha, sin)
    dP = jacobi_derivative(n, alpha, alpha, sin)
    env = cos**s
    d_env = -s * sb * sin * cos ** (s - 1)
    return (d_env * P + env * dP * sb * cos + 1j * K * env * P) * np.exp(1j * K * q)


def psi(params: ModelParams, E: float, n: int, p):
    """Unnormalized momentum-space eigenfunction psi_n(p).

    ``psi_n(p) = exp(i K arctan(sqrt(beta) p)/sqrt(beta))
    (1 + beta p^2)^(-(gamma/(2 beta) + A/(2 sqrt(beta))))
    P_n^(alpha, alpha)(sqrt(beta) p / sqrt(1 + beta p^2))``

    with ``K = (m c^2 lambda + E mu)/(hbar (lambda^2 - mu^2))`` and
    ``alpha = A/sqrt(beta) - 1/2``.  ``E`` should be ``kg_energy(params, n)``.
    """
    p_arr = np.asarray(p, dtype=float)
    sb = params.sqrt_beta
    one = 1.0 + params.beta * p_arr**2
    alpha = jacobi_index(params) - 0.5
    x = sb * p_arr / np.sqrt(one)
    q = np.arctan(sb * p_arr) / sb
    out = (np.exp(1j * params.coupling(E) * q) * one ** (-envelope_exponent(params))
           * jacobi_eval(n, alpha, alpha, x))
    return out if out.ndim else complex(out)
