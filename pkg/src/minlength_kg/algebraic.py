"""Factorization and shape-invariance ladder.

The momentum-space operator plus a constant factorizes as ``H + c1 = C B``
with first-order operators

    B = F d/dp + W + Omega,    C = -F d/dp + W - Omega,
    F = 1 + beta p^2,  W = c2 p,  Omega = gamma p - i K.

Matching coefficients leaves a Riccati equation for the superpotential,

    -F W' + W^2 = c^2 p^2 / (hbar^2 (lambda^2 - mu^2)) + gamma - K^2 + c1,

solved by the linear ansatz with ``c2^2 - beta c2 = c^2/(hbar^2 (lambda^2 - mu^2))``
and ``c1 = K^2 - c2 - gamma``.  Shifting the slope by beta gives the partner,
``B(l) C(l) = C(l + beta) B(l + beta) + 2 l + beta``, so the ladder sums
``S_n = sum_{i=1}^{n} R(l_i) = 2 n c2 + beta n^2`` reproduce the spectrum
through ``eps_n + c1 = S_n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .closed_form import _check_level, energy_from_gap, ladder_slope
from .model import ModelParams
from .sampling import SampledFunction
from .transform import deformed_norm, p_derivatives


@dataclass(frozen=True)
class LadderState:
    c1: float
    c2: float
    beta: float
    omega_coeffs: tuple[float, complex]

    def slope(self, i: int) -> float:
        """lambda_i = c2 + (i - 1) beta, for i >= 1."""
        return self.c2 + (i - 1) * self.beta

    def remainder(self, i: int) -> float:
        """R(lambda_i) = 2 lambda_i + beta."""
        return 2.0 * self.slope(i) + self.beta

    def steps(self, n: int) -> list[tuple[float, float]]:
        """(lambda_i, R(lambda_i)) for i = 1..n."""
        return [(self.slope(i), self.remainder(i)) for i in range(1, n + 1)]


def factorization_constants(params: ModelParams, E: float) -> LadderState:
    K = params.coupling(E)
    c2 = ladder_slope(params)
    c1 = K * K - c2 - params.gamma
    return LadderState(c1=c1, c2=c2, beta=params.beta,
                       omega_coeffs=(params.gamma, -1j * K))


def partial_sum(params: ModelParams, n: int) -> float:
    """S_n = 2 n c2 + beta n^2."""
    n = _check_level(n)
    return 2 * n * ladder_slope(params) + params.beta * n * n


def ladder_energy(params: ModelParams, n: int) -> float:
    """E_n from ``eps_n + c1 = S_n``.

    Substituting eps and c1, the E-dependent pieces combine into
    ``(lambda E + mu m c^2)^2 / (hbar (lambda^2 - mu^2))^2 = S_n + c2``.
    """
    n = _check_level(n)
    # c2 and the remainders do not depend on E; any trial energy will do
    state = factorization_constants(params, 0.0)
    total = sum(r for _, r in state.steps(n))
    return energy_from_gap(params, total + state.c2)


def riccati_residual(params: ModelParams, E: float, p, state: LadderState | None = None):
    """Left minus right side of the Riccati equation for ``W = c2 p``."""
    if state is None:
        state = factorization_constants(params, E)
    p = np.asarray(p, dtype=float)
    K = params.coupling(E)
    kappa = params.c**2 / (params.hbar**2 * params.delta)
    F = 1.0 + params.beta * p**2
    W = state.c2 * p
    lhs = -F * state.c2 + W * W
    rhs = kappa * p * p + params.gamma - K * K + state.c1
    return lhs - rhs


def riccati_coefficients(params: ModelParams, E: float,
                         state: LadderState | None = None) -> tuple[float, float, float]:
    """Coefficients of p^0, p^1, p^2 in the Riccati residual."""
    if state is None:
        state = factorization_constants(params, E)
    K = params.coupling(E)
    kappa = params.c**2 / (params.hbar**2 * params.delta)
    c0 = -state.c2 - (params.gamma - K * K + state.c1)
    c2 = -params.beta * state.c2 + state.c2**2 - kappa
    return c0, 0.0, c2


def apply_ladder_op(params: ModelParams, E: float, which: str, psi: SampledFunction,
                    slope: float | None = None) -> SampledFunction:
    """Apply B or C (with superpotential slope ``slope``, default c2)."""
    if which not in ("B", "C"):
        raise ValueError("which must be 'B' or 'C'")
    if slope is None:
        slope = ladder_slope(params)
    p = psi.coord
    d1, _ = p_derivatives(params, psi)
    F = 1.0 + params.beta * p**2
    W = slope * p
    omega = params.gamma * p - 1j * params.coupling(E)
    if which == "B":
        out = F * d1 + (W + omega) * psi.values
    else:
        out = -F * d1 + (W - omega) * psi.values
    return psi.with_values(out)


def shape_invariance_check(params: ModelParams, E: float, i: int,
                           tests: list[SampledFunction]) -> float:
    """Max over ``tests`` of the normalized deviation in
    ``B(l_i) C(l_i) - C(l_{i+1}) B(l_{i+1}) - R(l_i)``.

    Deviations are measured in the sup norm on the interior, away from the
    two stencil-width boundary layers, relative to ``sup |R psi|``.
    """
    if i < 1:
        raise ValueError("step index starts at 1")
    state = factorization_constants(params, E)
    l1, l2, r = state.slope(i), state.slope(i + 1), state.remainder(i)
    worst = 0.0
    for psi in tests:
        bc = apply_ladder_op(params, E, "B", apply_ladder_op(params, E, "C", psi, l1), l1)
        cb = apply_ladder_op(params, E, "C", apply_ladder_op(params, E, "B", psi, l2), l2)
        dev = bc.values - cb.values - r * psi.values
        inner = slice(4, -4)
        scale = np.max(np.abs(r * psi.values[inner]))
        worst = max(worst, float(np.max(np.abs(dev[inner])) / scale))
    return worst


def gaussian_tests(p: np.ndarray, seed: int = 0, count: int = 4) -> list[SampledFunction]:
    """Smooth complex Gaussian-envelope test functions on the grid ``p``."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        center = rng.uniform(-1.0, 1.0)
        width = rng.uniform(0.7, 1.5)
        a, b, c = rng.normal(size=3) + 1j * rng.normal(size=3)
        x = p - center
        vals = (a + b * x + c * x * x) * np.exp(-0.5 * (x / width) ** 2)
        out.append(SampledFunction(p, vals, "p"))
    return out


def annihilation_ratio(params: ModelParams, psi0: SampledFunction, E0: float) -> float:
    """||B psi0|| / ||psi0|| in the deformed norm."""
    b = apply_ladder_op(params, E0, "B", psi0)
    return deformed_norm(params, b) / deformed_norm(params, psi0)


def observed_order(errors, factor: float = 2.0) -> float:
    """log_factor(e_k / e_{k+1}) for the last pair of a refinement ladder."""
    e = list(errors)
    return math.log(e[-2] / e[-1]) / math.log(factor)
