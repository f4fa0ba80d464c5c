import math

import numpy as np
import pytest
from scipy.integrate import quad

from minlength_kg import closed_form as cf
from minlength_kg import transform as tr
from minlength_kg.errors import RejectGrid
from minlength_kg.model import P1
from minlength_kg.sampling import SampledFunction

E0 = cf.kg_energy(P1, 0)


def test_coefficients_at_origin():
    for prm in (P1, P1.replace(gamma=0.3, mu=-0.5)):
        co = tr.build_coefficients(prm, 1.3)
        assert co.f(0.0) == 1.0
        K = (prm.mu * 1.3 + prm.m * prm.c**2 * prm.lam) / (prm.hbar * prm.delta)
        g0 = co.g(0.0)
        assert g0.real == 0.0 and g0.imag == pytest.approx(2 * K, rel=1e-15)


def test_h_pointwise():
    # gamma = 0: h(p) = p^2 c^2 / (hbar^2 delta)
    assert tr.build_coefficients(P1, E0).h(1.0) == pytest.approx(1 / 3, rel=1e-15)
    prm = P1.replace(gamma=0.25)
    K = (E0 + 2) / 3
    expect = -(0.25 * 0.35 - 1 / 3) + 2j * 0.25 * K
    assert complex(tr.build_coefficients(prm, E0).h(1.0)) == pytest.approx(expect, rel=1e-14)


def test_coefficient_symmetries():
    p = np.linspace(0.1, 5, 20)
    co = tr.build_coefficients(P1.replace(gamma=0.2), 0.7)
    assert np.all(co.f(p) >= 1)
    np.testing.assert_allclose(co.g(-p).real, -co.g(p).real)
    np.testing.assert_allclose(co.g(-p).imag, co.g(p).imag)
    np.testing.assert_allclose(co.h(-p).real, co.h(p).real)
    np.testing.assert_allclose(co.h(-p).imag, -co.h(p).imag)
    assert isinstance(co.eps, float)


def test_q_map_values():
    assert tr.q_map(P1, 0.0) == 0.0
    assert tr.q_map(P1.replace(beta=1.0), 1.0) == pytest.approx(math.pi / 4, rel=1e-15)
    half = cf.potential_strength(P1).box_half_width
    assert tr.q_map(P1, 1e8) == pytest.approx(half - 1 / (0.1 * 1e8), rel=1e-14)
    assert tr.q_map(P1, 1e300) == pytest.approx(half, rel=1e-15)


def test_q_map_round_trip_and_monotone():
    # the round trip is conditioned like beta p near the wall
    p = np.logspace(-8, 2, 500)
    np.testing.assert_allclose(tr.p_of_q(P1, tr.q_map(P1, p)), p, rtol=1e-13)
    q = tr.q_map(P1, np.concatenate([-p[::-1], p]))
    assert np.all(np.diff(q) > 0)
    np.testing.assert_array_equal(tr.q_map(P1, -p), -tr.q_map(P1, p))


def test_chi_matches_definition():
    p = np.linspace(-4, 4, 33)
    prm = P1.replace(gamma=0.3)
    co = tr.build_coefficients(prm, 0.9)
    fprime = 4 * prm.beta * p * (1 + prm.beta * p**2)
    np.testing.assert_allclose(tr.chi(prm, 0.9, p), (fprime + 2 * co.g(p)) / (4 * co.f(p)),
                               rtol=1e-13, atol=1e-15)


def test_gauge_factor():
    assert tr.gauge_factor(P1, E0, 0.0) == 1.0
    p = np.linspace(-5, 5, 11)
    prm = P1.replace(gamma=0.4)
    np.testing.assert_allclose(abs(tr.gauge_factor(prm, 0.1, p)), abs(tr.gauge_factor(prm, 3.0, p)),
                               rtol=1e-15)
    for prm in (P1, P1.replace(gamma=0.4)):
        re = quad(lambda t: tr.chi(prm, E0, t).real, 0, 1, epsabs=1e-14)[0]
        im = quad(lambda t: tr.chi(prm, E0, t).imag, 0, 1, epsabs=1e-14)[0]
        assert tr.gauge_factor(prm, E0, 1.0) == pytest.approx(np.exp(re + 1j * im), rel=1e-12)


def _residuals(prm, n, sizes):
    return np.array([tr.eigen_residual(prm, n, size) for size in sizes])


def test_zero_function():
    q = tr.q_grid(P1, 41)
    s = SampledFunction(tr.p_of_q(P1, q), np.zeros(41))
    assert not np.any(tr.apply_raw_operator(P1, E0, s).values)


def test_grid_rejections():
    with pytest.raises(RejectGrid):
        tr.apply_raw_operator(P1, E0, SampledFunction(np.linspace(0, 1, 8), np.ones(8)))
    with pytest.raises(RejectGrid):
        tr.apply_raw_operator(P1, E0, SampledFunction(np.linspace(0, 1, 20) ** 3, np.ones(20)))


@pytest.mark.parametrize("n", [0, 1])
def test_eigen_residual_converges_h4(n):
    res = _residuals(P1, n, (401, 801, 1601))
    rates = np.log2(res[:-1] / res[1:])
    assert np.all(rates > 3.8)


@pytest.mark.parametrize("gamma", [0.25, 0.5])
def test_eigen_residual_with_gamma(gamma):
    res = _residuals(P1.replace(gamma=gamma), 2, (401, 801, 1601))
    assert np.all(np.log2(res[:-1] / res[1:]) > 3.8)
    assert res[-1] < 5e-7


def test_printed_envelope_is_not_an_eigenfunction():
    # (1 + beta p^2)^(-A/sqrt(beta)) instead of ^(-A/(2 sqrt(beta))) leaves an O(1) residual
    E = E0
    eps = cf.ode_eigenvalue(P1, E)
    k = cf.jacobi_index(P1)
    s = tr.sample(P1, lambda p: tr.gauge_factor(P1, E, p) * (1 + 0.1 * p**2) ** (-k),
                  tr.q_grid(P1, 1601))
    r = tr.apply_raw_operator(P1, E, s)
    rel = tr.deformed_norm(P1, r.with_values(r.values - eps * s.values)) / tr.deformed_norm(P1, s)
    assert rel > 0.1


def test_uniform_p_grid_route():
    p = np.linspace(-25, 25, 4001)
    E = cf.kg_energy(P1, 1)
    s = SampledFunction(p, cf.psi(P1, E, 1, p))
    r = tr.apply_raw_operator(P1, E, s).values - cf.ode_eigenvalue(P1, E) * s.values
    inner = np.abs(p) < 10
    assert np.max(np.abs(r[inner])) < 1e-6 * np.max(np.abs(s.values))


def test_eps_consistency_chain():
    # eps_n - gamma + K^2 + v0 = e_n
    for prm in (P1, P1.replace(gamma=0.5, mu=-0.7, m=0.3)):
        v0 = cf.potential_strength(prm).v0
        for n in range(6):
            E = cf.kg_energy(prm, n)
            K = prm.coupling(E)
            assert cf.ode_eigenvalue(prm, E) - prm.gamma + K * K + v0 == pytest.approx(
                cf.schrodinger_energy(prm, n), rel=1e-12)


@pytest.mark.parametrize("gamma", [0.0, 0.35])
def test_schrodinger_reduction(gamma):
    prm = P1.replace(gamma=gamma)

    def u(q):
        return (1 + 0.3 * q) * np.exp(-q**2)

    errs = []
    for n in (501, 1001, 2001):
        q, lhs, rhs = tr.schrodinger_reduction(prm, 1.1, u, n=n)
        errs.append(np.max(np.abs(lhs - rhs)))
    assert errs[-1] < 1e-9
    assert math.log2(errs[0] / errs[1]) > 3.5
