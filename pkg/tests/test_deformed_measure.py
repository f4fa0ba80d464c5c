import math

import numpy as np
import pytest

from minlength_kg import closed_form as cf
from minlength_kg import deformed_measure as dm
from minlength_kg.errors import RejectConvergence, RejectLevel
from minlength_kg.model import P1


def test_weight_values():
    assert dm.weight(P1, 3.0) == pytest.approx(1 / 1.9, rel=1e-15)
    assert dm.weight(P1.replace(gamma=0.1), 7.0) == 1.0
    p = np.linspace(-4, 4, 9)
    np.testing.assert_allclose(dm.weight(P1, p), 1 / (1 + 0.1 * p**2), rtol=1e-15)
    assert dm.weight(P1, 2.0, exponent=2.0) == pytest.approx(1.4**2, rel=1e-15)


def test_quadrature_rule():
    half = cf.potential_strength(P1).box_half_width
    rule = dm.quadrature_rule(P1)
    assert rule.order == 256
    assert rule.weights.sum() == pytest.approx(2 * half, rel=1e-14)
    assert np.all(np.abs(rule.nodes) < half)
    # w dp = dq at gamma = 0, so this is int cos^6(sqrt(beta) q) dq
    f = lambda p: (1 + 0.1 * p**2) ** -1.5  # noqa: E731
    val = dm.inner_product(P1, f, f)
    assert val.real == pytest.approx(5 * math.pi / (16 * math.sqrt(0.1)), rel=1e-13)


def test_gaussian_integral():
    # w = 1 when gamma = beta
    prm = P1.replace(gamma=0.1)
    val = dm.inner_product(prm, lambda p: np.exp(-p**2 / 2), lambda p: np.exp(-p**2 / 2))
    assert val.real == pytest.approx(math.sqrt(math.pi), rel=1e-12)
    assert val.imag == 0.0


def test_norm_positive_and_order_stable():
    for n in range(5):
        G256 = dm.raw_gram(P1, n + 1)
        G512 = dm.raw_gram(P1, n + 1, 512)
        assert G256[n, n].real > 0
        assert abs(G256[n, n].imag) < 1e-14 * G256[n, n].real
        np.testing.assert_allclose(G256, G512, rtol=1e-12, atol=1e-14 * G256[0, 0].real)


def test_gram_shapes():
    g = dm.gram(P1, 1)
    np.testing.assert_array_equal(g.entries, [[1.0]])
    assert g.max_off_diagonal() == 0.0
    with pytest.raises(RejectLevel):
        dm.gram(P1, 0)
    with pytest.raises(RejectLevel):
        dm.kg_gram(P1, 0)


def test_gram_hermitian():
    G = dm.gram(P1, 5).entries
    np.testing.assert_allclose(G, G.conj().T, atol=1e-15)


@pytest.mark.parametrize("gamma", [0.0, 0.3])
def test_orthogonal_without_vector_coupling(gamma):
    prm = P1.replace(mu=0.0, gamma=gamma)
    assert dm.gram(prm, 7).max_off_diagonal() < 1e-12


def test_plain_gram_not_orthogonal_with_vector_coupling():
    # an energy-dependent operator: only the Klein-Gordon kernel is diagonal
    assert dm.gram(P1, 4).max_off_diagonal() > 0.1


@pytest.mark.parametrize("prm", [P1, P1.replace(gamma=0.4, mu=-1.3, m=0.4)])
def test_kg_kernel_orthogonal(prm):
    assert dm.kg_gram(prm, 7).max_off_diagonal() < 1e-12


def test_gram_gamma_invariant():
    a = dm.gram(P1, 5).entries
    b = dm.gram(P1.replace(gamma=0.35), 5).entries
    np.testing.assert_allclose(a, b, atol=1e-13)


def test_normalization():
    for prm in (P1, P1.replace(gamma=0.2)):
        for n in (0, 3):
            N = dm.normalization(prm, n)
            E = cf.kg_energy(prm, n)
            val = dm.inner_product(prm, lambda p: N * cf.psi(prm, E, n, p),
                                   lambda p: N * cf.psi(prm, E, n, p))
            assert val.real == pytest.approx(1.0, rel=1e-12)


def test_gram_csv():
    text = dm.gram(P1, 2).to_csv()
    lines = text.splitlines()
    assert lines[0] == "m,n,re,im"
    assert len(lines) == 5
    assert lines[1] == "0,0,1,0"


def test_slow_decay_rejected():
    with pytest.raises(RejectConvergence):
        dm.inner_product(P1, lambda p: np.ones_like(p), lambda p: np.ones_like(p))


def test_large_exponent_no_overflow():
    prm = P1.replace(gamma=2.0, beta=0.05)
    with np.errstate(over="raise", invalid="raise"):
        g = dm.gram(prm, 3)
    assert np.all(np.isfinite(g.entries))


def test_hermiticity():
    pairs = dm.random_test_pairs(20, seed=3)
    for prm in (P1, P1.replace(gamma=0.3)):
        good = max(dm.hermiticity_defect(prm, f, g) for f, g in pairs)
        assert good < 1e-10
        # the constant weight and the alternative exponent 1 - 2/beta both fail
        for wrong in (0.0, 1.0 - 2.0 / prm.beta):
            bad = min(dm.hermiticity_defect(prm, f, g, exponent=wrong) for f, g in pairs)
            assert bad > 1e-2


def test_position_operator_on_gaussian():
    f = dm.gaussian_function(0.0, 1.0, (1.0, 0.0, 0.0))
    xf = dm.apply_position(P1, f)
    p = np.linspace(-3, 3, 7)
    expect = 1j * ((1 + 0.1 * p**2) * (-p) * np.exp(-p**2 / 2))
    np.testing.assert_allclose(xf(p), expect, rtol=1e-15, atol=1e-16)
