import numpy as np
import pytest

from minlength_kg.errors import RejectGrid
from minlength_kg.sampling import SampledFunction, derivative, fd_weights


def test_fornberg_known_weights():
    np.testing.assert_allclose(fd_weights(2, (-2, -1, 0, 1, 2)),
                               [-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12], rtol=1e-14)
    np.testing.assert_allclose(fd_weights(1, (-2, -1, 0, 1, 2)),
                               [1 / 12, -2 / 3, 0, 2 / 3, -1 / 12], atol=1e-15)
    np.testing.assert_allclose(fd_weights(1, (0, 1, 2, 3, 4)),
                               [-25 / 12, 4, -3, 4 / 3, -1 / 4], rtol=1e-14)


@pytest.mark.parametrize("order", [1, 2])
def test_derivative_exact_on_quartics(order):
    x = np.linspace(-1, 2, 31)
    f = 1 + x - 2 * x**2 + 0.5 * x**3 - x**4
    exact = [None, 1 - 4 * x + 1.5 * x**2 - 4 * x**3, -4 + 3 * x - 12 * x**2][order]
    np.testing.assert_allclose(derivative(f, x[1] - x[0], order), exact, atol=1e-10)


@pytest.mark.parametrize("order", [1, 2])
def test_derivative_fourth_order(order):
    errs = []
    for n in (41, 81, 161):
        x = np.linspace(0, 2, n)
        d = derivative(np.sin(3 * x), x[1] - x[0], order)
        exact = 3 * np.cos(3 * x) if order == 1 else -9 * np.sin(3 * x)
        errs.append(np.max(np.abs(d - exact)))
    rates = np.log2(np.array(errs[:-1]) / errs[1:])
    assert np.all(rates > 3.7)


def test_csv_round_trip():
    rng = np.random.default_rng(0)
    x = np.sort(rng.normal(size=12))
    v = rng.normal(size=12) + 1j * rng.normal(size=12)
    f = SampledFunction(x, v)
    text = f.to_csv()
    assert text.splitlines()[0] == "coord,re,im"
    back = SampledFunction.from_csv(text)
    assert np.array_equal(back.coord, x) and np.array_equal(back.values, v)


def test_grid_rejections():
    with pytest.raises(RejectGrid):
        derivative(np.zeros(8), 0.1, 1)
    with pytest.raises(RejectGrid):
        SampledFunction.from_csv("coord,re,im\n" + "\n".join(f"{-i},0,0" for i in range(10)))
