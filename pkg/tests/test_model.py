import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from minlength_kg.errors import (Rejection, RejectDeformation, RejectDegeneracy, RejectDomain,
                                 RejectUnits)
from minlength_kg.model import (P1, kinematics, minimal_length, parse_param_file,
                                uncertainty_bound, validate)

BASE = dict(m=1, c=1, hbar=1, lam=2, mu=1, beta=0.1, gamma=0)


def test_valid_bundle():
    p = validate(BASE)
    assert p == P1
    assert p.delta == 3.0


def test_file_keys_accepted():
    p = validate({"mass": 1, "c": 1, "hbar": 1, "lambda": 2, "mu": 1, "beta": 0.1})
    assert p == P1


@pytest.mark.parametrize("changes, exc", [
    (dict(lam=1, mu=1), RejectDegeneracy),
    (dict(lam=1, mu=-2), RejectDegeneracy),
    (dict(lam=-2, mu=1), RejectDegeneracy),
    (dict(beta=0), RejectDeformation),
    (dict(beta=-0.1), RejectDeformation),
    (dict(hbar=0), RejectUnits),
    (dict(c=-1), RejectUnits),
    (dict(m=-0.5), RejectUnits),
    (dict(beta=math.nan), RejectUnits),
    (dict(mu=math.inf), RejectUnits),
])
def test_rejections(changes, exc):
    with pytest.raises(exc):
        validate({**BASE, **changes})


def test_massless_allowed():
    assert validate({**BASE, "m": 0}).rest_energy == 0.0


def test_missing_key():
    with pytest.raises(RejectUnits):
        validate(m=1, c=1, hbar=1, lam=2, mu=1)


finite = st.floats(min_value=-5, max_value=5, allow_nan=False)


@given(m=finite, c=finite, hbar=finite, lam=finite, mu=finite, beta=finite, gamma=finite)
def test_validate_is_total(m, c, hbar, lam, mu, beta, gamma):
    try:
        p = validate(m=m, c=c, hbar=hbar, lam=lam, mu=mu, beta=beta, gamma=gamma)
    except Rejection as exc:
        assert type(exc) in (RejectUnits, RejectDeformation, RejectDegeneracy)
    else:
        assert p.lam > abs(p.mu) and p.beta > 0 and p.hbar > 0 and p.c > 0 and p.m >= 0


@pytest.mark.parametrize("hbar, beta, expected", [
    (1.0, 1.0, 1.0), (1.0, 0.1, 0.31622776601683794), (2.0, 0.25, 1.0)])
def test_minimal_length(hbar, beta, expected):
    p = validate({**BASE, "hbar": hbar, "beta": beta})
    assert minimal_length(p) == pytest.approx(expected, rel=1e-15)


@given(hbar=st.floats(0.1, 10), beta=st.floats(1e-4, 10))
def test_minimal_length_identity(hbar, beta):
    p = validate({**BASE, "hbar": hbar, "beta": beta})
    assert minimal_length(p) ** 2 / beta == pytest.approx(hbar**2, rel=1e-14)


def test_uncertainty_bound_values():
    assert uncertainty_bound(P1, math.sqrt(10)) == pytest.approx(1.0, rel=1e-15)
    # undeformed limit; beta = 0 itself is not a valid bundle
    assert uncertainty_bound(P1.replace(beta=1e-300), 1.0) == 0.5
    with pytest.raises(RejectDomain):
        uncertainty_bound(P1, 0.0)


def test_uncertainty_floor_minimum():
    # brute-force minimization over a fine log grid
    dp = np.logspace(-3, 3, 200001)
    ratio = uncertainty_bound(P1, dp) / dp
    i = np.argmin(ratio)
    assert dp[i] == pytest.approx(1 / math.sqrt(P1.beta), rel=1e-4)
    assert ratio[i] == pytest.approx(minimal_length(P1), rel=1e-9)
    assert np.all(ratio >= minimal_length(P1) * (1 - 1e-15))
    k = kinematics(P1)
    assert k.uncertainty_floor(1 / math.sqrt(P1.beta)) * math.sqrt(P1.beta) == \
        pytest.approx(k.min_length, rel=1e-15)


def test_parse_param_file():
    text = "# reference set\nmass = 1\nc=1\nhbar=1.0e0\nlambda=2  # slope\nmu=1\nbeta=1e-1\n\n"
    assert validate(parse_param_file(text)) == P1
    with pytest.raises(RejectUnits):
        parse_param_file("lambda 2\n")
    with pytest.raises(RejectUnits):
        parse_param_file("nu=2\n")
    with pytest.raises(RejectUnits):
        parse_param_file("beta=abc\n")
