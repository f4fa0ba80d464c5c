"""Physical parameters and deformed-algebra kinematics.

The deformed commutator ``[x, p] = i hbar (1 + beta p**2)`` is realised in
momentum space as ``x = i hbar [(1 + beta p**2) d/dp + gamma p]``.  The
Klein-Gordon particle couples to a vector potential ``mu x`` and a scalar
potential ``lambda x``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .errors import RejectDeformation, RejectDegeneracy, RejectDomain, RejectUnits

PARAM_KEYS = ("mass", "c", "hbar", "lambda", "mu", "beta", "gamma")


@dataclass(frozen=True)
class ModelParams:
    """Validated constants.  Build through :func:`validate`."""

    m: float
    c: float
    hbar: float
    lam: float
    mu: float
    beta: float
    gamma: float = 0.0

    @property
    def delta(self) -> float:
        """lambda**2 - mu**2, always positive."""
        return (self.lam - self.mu) * (self.lam + self.mu)

    @property
    def sqrt_beta(self) -> float:
        return math.sqrt(self.beta)

    @property
    def rest_energy(self) -> float:
        return self.m * self.c**2

    def coupling(self, E: float) -> float:
        """(mu E + m c^2 lambda) / (hbar (lambda^2 - mu^2)), the phase rate in q."""
        return (self.mu * E + self.rest_energy * self.lam) / (self.hbar * self.delta)

    def replace(self, **changes) -> "ModelParams":
        fields = dict(m=self.m, c=self.c, hbar=self.hbar, lam=self.lam,
                      mu=self.mu, beta=self.beta, gamma=self.gamma)
        fields.update(changes)
        return validate(fields)

    def as_dict(self) -> dict[str, float]:
        return {"mass": self.m, "c": self.c, "hbar": self.hbar, "lambda": self.lam,
                "mu": self.mu, "beta": self.beta, "gamma": self.gamma}


_ALIASES = {"mass": "m", "m": "m", "c": "c", "hbar": "hbar", "lambda": "lam",
            "lam": "lam", "mu": "mu", "beta": "beta", "gamma": "gamma"}


def validate(raw: Mapping[str, float] | None = None, **kwargs) -> ModelParams:
    """Check a parameter bundle and return :class:`ModelParams`.

    Accepts either the file keys (``mass``, ``lambda``) or the attribute
    names (``m``, ``lam``).  ``gamma`` defaults to 0; everything else is
    required.

    Raises
    ------
    RejectUnits
        Missing or non-finite value, ``hbar <= 0``, ``c <= 0`` or ``m < 0``.
    RejectDeformation
        ``beta <= 0``.
    RejectDegeneracy
        ``lambda**2 <= mu**2`` or ``lambda <= 0``.
    """
    merged = dict(raw or {})
    merged.update(kwargs)
    values: dict[str, float] = {"gamma": 0.0}
    for key, val in merged.items():
        try:
            name = _ALIASES[key]
        except KeyError:
            raise RejectUnits(f"unknown parameter {key!r}") from None
        try:
            values[name] = float(val)
        except (TypeError, ValueError):
            raise RejectUnits(f"parameter {key!r} is not a number: {val!r}") from None
    missing = {"m", "c", "hbar", "lam", "mu", "beta"} - values.keys()
    if missing:
        raise RejectUnits(f"missing parameters: {sorted(missing)}")
    for name, val in values.items():
        if not math.isfinite(val):
            raise RejectUnits(f"parameter {name} is not finite")

    if values["hbar"] <= 0 or values["c"] <= 0 or values["m"] < 0:
        raise RejectUnits("require hbar > 0, c > 0, m >= 0")
    if values["beta"] <= 0:
        raise RejectDeformation("require beta > 0")
    lam, mu = values["lam"], values["mu"]
    if lam * lam <= mu * mu:
        raise RejectDegeneracy("require lambda**2 > mu**2")
    if lam <= 0:
        raise RejectDegeneracy("require lambda > 0 (single-valued energy branch)")
    return ModelParams(**values)


@dataclass(frozen=True)
class Kinematics:
    min_length: float
    uncertainty_floor: Callable[[float], float]


def minimal_length(params: ModelParams) -> float:
    return params.hbar * math.sqrt(params.beta)


def uncertainty_bound(params: ModelParams, dp):
    """Right side of the generalized uncertainty relation, hbar/2 (1 + beta dp^2)."""
    dp_arr = np.asarray(dp, dtype=float)
    if np.any(dp_arr <= 0):
        raise RejectDomain("momentum uncertainty must be positive")
    out = 0.5 * params.hbar * (1.0 + params.beta * dp_arr**2)
    return float(out) if out.ndim == 0 else out


def kinematics(params: ModelParams) -> Kinematics:
    return Kinematics(minimal_length(params),
                      lambda dp: uncertainty_bound(params, dp))


def parse_param_file(text: str) -> dict[str, float]:
    """Parse ``key=value`` lines; ``#`` starts a comment."""
    out: dict[str, float] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key = key.strip()
        if not sep or key not in PARAM_KEYS:
            raise RejectUnits(f"line {lineno}: expected one of {PARAM_KEYS} as key=value")
        try:
            out[key] = float(val.strip())
        except ValueError:
            raise RejectUnits(f"line {lineno}: bad number {val.strip()!r}") from None
    return out


# Reference parameter set used throughout the tests and the CLI defaults.
P1 = ModelParams(m=1.0, c=1.0, hbar=1.0, lam=2.0, mu=1.0, beta=0.1, gamma=0.0)
