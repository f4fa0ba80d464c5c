"""Cross-validation checks shared by ``verify`` and the acceptance tests.

Every tolerance lives in :class:`Tolerances`; the CLI can override any field
by name.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, fields

import numpy as np

from . import algebraic, closed_form, deformed_measure, numeric_solver, transform
from .model import ModelParams, validate


@dataclass(frozen=True)
class Tolerances:
    identity_rel: float = 1e-14        # A(A - sqrt(beta)) = v0, c2 = sqrt(beta) A
    route_rel: float = 1e-12           # direct formula vs inverted energy map
    ladder_rel: float = 1e-12          # ladder sums vs closed form
    numeric_rel: float = 1e-7          # extrapolated finite differences vs closed form
    numeric_order: float = 2.0
    numeric_order_band: float = 0.05
    gamma_abs: float = 1e-12           # spectrum unchanged under gamma
    residual_rel: float = 1e-8         # raw-operator eigen residual
    fd_min_order: float = 3.8          # observed order of 4th-order stencils
    riccati_abs: float = 1e-12
    shape_invariance: float = 1e-8
    gram_off: float = 1e-8
    gram_stability: float = 1e-10
    hermitian_max: float = 1e-10
    hermitian_negative_min: float = 1e-2
    slope: float = 2.0
    slope_band: float = 0.05
    coefficient_rel: float = 5e-3

    def override(self, pairs: dict[str, float]) -> "Tolerances":
        names = {f.name for f in fields(self)}
        bad = set(pairs) - names
        if bad:
            raise KeyError(f"unknown tolerance(s): {sorted(bad)}")
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data.update(pairs)
        return Tolerances(**data)


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: float
    tolerance: float | str
    detail: dict = field(default_factory=dict)
    runtime: float = 0.0

    def as_dict(self, timings: bool = False) -> dict:
        out = {"name": self.name, "status": "pass" if self.passed else "fail",
               "measured": _json_float(self.measured), "tolerance": self.tolerance}
        if self.detail:
            out["detail"] = self.detail
        if timings:
            out["runtime_s"] = round(self.runtime, 3)
        return out


def _json_float(x):
    x = float(x)
    return x if math.isfinite(x) else str(x)


def random_params(rng: np.random.Generator, gamma: bool = True) -> ModelParams:
    """A random valid bundle; slopes, units and beta of order one."""
    lam = rng.uniform(0.5, 3.0)
    return validate(
        m=rng.uniform(0.0, 2.0),
        c=rng.uniform(0.5, 2.0),
        hbar=rng.uniform(0.5, 2.0),
        lam=lam,
        mu=lam * rng.uniform(-0.9, 0.9),
        beta=10 ** rng.uniform(-2.0, 0.0),
        gamma=rng.uniform(0.0, 0.5) if gamma else 0.0,
    )


def _rel(a, b):
    return abs(a - b) / abs(b)


# --- closed form -----------------------------------------------------------

def check_quadratic_identity(tol: Tolerances, count: int = 1000, seed: int = 1) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        p = random_params(rng)
        form = closed_form.potential_strength(p)
        a = form.a_coeff
        worst = max(worst, _rel(a * (a - p.sqrt_beta), form.v0),
                    _rel(closed_form.ladder_slope(p), p.sqrt_beta * a))
    return CheckResult("quadratic_identity", worst <= tol.identity_rel, worst, tol.identity_rel,
                       {"bundles": count})


def check_route_equivalence(params: ModelParams, tol: Tolerances, n_max: int = 10,
                            count: int = 50, seed: int = 2) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for p in [params] + [random_params(rng) for _ in range(count)]:
        for n in range(n_max + 1):
            worst = max(worst, _rel(closed_form.kg_energy_from_map(p, n),
                                    closed_form.kg_energy(p, n)))
    return CheckResult("route_equivalence", worst <= tol.route_rel, worst, tol.route_rel)


def check_monotonicity(params: ModelParams, tol: Tolerances, n_max: int = 50,
                       count: int = 20, seed: int = 3) -> CheckResult:
    rng = np.random.default_rng(seed)
    min_gap = math.inf
    for p in [params] + [random_params(rng) for _ in range(count)]:
        E = [closed_form.kg_energy(p, n) for n in range(n_max + 1)]
        e = [closed_form.schrodinger_energy(p, n) for n in range(n_max + 1)]
        min_gap = min(min_gap, float(np.min(np.diff(E))), float(np.min(np.diff(e))))
    return CheckResult("monotonicity", min_gap > 0, min_gap, "> 0")


def check_gamma_invariance(params: ModelParams, tol: Tolerances, n_max: int = 10) -> CheckResult:
    worst = 0.0
    base = [closed_form.kg_energy(params.replace(gamma=0.0), n) for n in range(n_max + 1)]
    for g in (0.25, 0.5):
        other = [closed_form.kg_energy(params.replace(gamma=g), n) for n in range(n_max + 1)]
        worst = max(worst, float(np.max(np.abs(np.subtract(other, base)))))
    return CheckResult("gamma_invariance", worst <= tol.gamma_abs, worst, tol.gamma_abs)


def eigen_residuals(params: ModelParams, n: int, sizes=(401, 801, 1601, 6401)):
    """Relative raw-operator residuals of psi_n on uniform-in-q grids."""
    return [transform.eigen_residual(params, n, size) for size in sizes]


def check_eigen_residual(params: ModelParams, tol: Tolerances, n_max: int = 5) -> CheckResult:
    """Order from the three coarse grids, residual on the finest."""
    worst, min_order = 0.0, math.inf
    for n in range(n_max + 1):
        res = eigen_residuals(params, n)
        min_order = min(min_order, math.log2(res[1] / res[2]))
        worst = max(worst, res[-1])
    ok = worst <= tol.residual_rel and min_order >= tol.fd_min_order
    return CheckResult("eigen_residual", ok, worst, tol.residual_rel,
                       {"min_observed_order": min_order})


# --- numeric ------------------------------------------------------------

def numeric_spectrum(params: ModelParams, k: int = 6, n_points: int = 2047):
    grids = numeric_solver.nested_grids(params, n_points)
    return numeric_solver.refine(params, k, grids)


def check_numeric(params: ModelParams, tol: Tolerances, k: int = 6) -> list[CheckResult]:
    res = numeric_spectrum(params, k)
    exact = np.array([closed_form.schrodinger_energy(params, n) for n in range(k)])
    e_rel = float(np.max(np.abs(res.e_values / exact - 1.0)))
    E_num = [numeric_solver.energy_from_e(params, e) for e in res.e_values]
    E_cf = [closed_form.kg_energy(params, n) for n in range(k)]
    E_rel = max(_rel(a, b) for a, b in zip(E_num, E_cf))
    worst = max(e_rel, E_rel)
    grid = res.grid
    below = int(numeric_solver.sturm_count(
        numeric_solver.discretize(params, grid),
        np.array([closed_form.potential_strength(params).v0]))[0])
    order_ok = abs(res.order_estimate - tol.numeric_order) <= tol.numeric_order_band
    return [
        CheckResult("numeric_vs_closed_form", worst <= tol.numeric_rel, worst, tol.numeric_rel,
                    {"levels": k}),
        CheckResult("numeric_order", order_ok, res.order_estimate,
                    f"{tol.numeric_order} +/- {tol.numeric_order_band}"),
        CheckResult("numeric_floor", below == 0, below, "0 states below v0"),
    ]


# --- ladder ---------------------------------------------------------------

def check_ladder(params: ModelParams, tol: Tolerances, n_max: int = 10,
                 count: int = 100, seed: int = 4) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for p in [params] + [random_params(rng) for _ in range(count)]:
        for n in range(n_max + 1):
            worst = max(worst, _rel(algebraic.ladder_energy(p, n), closed_form.kg_energy(p, n)))
    return CheckResult("ladder_vs_closed_form", worst <= tol.ladder_rel, worst, tol.ladder_rel)


def check_riccati(params: ModelParams, tol: Tolerances) -> CheckResult:
    p = np.linspace(-10.0, 10.0, 2001)
    worst = 0.0
    for n in range(6):
        E = closed_form.kg_energy(params, n)
        worst = max(worst, float(np.max(np.abs(algebraic.riccati_residual(params, E, p)))))
    return CheckResult("riccati_residual", worst <= tol.riccati_abs, worst, tol.riccati_abs)


def annihilation_ladder(params: ModelParams, sizes=(201, 401, 801, 1601)):
    E0 = closed_form.kg_energy(params, 0)
    out = []
    for size in sizes:
        s = transform.sample(params, lambda p: closed_form.psi(params, E0, 0, p),
                             transform.q_grid(params, size))
        out.append(algebraic.annihilation_ratio(params, s, E0))
    return out


def check_annihilation(params: ModelParams, tol: Tolerances) -> CheckResult:
    ratios = annihilation_ladder(params)
    order = algebraic.observed_order(ratios)
    ok = order >= tol.fd_min_order and ratios[-1] < ratios[0]
    return CheckResult("ground_annihilation", ok, order, f">= {tol.fd_min_order}",
                       {"finest_ratio": ratios[-1]})


def check_shape_invariance(params: ModelParams, tol: Tolerances, steps: int = 3) -> CheckResult:
    p = np.linspace(-12.0, 12.0, 6401)
    tests = algebraic.gaussian_tests(p, seed=5, count=6)
    worst = 0.0
    for n in range(3):
        E = closed_form.kg_energy(params, n)
        for i in range(1, steps + 1):
            worst = max(worst, algebraic.shape_invariance_check(params, E, i, tests))
    return CheckResult("shape_invariance", worst <= tol.shape_invariance, worst,
                       tol.shape_invariance)


# --- measure --------------------------------------------------------------

def check_gram(params: ModelParams, tol: Tolerances, n_max: int = 7, count: int = 3,
               seed: int = 6) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    worst, drift = 0.0, 0.0
    for p in [params] + [random_params(rng) for _ in range(count)]:
        g1 = deformed_measure.gram(p, n_max)
        g2 = deformed_measure.gram(p, n_max, 2 * deformed_measure.DEFAULT_ORDER)
        worst = max(worst, g1.max_off_diagonal())
        drift = max(drift, float(np.max(np.abs(g1.entries - g2.entries))))
    return [
        CheckResult("gram_orthogonality", worst <= tol.gram_off, worst, tol.gram_off),
        CheckResult("gram_order_stability", drift <= tol.gram_stability, drift,
                    tol.gram_stability),
    ]


def check_kg_orthogonality(params: ModelParams, tol: Tolerances, n_max: int = 7) -> CheckResult:
    worst = deformed_measure.kg_gram(params, n_max).max_off_diagonal()
    return CheckResult("kg_orthogonality", worst <= tol.gram_off, worst, tol.gram_off)


def check_gram_gamma(params: ModelParams, tol: Tolerances, n_max: int = 7) -> CheckResult:
    base = deformed_measure.gram(params.replace(gamma=0.0), n_max).entries
    worst = 0.0
    for g in (0.25, 0.5):
        other = deformed_measure.gram(params.replace(gamma=g), n_max).entries
        worst = max(worst, float(np.max(np.abs(other - base))))
    return CheckResult("gram_gamma_invariance", worst <= tol.gram_stability, worst,
                       tol.gram_stability)


def check_hermiticity(params: ModelParams, tol: Tolerances, count: int = 20,
                      seed: int = 7) -> CheckResult:
    pairs = deformed_measure.random_test_pairs(count, seed)
    good = deformed_measure.default_exponent(params)
    worst = max(deformed_measure.hermiticity_defect(params, a, b) for a, b in pairs)
    weakest = min(deformed_measure.hermiticity_defect(params, a, b, exponent=good - 1.0)
                  for a, b in pairs)
    ok = worst < tol.hermitian_max and weakest > tol.hermitian_negative_min
    return CheckResult("hermiticity", ok, worst, tol.hermitian_max,
                       {"perturbed_min": weakest,
                        "perturbed_threshold": tol.hermitian_negative_min})


# --- expansion ------------------------------------------------------------

EXPANSION_BETAS = (1e-5, 1e-4, 1e-3)


def expansion_errors(params: ModelParams, n: int, betas=EXPANSION_BETAS):
    out = []
    for b in betas:
        p = params.replace(beta=b)
        e0, c1 = closed_form.kg_energy_expansion(p, n)
        out.append(abs(closed_form.kg_energy(p, n) - e0 - c1 * b))
    return out


def fitted_first_order(params: ModelParams, n: int, betas=EXPANSION_BETAS) -> float:
    """Intercept of (E(beta) - E0) / beta against beta: the fitted beta^1 coefficient."""
    ys = []
    for b in betas:
        p = params.replace(beta=b)
        ys.append((closed_form.kg_energy(p, n) - closed_form.kg_energy_expansion(p, n)[0]) / b)
    slope, intercept = np.polyfit(betas, ys, 1)
    return float(intercept)


def check_expansion(params: ModelParams, tol: Tolerances) -> list[CheckResult]:
    slopes, coef_err = [], 0.0
    for n in (0, 1, 2):
        errs = expansion_errors(params, n)
        slopes.append(float(np.polyfit(np.log(EXPANSION_BETAS), np.log(errs), 1)[0]))
        c1 = closed_form.kg_energy_expansion(params, n)[1]
        coef_err = max(coef_err, _rel(fitted_first_order(params, n), c1))
    worst_slope = max(slopes, key=lambda s: abs(s - tol.slope))
    return [
        CheckResult("expansion_slope", abs(worst_slope - tol.slope) <= tol.slope_band,
                    worst_slope, f"{tol.slope} +/- {tol.slope_band}", {"slopes": slopes}),
        CheckResult("expansion_coefficient", coef_err <= tol.coefficient_rel, coef_err,
                    tol.coefficient_rel),
    ]


# --- suites -----------------------------------------------------------------

def _closedform(p, t):
    return [check_quadratic_identity(t), check_route_equivalence(p, t), check_monotonicity(p, t),
            check_gamma_invariance(p, t), check_eigen_residual(p, t)]


def _ladder(p, t):
    return [check_ladder(p, t), check_riccati(p, t), check_annihilation(p, t),
            check_shape_invariance(p, t)]


def _measure(p, t):
    return [*check_gram(p, t), check_gram_gamma(p, t), check_kg_orthogonality(p, t),
            check_hermiticity(p, t)]


SUITES = {
    "closedform": _closedform,
    "numeric": check_numeric,
    "ladder": _ladder,
    "measure": _measure,
    "expansion": check_expansion,
}


def run_suite(params: ModelParams, suite: str, tol: Tolerances | None = None) -> list[CheckResult]:
    tol = tol or Tolerances()
    names = list(SUITES) if suite == "all" else [suite]
    results = []
    for name in names:
        start = time.perf_counter()
        batch = SUITES[name](params, tol)
        elapsed = time.perf_counter() - start
        for r in batch:
            r.runtime = elapsed / len(batch)
        results.extend(batch)
    return sorted(results, key=lambda r: r.name)
