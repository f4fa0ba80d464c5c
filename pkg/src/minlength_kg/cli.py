"""Command-line front end.

    minlength-kg spectrum --n-max 5
    minlength-kg wavefunction --n 2 --space q --samples 201
    minlength-kg ladder --n-max 5
    minlength-kg numeric --k 6
    minlength-kg expand --n-max 2 --beta-list 1e-3,1e-4,1e-5
    minlength-kg verify --suite all

Exit codes: 0 success, 1 a verification check failed, 2 bad input.
Output is assembled in memory and written only after the command succeeds.
"""
from __future__ import annotations

import argparse
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import algebraic, closed_form, deformed_measure, numeric_solver, transform
from .errors import Rejection
from .model import P1, PARAM_KEYS, ModelParams, parse_param_file, validate
from .sampling import SampledFunction, fmt
from .verification import SUITES, Tolerances, run_suite

DEFAULTS = P1.as_dict()


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--params", type=Path, help="key=value parameter file")
    for key in PARAM_KEYS:
        common.add_argument(f"--{key}", type=float, default=None,
                            help=f"override {key} (default {DEFAULTS[key]})")
    common.add_argument("--out", type=Path, help="write output here instead of stdout")

    parser = _Parser(prog="minlength-kg", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("spectrum", parents=[common], help="closed-form levels")
    p.add_argument("--n-max", type=_non_negative, default=5)

    p = sub.add_parser("wavefunction", parents=[common], help="sampled eigenfunction")
    p.add_argument("--n", type=_non_negative, default=0)
    p.add_argument("--space", choices=("p", "q"), default="p")
    p.add_argument("--samples", type=int, default=201)
    p.add_argument("--p-max", type=float, default=10.0)
    p.add_argument("--normalize", action="store_true")

    p = sub.add_parser("ladder", parents=[common], help="shape-invariance ladder")
    p.add_argument("--n-max", type=_non_negative, default=5)

    p = sub.add_parser("numeric", parents=[common], help="finite-difference spectrum")
    p.add_argument("--k", type=int, default=6)
    p.add_argument("--n-points", type=int, default=2047)

    p = sub.add_parser("expand", parents=[common], help="small-beta expansion table")
    p.add_argument("--n-max", type=_non_negative, default=2)
    p.add_argument("--beta-list", default="1e-3,1e-4,1e-5")

    p = sub.add_parser("verify", parents=[common], help="run cross-validation checks")
    p.add_argument("--suite", choices=("all", *SUITES), default="all")
    p.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                   help="override a tolerance; repeatable")
    p.add_argument("--timings", action="store_true",
                   help="include per-check runtimes (output no longer byte-stable)")
    return parser


def load_params(args) -> ModelParams:
    values = dict(DEFAULTS)
    if args.params is not None:
        try:
            text = args.params.read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {args.params}: {exc}") from None
        values.update(parse_param_file(text))
    for key in PARAM_KEYS:
        val = getattr(args, key)
        if val is not None:
            values[key] = val
    return validate(values)


def _csv(header: str, rows) -> str:
    buf = io.StringIO()
    buf.write(header + "\n")
    for row in rows:
        buf.write(",".join(str(v) if isinstance(v, int) else fmt(v) for v in row) + "\n")
    return buf.getvalue()


def cmd_spectrum(params: ModelParams, n_max: int) -> str:
    rows = []
    for entry in closed_form.spectrum(params, n_max):
        e0, c1 = closed_form.kg_energy_expansion(params, entry.n)
        rows.append((entry.n, entry.e_n, entry.E_n, e0, c1 * params.beta))
    return _csv("n,e_n,E_n,E0_term,beta_term", rows)


def cmd_wavefunction(params: ModelParams, n: int, space: str, samples: int,
                     p_max: float = 10.0, normalize: bool = False) -> str:
    if samples < 9:
        raise UsageError("--samples must be at least 9")
    scale = deformed_measure.normalization(params, n) if normalize else 1.0
    if space == "q":
        q = transform.q_grid(params, samples + 2, margin=0.0)[1:-1]
        vals = scale * closed_form.phi(params, n, q)
        return SampledFunction(q, vals, "q").to_csv()
    if not p_max > 0:
        raise UsageError("--p-max must be positive")
    p = np.linspace(-p_max, p_max, samples)
    E = closed_form.kg_energy(params, n)
    return SampledFunction(p, scale * closed_form.psi(params, E, n, p), "p").to_csv()


def cmd_ladder(params: ModelParams, n_max: int) -> str:
    """Row n: slope and remainder of the n-th partner, partial sum S_n, energies."""
    state = algebraic.factorization_constants(params, closed_form.kg_energy(params, 0))
    rows = []
    for n in range(n_max + 1):
        rows.append((n, state.slope(n + 1), state.remainder(n + 1),
                     algebraic.partial_sum(params, n), algebraic.ladder_energy(params, n),
                     closed_form.kg_energy(params, n)))
    return _csv("n,lambda_n,R_n,S_n,E_ladder,E_closed_form", rows)


def cmd_numeric(params: ModelParams, k: int, n_points: int) -> str:
    if k < 1:
        raise UsageError("--k must be at least 1")
    grids = numeric_solver.nested_grids(params, n_points)
    res = numeric_solver.refine(params, k, grids)
    rows = []
    for n, e in enumerate(res.e_values):
        e_cf = closed_form.schrodinger_energy(params, n)
        rows.append((n, e, e_cf, abs(e / e_cf - 1.0), numeric_solver.energy_from_e(params, e),
                     closed_form.kg_energy(params, n), res.order_estimate))
    return _csv("n,e_numeric,e_closed_form,rel_err,E_numeric,E_closed_form,order", rows)


def _parse_betas(text: str) -> list[float]:
    try:
        betas = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"bad --beta-list {text!r}") from None
    if not betas or any(not b > 0 for b in betas):
        raise UsageError("every beta in --beta-list must be > 0")
    return betas


def cmd_expand(params: ModelParams, n_max: int, betas: list[float]) -> str:
    rows = []
    for n in range(n_max + 1):
        for b in betas:
            p = params.replace(beta=b)
            e0, c1 = closed_form.kg_energy_expansion(p, n)
            exact = closed_form.kg_energy(p, n)
            approx = e0 + c1 * b
            rows.append((n, b, exact, approx, abs(exact - approx)))
    return _csv("n,beta,E_exact,E_two_term,abs_error", rows)


def _parse_tols(items: list[str]) -> Tolerances:
    pairs = {}
    for item in items:
        name, sep, val = item.partition("=")
        try:
            pairs[name.strip()] = float(val)
        except ValueError:
            raise UsageError(f"bad --tol {item!r}") from None
        if not sep:
            raise UsageError(f"bad --tol {item!r}")
    try:
        return Tolerances().override(pairs)
    except KeyError as exc:
        raise UsageError(str(exc)) from None


def cmd_verify(params: ModelParams, suite: str, tol: Tolerances | None = None,
               timings: bool = False) -> tuple[str, int]:
    results = run_suite(params, suite, tol)
    passed = all(r.passed for r in results)
    report = {
        "suite": suite,
        "status": "pass" if passed else "fail",
        "params": params.as_dict(),
        "checks": [r.as_dict(timings) for r in results],
    }
    return json.dumps(report, indent=2) + "\n", 0 if passed else 1


def run(argv=None) -> tuple[int, str, str]:
    """Execute a command; returns (exit code, stdout text, stderr text)."""
    try:
        args = build_parser().parse_args(argv)
        params = load_params(args)
        code = 0
        if args.command == "spectrum":
            text = cmd_spectrum(params, args.n_max)
        elif args.command == "wavefunction":
            text = cmd_wavefunction(params, args.n, args.space, args.samples,
                                    args.p_max, args.normalize)
        elif args.command == "ladder":
            text = cmd_ladder(params, args.n_max)
        elif args.command == "numeric":
            text = cmd_numeric(params, args.k, args.n_points)
        elif args.command == "expand":
            text = cmd_expand(params, args.n_max, _parse_betas(args.beta_list))
        else:
            text, code = cmd_verify(params, args.suite, _parse_tols(args.tol), args.timings)
    except (UsageError, Rejection) as exc:
        return 2, "", f"{exc}\n"
    if args.out is not None:
        args.out.write_text(text)
        return code, "", ""
    return code, text, ""


def main(argv=None) -> int:
    try:
        code, out, err = run(argv)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
