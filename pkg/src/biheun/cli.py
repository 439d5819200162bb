"""Command-line front end.

Every command writes one report (JSON by default, CSV on request) to
stdout, and to ``--out`` when given. Exit status is 0 when all checks
pass, 1 on a numerical failure or failed check, 2 on bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Sequence

import numpy as np

from . import __version__
from .errors import BiheunError
from .frobenius import BiconfluentParams, evaluate_frobenius, frobenius_coefficients, frobenius_spectrum
from .hermite import HermiteExpansion, evaluate_hermite_series, hermite_coefficients, hermite_spectrum
from .hypergeom import shift_identity_suite
from .numerics import DEFAULT_CONFIG, ToleranceConfig
from .reduction import build_ghg_solution, evaluate_combination
from .validation import cross_validate, reference_representation

N_MAX = 12
COMPLEX_FLAGS = ("--p0", "--p1", "--q0", "--q1", "--s", "--z", "--center", "--q0-shift")
TOL_ENV = "BIHEUN_TOL_VALIDATE"


class InputError(ValueError):
    """Bad command-line input; the message names the offending field."""


def parse_complex(text: str) -> complex:
    """``"re,im"`` or ``"re"`` to a complex number."""
    parts = text.split(",")
    if len(parts) > 2:
        raise ValueError(text)
    re = float(parts[0])
    im = float(parts[1]) if len(parts) == 2 else 0.0
    if not (math.isfinite(re) and math.isfinite(im)):
        raise ValueError(text)
    return complex(re, im)


def _complex_arg(text: str) -> complex:
    try:
        return parse_complex(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 're,im', got {text!r}") from None


def _join_complex_values(argv: Sequence[str]) -> list[str]:
    # "--q1 -1,0" would otherwise be read as an unknown option
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in COMPLEX_FLAGS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def jsonable(obj):
    """Recursively turn complex numbers into ``[re, im]`` and numpy into Python."""
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [jsonable(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj]
    return obj


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="biheun", description="Biconfluent Heun solutions: spectra, construction, validation.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json", help="Report format (default json).")
    common.add_argument("--out", metavar="PATH", help="Also write the report to PATH.")
    common.add_argument("--tol-validate", type=float, help=f"Validation tolerance (env {TOL_ENV}; default 1e-8).")

    def params(p, *names):
        for name in names:
            p.add_argument(f"--{name}", type=_complex_arg, default=None, help=f"{name} as 're,im'.")

    def order(p, required=True):
        p.add_argument("--N", type=int, required=required, help=f"Termination order, 0..{N_MAX}.")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="Admissible q0 for polynomial Frobenius solutions.")
    params(p, "p0", "p1")
    order(p)

    p = sub.add_parser("hermite-spectrum", parents=[common], help="Admissible q0 for terminating Hermite sums.")
    params(p, "p1", "q1")
    order(p)

    def solution_args(p, families=("hermite",)):
        params(p, "p0", "p1", "q1", "q0", "s", "q0-shift")
        order(p)
        p.add_argument("--root-index", type=int, default=0, help="Which spectrum root to use (sorted by re, im).")
        p.add_argument("--family", choices=families, default=families[0], help="Representation family.")

    p = sub.add_parser("construct", parents=[common], help="Four-term hypergeometric form of a Hermite solution.")
    solution_args(p)

    p = sub.add_parser("eval", parents=[common], help="Evaluate every representation at given points.")
    solution_args(p, ("hermite", "frobenius"))
    p.add_argument("--z", type=_complex_arg, action="append", required=True, help="Evaluation point (repeatable).")

    p = sub.add_parser("validate", parents=[common], help="Cross-validate representations on a disc.")
    solution_args(p, ("hermite", "frobenius"))
    p.add_argument("--center", type=_complex_arg, default=complex(1.0, 0.5), help="Disc center (default 1,0.5).")
    p.add_argument("--radius", type=float, default=0.9, help="Disc radius (default 0.9).")
    p.add_argument("--count", type=int, default=20, help="Number of sample points (default 20).")

    p = sub.add_parser("identity-check", parents=[common], help="Random-draw check of the shift-combination identities.")
    p.add_argument("--draws", type=int, default=200)
    p.add_argument("--points", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _config(args) -> ToleranceConfig:
    raw = args.tol_validate
    field = "--tol-validate"
    if raw is None and os.environ.get(TOL_ENV):
        field = TOL_ENV
        try:
            raw = float(os.environ[TOL_ENV])
        except ValueError:
            raise InputError(f"{TOL_ENV}: not a number: {os.environ[TOL_ENV]!r}") from None
    if raw is None:
        return DEFAULT_CONFIG
    if not (math.isfinite(raw) and raw > 0):
        raise InputError(f"{field}: must be a positive number, got {raw!r}")
    return ToleranceConfig(tol_validate=raw)


def _check_inputs(args):
    N = getattr(args, "N", None)
    if N is not None and not 0 <= N <= N_MAX:
        raise InputError(f"--N: must lie in 0..{N_MAX}, got {N}")
    for name in ("count", "draws", "points"):
        value = getattr(args, name, None)
        if value is not None and value < 1:
            raise InputError(f"--{name}: must be positive, got {value}")
    if getattr(args, "radius", None) is not None and not args.radius > 0:
        raise InputError(f"--radius: must be positive, got {args.radius}")
    if getattr(args, "s", None) == 0:
        raise InputError("--s: must be nonzero")


def _required(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise InputError(f"--{name.replace('_', '-')}: required for {args.command}")


def _pick_root(roots, args) -> complex:
    if not 0 <= args.root_index < len(roots):
        raise InputError(f"--root-index: must lie in 0..{len(roots) - 1}, got {args.root_index}")
    q0 = roots[args.root_index]
    if args.q0 is not None:
        q0 = args.q0
    if args.q0_shift is not None:
        q0 += args.q0_shift
    return q0


def _solution(args, cfg):
    """Parameters plus named representations for the chosen family and root.

    Representations return unrounded extended-precision values so the
    finite-difference residual is not dominated by output rounding.
    """
    s = args.s if args.s is not None else 1.0
    if args.family == "hermite":
        _required(args, "p1", "q1")
        if args.p0 is not None and args.p0 != -args.N:
            raise InputError(f"--p0: the Hermite family needs p0 = -N = {-args.N}, got {args.p0}")
        spec = hermite_spectrum(args.p1, args.q1, args.N, cfg)
        q0 = _pick_root(spec.admissible_q0, args)
        params = BiconfluentParams(-args.N, args.p1, q0, args.q1, s)
        if q0 == spec.admissible_q0[args.root_index]:
            exp = HermiteExpansion.from_spectrum(args.p1, args.q1, args.N, args.root_index, s, cfg)
        else:
            exp = HermiteExpansion(params, args.N, hermite_coefficients(params, args.N + 1))
        comb = build_ghg_solution(exp, cfg)
        reps = {
            "hermite": lambda z: evaluate_hermite_series(exp, z, cfg, extended=True),
            "ghg": lambda z: evaluate_combination(comb, z, cfg, extended=True),
        }
        derivative = lambda z: evaluate_hermite_series(exp, z, cfg, order=1)
        return exp.params, reps, derivative, {"expansion": exp, "combination": comb}
    _required(args, "p0", "p1")
    if args.q1 is not None and args.q1 != 2 * args.N:
        raise InputError(f"--q1: the Frobenius family needs q1 = 2N = {2 * args.N}, got {args.q1}")
    spec = frobenius_spectrum(args.p0, args.p1, args.N, cfg)
    q0 = _pick_root(spec.admissible_q0, args)
    params = BiconfluentParams(args.p0, args.p1, q0, 2 * args.N, s)
    if q0 == spec.admissible_q0[args.root_index]:
        coeffs = spec.eigenvectors[args.root_index]
    else:
        coeffs = frobenius_coefficients(params, args.N + 1)
    reps = {"frobenius": lambda z: evaluate_frobenius(coeffs, params, z, cfg, extended=True)}
    derivative = lambda z: evaluate_frobenius(coeffs, params, z, cfg, order=1)
    return params, reps, derivative, {"coefficients": coeffs}


def _spectrum_result(spec) -> dict:
    return {
        "family": spec.family,
        "N": spec.n_max,
        "char_poly": list(spec.char_poly.coeffs),
        "roots": list(spec.admissible_q0),
        "eigenvectors": [list(v.values) for v in spec.eigenvectors],
        "eigenvector_flagged": [v.flagged for v in spec.eigenvectors],
    }


def _term_dict(term) -> dict:
    return {
        "prefactor": term.prefactor,
        "upper": list(term.upper),
        "lower": list(term.lower),
        "xi_power": term.xi_power,
        "n_pairs": term.n_pairs,
        "scaled_pairs": term.scaled_pairs,
    }


def cmd_spectrum(args, cfg):
    _required(args, "p0", "p1")
    return _spectrum_result(frobenius_spectrum(args.p0, args.p1, args.N, cfg)), True


def cmd_hermite_spectrum(args, cfg):
    _required(args, "p1", "q1")
    return _spectrum_result(hermite_spectrum(args.p1, args.q1, args.N, cfg)), True


def cmd_construct(args, cfg):
    params, _, _, extra = _solution(args, cfg)
    exp, comb = extra["expansion"], extra["combination"]
    termination = exp.termination_residual()
    result = {
        "params": params.as_dict(),
        "beta": params.beta,
        "xi_transform": {"scale": params.s, "shift": -params.p1 / 2},
        "hermite_d": list(exp.d.values),
        "termination_residual": termination,
        "terms": [dict(group=g, **_term_dict(t)) for g, t in zip(("C'", "D'", "C''", "D''"), comb.terms)],
        "constants": comb.constants,
        "shift_roots": comb.shift_roots,
        "zero_sum_groups": list(comb.zero_sum_groups),
    }
    return result, termination <= cfg.tol_validate


def cmd_eval(args, cfg):
    params, reps, _, _ = _solution(args, cfg)
    samples = [{"z": z, **{name: complex(f(z)) for name, f in reps.items()}} for z in args.z]
    return {"params": params.as_dict(), "representations": list(reps), "samples": samples}, True


def cmd_validate(args, cfg):
    params, reps, derivative, _ = _solution(args, cfg)
    center = args.center
    anchor = next(iter(reps.values()))
    reps["integration"] = reference_representation(params, center, complex(anchor(center)), derivative(center))
    report = cross_validate(params, reps, center, args.radius, args.count, cfg)
    return {"params": params.as_dict(), **report.as_dict()}, report.passed


def cmd_identity_check(args, cfg):
    out = shift_identity_suite(args.draws, args.points, args.seed, cfg)
    passed = all(v <= cfg.tol_validate for v in out["max_relative_deviation"].values())
    return out, passed


COMMANDS = {
    "spectrum": cmd_spectrum,
    "hermite-spectrum": cmd_hermite_spectrum,
    "construct": cmd_construct,
    "eval": cmd_eval,
    "validate": cmd_validate,
    "identity-check": cmd_identity_check,
}


def _csv_rows(command: str, result: dict) -> tuple[list[str], list[list]]:
    """Flat table for CSV output; complex values take two columns."""

    def cells(v):
        return [v.real, v.imag] if isinstance(v, complex) else [v]

    if command in ("spectrum", "hermite-spectrum"):
        width = result["N"] + 1
        header = ["index", "q0_re", "q0_im"] + [f"v{i}_{p}" for i in range(width) for p in ("re", "im")]
        rows = [[i, *cells(q)] + [x for c in vec for x in cells(c)] for i, (q, vec) in enumerate(zip(result["roots"], result["eigenvectors"]))]
        return header, rows
    if command == "construct":
        header = ["group", "prefactor_re", "prefactor_im", "xi_power", "upper", "lower"]
        fmt = lambda xs: " ".join(f"{x.real!r}:{x.imag!r}" for x in xs)
        rows = [[t["group"], *cells(t["prefactor"]), t["xi_power"], fmt(t["upper"]), fmt(t["lower"])] for t in result["terms"]]
        return header, rows
    if command == "eval":
        names = result["representations"]
        header = ["z_re", "z_im"] + [f"{n}_{p}" for n in names for p in ("re", "im")]
        rows = [[*cells(s["z"])] + [x for n in names for x in cells(s[n])] for s in result["samples"]]
        return header, rows
    if command == "validate":
        header = ["z_re", "z_im", "residual"]
        rows = [[*cells(complex(*z)), r] for z, r in jsonable(result["residual_points"])]
        rows += [[f"pair:{k}", "", v] for k, v in result["pairwise_dev"].items()]
        return header, rows
    header = ["check", "max_relative_deviation", "count"]
    rows = [[k, v, result["checks"][k]] for k, v in result["max_relative_deviation"].items()]
    return header, rows


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(jsonable(report), indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["# command", report["command"], "version", report["version"], "passed", report["passed"]])
    writer.writerow(["# tolerances", *(f"{k}={v!r}" for k, v in report["tolerances"].items())])
    if report["error"]:
        writer.writerow(["# error", report["error"]["type"], report["error"]["message"]])
    if report["result"] is not None:
        header, rows = _csv_rows(report["command"], report["result"])
        writer.writerow(header)
        writer.writerows(rows)
    return buf.getvalue()


def run(argv: Sequence[str] | None = None) -> tuple[int, str]:
    """Parse and execute one job; returns ``(exit_status, rendered_report)``."""
    parser = build_parser()
    args = parser.parse_args(_join_complex_values(list(sys.argv[1:] if argv is None else argv)))
    try:
        cfg = _config(args)
        _check_inputs(args)
    except InputError as err:
        parser.error(str(err))
    report = {"command": args.command, "version": __version__, "tolerances": cfg.as_dict(), "passed": False, "error": None, "result": None}
    try:
        result, passed = COMMANDS[args.command](args, cfg)
        report["result"], report["passed"] = result, bool(passed)
    except InputError as err:
        parser.error(str(err))
    except BiheunError as err:
        report["error"] = {"type": type(err).__name__, "message": str(err)}
    text = render(report, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return (0 if report["passed"] else 1), text


def main(argv: Sequence[str] | None = None) -> int:
    status, text = run(argv)
    sys.stdout.write(text)
    sys.stdout.flush()
    return status


if __name__ == "__main__":
    sys.exit(main())
