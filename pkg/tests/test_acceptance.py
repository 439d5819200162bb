"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line with the measured figure
and the threshold, then asserts. Run with ``pytest -v tests/test_acceptance.py``.
"""

import math
import time

import numpy as np
import pytest

from biheun import (
    BiconfluentParams,
    HermiteExpansion,
    build_ghg_solution,
    check_two_term_recurrences,
    evaluate_combination,
    evaluate_frobenius,
    evaluate_hermite_series,
    frobenius_coefficients,
    frobenius_spectrum,
    hermite_coefficients,
    hermite_eval,
    hermite_spectrum,
    ode_reference_solve,
    ode_residual,
    seed_values,
    shifted_power_coefficients,
    structure_polynomials,
)
from biheun.hermite import hermite_power_series
from biheun.hypergeom import shift_identity_suite
from biheun.numerics import pochhammer
from biheun.validation import annulus_points, disc_points, relative_deviation

from cases import explicit_form_deviation, frobenius_cases, hermite_cases


@pytest.fixture
def verdict(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'}: {title} ({detail})")
        assert ok, f"criterion {number} failed: {detail}"

    return emit


def _unit_disc(rng, size):
    return np.sqrt(rng.uniform(0, 1, size)) * np.exp(2j * np.pi * rng.uniform(0, 1, size))


def _frobenius_closed(p0, p1, N):
    # ascending coefficients in q0
    return {
        0: [0, 1],
        1: [-2 * p0, p1, 1],
        2: [-8 * p0 * p1, 2 * p1**2 - 8 * p0 - 4, 3 * p1, 1],
        3: [
            -36 * p0 * p1**2 + 36 * p0**2 + 72 * p0,
            6 * (-10 * p0 * p1 - 6 * p1 + p1**3),
            11 * p1**2 - 20 * p0 - 20,
            6 * p1,
            1,
        ],
    }[N]


def _hermite_closed(p1, q1, N):
    return {
        0: [0, 1],
        1: [q1, p1, 1],
        2: [4 * p1 * q1, 2 * p1**2 + 4 * q1 - 4, 3 * p1, 1],
        3: [
            9 * q1**2 + (18 * p1**2 - 36) * q1,
            30 * p1 * q1 + 6 * p1**3 - 36 * p1,
            10 * q1 + 11 * p1**2 - 20,
            6 * p1,
            1,
        ],
    }[N]


def _coef_error(got, want):
    got, want = np.asarray(got, dtype=complex), np.asarray(want, dtype=complex)
    if got.shape != want.shape:
        return math.inf
    return float(np.max(np.abs(got - want) / np.maximum(np.abs(want), 1.0)))


def test_criterion_1_spectrum_golden_match(verdict):
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    worst = 0.0
    for p0, p1, q1 in _unit_disc(rng, (100, 3)):
        for N in range(4):
            worst = max(worst, _coef_error(frobenius_spectrum(p0, p1, N).char_poly.monic().coeffs, _frobenius_closed(p0, p1, N)))
            worst = max(worst, _coef_error(hermite_spectrum(p1, q1, N).char_poly.monic().coeffs, _hermite_closed(p1, q1, N)))
    elapsed = time.perf_counter() - start
    verdict(1, "characteristic polynomials vs closed forms", worst < 1e-9 and elapsed < 5, f"max rel err {worst:.2e} < 1e-9, {elapsed:.2f}s < 5s")


def test_criterion_2_termination(verdict):
    worst = 0.0
    count = 0
    for _, params, vec in frobenius_cases(5):
        N = len(vec) - 1
        c = frobenius_coefficients(params, N + 4).values
        worst = max(worst, np.max(np.abs(c[N + 1 :])) / np.max(np.abs(c[: N + 1])))
        count += 1
    for _, exp in hermite_cases(5):
        N = exp.N
        d = hermite_coefficients(exp.params, N + 4).values
        worst = max(worst, np.max(np.abs(d[N + 1 :])) / np.max(np.abs(d[: N + 1])))
        count += 1
    verdict(2, "series vanish beyond index N", worst < 1e-10, f"{count} roots, max |c_(N+1..N+3)|/max {worst:.2e} < 1e-10")


def _residual_max(f, params, points):
    return max(abs(ode_residual(f, params, z)) for z in points)


def test_criterion_3_ode_residual(verdict):
    points = annulus_points(20, 0.1, 2.0)
    start = time.perf_counter()
    worst = {"frobenius": 0.0, "hermite": 0.0, "ghg": 0.0}
    control = {"frobenius": math.inf, "hermite": math.inf, "ghg": math.inf}
    for _, params, vec in frobenius_cases(4):
        worst["frobenius"] = max(worst["frobenius"], _residual_max(lambda z: evaluate_frobenius(vec, params, z), params, points))
        off = params.replace(q0=params.q0 + 1e-2)
        trunc = frobenius_coefficients(off, len(vec))
        control["frobenius"] = min(control["frobenius"], _residual_max(lambda z: evaluate_frobenius(trunc, off, z), off, points))
    for _, exp in hermite_cases(4):
        comb = build_ghg_solution(exp)
        worst["hermite"] = max(worst["hermite"], _residual_max(lambda z: evaluate_hermite_series(exp, z), exp.params, points))
        worst["ghg"] = max(worst["ghg"], _residual_max(lambda z: evaluate_combination(comb, z), exp.params, points))
        off = HermiteExpansion.from_params(exp.params.replace(q0=exp.params.q0 + 1e-2))
        off_comb = build_ghg_solution(off)
        control["hermite"] = min(control["hermite"], _residual_max(off, off.params, points))
        control["ghg"] = min(control["ghg"], _residual_max(off_comb, off.params, points))
    elapsed = time.perf_counter() - start
    top = max(worst.values())
    floor = min(control.values())
    ok = top < 1e-8 and floor > 1e-8 and elapsed < 30
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    verdict(3, "ODE residual of constructed solutions", ok, f"{detail} < 1e-8; perturbed q0 min residual {floor:.1e} > 1e-8; {elapsed:.1f}s < 30s")


def test_criterion_4_main_theorem(verdict):
    worst = 0.0
    count = 0
    for _, exp in hermite_cases(5):
        comb = build_ghg_solution(exp)
        p = exp.params
        zs = [(xi + p.p1 / 2) / p.s for xi in disc_points(0, 1.5, 20)]
        h = [evaluate_hermite_series(exp, z) for z in zs]
        g = [evaluate_combination(comb, z) for z in zs]
        ref = int(np.argmax(np.abs(h)))
        h = [v / h[ref] for v in h]
        g = [v / g[ref] for v in g]
        worst = max(worst, max(relative_deviation(u, v) for u, v in zip(h, g)))
        count += 1
    verdict(4, "hypergeometric combination equals Hermite sum", worst < 1e-8, f"{count} cases x 20 points, max rel dev {worst:.2e} < 1e-8")


def test_criterion_5_explicit_forms(verdict):
    worst = 0.0
    count = 0
    for _, exp in hermite_cases(3):
        worst = max(worst, explicit_form_deviation(build_ghg_solution(exp), exp))
        count += 1
    # N = 2 with p1 = q0 = 0: odd groups vanish, D' survives as a scaled limit
    spec = hermite_spectrum(0, 0.6 + 0.1j, 2)
    exp = HermiteExpansion.from_spectrum(0, 0.6 + 0.1j, 2, int(np.argmin(np.abs(spec.admissible_q0))))
    comb = build_ghg_solution(exp)
    worst = max(worst, explicit_form_deviation(comb, exp, skip=(1,)), relative_deviation(comb(0.4), exp(0.4)))
    count += 1
    verdict(5, "explicit forms for N = 0..3", worst < 1e-10, f"{count} cases, prefactors and sorted parameters within {worst:.2e} < 1e-10")


def test_criterion_6_shift_identities(verdict):
    start = time.perf_counter()
    out = shift_identity_suite(draws=200, points=5, seed=0)
    elapsed = time.perf_counter() - start
    devs = out["max_relative_deviation"]
    ok = max(devs.values()) < 1e-9 and elapsed < 10 and out["checks"]["general"] == 200
    detail = ", ".join(f"{k} {v:.1e}" for k, v in devs.items())
    verdict(6, "shift-combination identities", ok, f"{detail} < 1e-9; {elapsed:.2f}s < 10s")


def test_criterion_7_splitting_and_recurrences(verdict):
    worst = {"decomposition": 0.0, "seeds": 0.0, "ratios": 0.0}
    count = 0
    for _, exp in hermite_cases(5):
        split = shifted_power_coefficients(exp, 64)
        ct, cp, cpp = split.c_tilde.values[:31], split.c_prime.values, split.c_dprime.values
        gap = np.abs(cp[:31] + cpp[:31] - ct) / np.maximum(np.maximum(np.abs(ct), np.abs(cp[:31])), 1e-300)
        worst["decomposition"] = max(worst["decomposition"], float(gap.max()))
        seeds = seed_values(exp)
        pairs = [("cprime0", cp[0]), ("cprime1", cp[1]), ("cdprime0", cpp[0]), ("cdprime1", cpp[1]), ("ctilde0", ct[0]), ("ctilde1", ct[1])]
        worst["seeds"] = max(worst["seeds"], max(relative_deviation(seeds[k], v) for k, v in pairs))
        polys = structure_polynomials(exp)
        report = check_two_term_recurrences(split, polys.phi, polys.psi, 30)
        worst["ratios"] = max(worst["ratios"], max(report.max_deviation.values()))
        count += 1
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    verdict(7, "splitting, seeds and two-term ratios, k <= 30", max(worst.values()) < 1e-9, f"{count} cases, {detail} < 1e-9")


def test_criterion_8_hermite_cross_checks(verdict):
    rng = np.random.default_rng(8)
    series_dev = 0.0
    for nu, x in zip(5 * _unit_disc(rng, 200), 2 * _unit_disc(rng, 200)):
        series_dev = max(series_dev, relative_deviation(hermite_eval(nu, x), hermite_power_series(nu, x)))
    shift_dev = 0.0
    for nu, z, xi in zip(5 * _unit_disc(rng, 40), _unit_disc(rng, 40), _unit_disc(rng, 40)):
        total = sum(pochhammer(-nu, k) * hermite_eval(nu - k, xi) * (-2 * z) ** k / math.factorial(k) for k in range(61))
        shift_dev = max(shift_dev, relative_deviation(total, hermite_eval(nu, z + xi)))
    classical = [lambda t: 1, lambda t: 2 * t, lambda t: 4 * t * t - 2, lambda t: 8 * t**3 - 12 * t]
    exact_dev = max(abs(hermite_eval(n, x) - f(x)) for x in 2 * _unit_disc(rng, 50) for n, f in enumerate(classical))
    ok = series_dev < 1e-9 and shift_dev < 1e-8 and exact_dev < 1e-12
    verdict(8, "Hermite function cross-checks", ok, f"Kummer vs series {series_dev:.1e} < 1e-9, shift {shift_dev:.1e} < 1e-8, classical {exact_dev:.1e} < 1e-12")


def test_criterion_9_oracle_independence(verdict):
    z0, z1 = 0.5 + 0.3j, 1.5 - 0.4j
    worst = 0.0
    count = 0
    for _, params, vec in frobenius_cases(3):
        phi0 = evaluate_frobenius(vec, params, z0)
        dphi0 = evaluate_frobenius(vec, params, z0, order=1)
        out = ode_reference_solve(params, z0, phi0, dphi0, z1)
        worst = max(worst, relative_deviation(out, evaluate_frobenius(vec, params, z1)))
        count += 1
    for _, exp in hermite_cases(3):
        comb = build_ghg_solution(exp)
        for f, df in (
            (exp, lambda z: evaluate_hermite_series(exp, z, order=1)),
            (comb, lambda z: evaluate_combination(comb, z, order=1)),
        ):
            out = ode_reference_solve(exp.params, z0, f(z0), df(z0), z1)
            worst = max(worst, relative_deviation(out, f(z1)))
            count += 1
    verdict(9, "direct integration matches every representation", worst < 1e-7, f"{count} checks, max rel dev {worst:.2e} < 1e-7")
