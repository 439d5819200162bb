import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biheun import (
    BiconfluentParams,
    HermiteExpansion,
    evaluate_hermite_series,
    hermite_coefficients,
    hermite_eval,
    hermite_spectrum,
    power_reexpansion,
)
from biheun.errors import DegenerateParameter, ResonantOrder
from biheun.frobenius import CoefficientSeries
from biheun.hermite import hermite_at_zero, hermite_power_series, hermite_recurrence_residuals
from biheun.numerics import pochhammer
from biheun.validation import annulus_points, ode_residual

from cases import hermite_cases


def mp_hermite(nu, x):
    return complex(mpmath.hermite(mpmath.mpc(nu), mpmath.mpc(x)))


@pytest.mark.parametrize("nu, x, expected", [(0, 0.7, 1.0), (1, 0.7, 1.4), (2, 0.0, -2.0)])
def test_examples(nu, x, expected):
    assert abs(hermite_eval(nu, x) - expected) < 1e-14


def test_half_order_at_zero():
    expected = 2**-0.5 * math.sqrt(math.pi) / math.gamma(0.75)
    assert hermite_eval(-0.5, 0) == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(1.0227656721, rel=1e-10)
    assert hermite_at_zero(-0.5) == pytest.approx(complex(mpmath.hermite(-0.5, 0)), rel=1e-13)


@pytest.mark.parametrize("x", [-1.3, 0.0, 0.25 + 0.4j, 1.7 - 0.2j])
def test_classical_polynomials(x):
    for nu, poly in enumerate([lambda t: 1, lambda t: 2 * t, lambda t: 4 * t * t - 2, lambda t: 8 * t**3 - 12 * t]):
        assert abs(hermite_eval(nu, x) - poly(x)) < 1e-12


def test_against_mpmath():
    rng = np.random.default_rng(11)
    for _ in range(60):
        nu = complex(rng.uniform(-5, 5), rng.uniform(-2, 2))
        x = complex(rng.uniform(-2, 2), rng.uniform(-1, 1))
        ref = mp_hermite(nu, x)
        assert abs(hermite_eval(nu, x) - ref) <= 1e-10 * max(1.0, abs(ref))


def test_kummer_form_matches_power_series():
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(200):
        nu = complex(rng.uniform(-5, 5), rng.uniform(-1, 1))
        x = 2 * math.sqrt(rng.uniform()) * np.exp(2j * math.pi * rng.uniform())
        a, b = hermite_eval(nu, x), hermite_power_series(nu, x)
        worst = max(worst, abs(a - b) / max(abs(a), abs(b), 1.0))
    assert worst < 1e-9


def test_power_series_refuses_integer_order():
    with pytest.raises(DegenerateParameter):
        hermite_power_series(2, 0.3)


@settings(max_examples=60, deadline=None)
@given(
    st.builds(complex, st.floats(-3, 3), st.floats(-1, 1)),
    st.builds(complex, st.floats(-0.7, 0.7), st.floats(-0.7, 0.7)),
    st.builds(complex, st.floats(-0.7, 0.7), st.floats(-0.7, 0.7)),
)
def test_shift_identity(nu, z, xi):
    # H_nu(z + xi) = sum_k (-nu)_k H_{nu-k}(xi) (-2z)^k / k!
    total = sum(pochhammer(-nu, k) * hermite_eval(nu - k, xi) * (-2 * z) ** k / math.factorial(k) for k in range(61))
    direct = hermite_eval(nu, z + xi)
    assert abs(total - direct) <= 1e-8 * max(1.0, abs(direct))


def test_coefficient_examples():
    d = hermite_coefficients(BiconfluentParams(-1, 0, 1, -1), 3).values
    assert d[0] == 1
    assert d[1] == pytest.approx(-1)
    d = hermite_coefficients(BiconfluentParams(-0.5, 0, 0, 0.7), 2).values
    assert d[1] == 0


def test_n1_first_coefficient_formula():
    p1, q0, q1 = 0.3 + 0.1j, -0.2 + 0.5j, 0.8
    params = BiconfluentParams(-1, p1, q0, q1)
    d1 = hermite_coefficients(params, 2).values[1]
    assert d1 == pytest.approx((p1 + q0) / (2 * (1 + params.beta)), rel=1e-14)


def test_resonant_order():
    with pytest.raises(ResonantOrder) as info:
        hermite_coefficients(BiconfluentParams(-1, 0.2, 0.1, 0), 4)
    assert info.value.index == 1


def test_spectrum_examples():
    assert hermite_spectrum(0.3, 0.4, 0).admissible_q0 == [0]
    p1, q1 = 0.3 - 0.1j, 0.6 + 0.2j
    assert np.allclose(hermite_spectrum(p1, q1, 1).char_poly.coeffs, [q1, p1, 1], rtol=1e-13)


def test_spectrum_triple_zero():
    spec = hermite_spectrum(0, 1, 2)
    assert np.allclose(spec.char_poly.coeffs, [0, 0, 0, 1], atol=1e-14)
    # a triple root only resolves to roughly eps**(1/3)
    assert max(abs(r) for r in spec.admissible_q0) < 1e-5
    assert np.max(np.abs(np.linalg.eigvals(spec.matrix))) < 1e-5


def test_spectrum_n2_and_n3_explicit():
    p1, q1 = -0.4 + 0.7j, 0.2 - 0.5j
    c2 = hermite_spectrum(p1, q1, 2).char_poly.coeffs
    assert np.allclose(c2, [4 * p1 * q1, 2 * p1**2 + 4 * q1 - 4, 3 * p1, 1], rtol=1e-12)
    assert hermite_spectrum(p1, q1, 3).char_poly.degree == 4


@pytest.mark.parametrize("N", range(0, 6))
def test_spectrum_roots_terminate(N):
    spec = hermite_spectrum(0.2 + 0.3j, -0.5 + 0.1j, N)
    eig = np.linalg.eigvals(spec.matrix)
    for q0, vec in zip(spec.admissible_q0, spec.eigenvectors):
        assert np.min(np.abs(eig - q0)) < 1e-8
        params = BiconfluentParams(-N, 0.2 + 0.3j, q0, -0.5 + 0.1j)
        assert hermite_recurrence_residuals(vec.values, params, extra=1).max() < 1e-10


def test_expansion_validation():
    params = BiconfluentParams(-1, 0.3, 0.2, 0.5)
    with pytest.raises(ValueError):
        HermiteExpansion(params, 2, CoefficientSeries([1, 0, 0], "hermite-d"))
    with pytest.raises(ValueError):
        HermiteExpansion(params, 1, CoefficientSeries([1, 0], "hermite-d"))
    with pytest.raises(ValueError):
        HermiteExpansion(params, 1, CoefficientSeries([1, 0.5], "frobenius-c"))
    exp = HermiteExpansion.from_params(params)
    assert exp.N == 1 and exp.order_base == params.beta


def test_off_spectrum_termination_residual_is_large():
    exp = HermiteExpansion.from_spectrum(0.3, 0.5, 2, 1)
    assert exp.termination_residual() < 1e-12
    off = HermiteExpansion.from_params(exp.params.replace(q0=exp.params.q0 + 0.01))
    assert off.termination_residual() > 1e-4


def test_evaluate_examples():
    p1, q1, s = 0.4, 0.6 + 0.2j, 1.2
    exp = HermiteExpansion.from_spectrum(p1, q1, 0, 0, s)
    z = 0.3 - 0.2j
    assert evaluate_hermite_series(exp, z) == pytest.approx(hermite_eval(q1 / 2, s * z - p1 / 2), rel=1e-14)
    # beta = 1 single term is H_1 = 2 xi
    one = HermiteExpansion.from_params(BiconfluentParams(0, p1, 0, 2, s))
    assert evaluate_hermite_series(one, z) == pytest.approx(2 * (s * z - p1 / 2), rel=1e-13)
    # xi = 0 reduces to the sum of values at zero
    exp = HermiteExpansion.from_spectrum(p1, q1, 2, 1, s)
    at0 = sum(d * hermite_at_zero(exp.beta + n) for n, d in enumerate(exp.d.values))
    assert evaluate_hermite_series(exp, p1 / (2 * s)) == pytest.approx(at0, rel=1e-13)


def test_derivative_matches_finite_difference():
    exp = HermiteExpansion.from_spectrum(0.3 + 0.2j, 0.7 - 0.1j, 2, 1, 0.9 + 0.2j)
    z, h = 0.4 + 0.3j, 1e-5
    fd = (exp(z + h) - exp(z - h)) / (2 * h)
    assert evaluate_hermite_series(exp, z, order=1) == pytest.approx(fd, rel=1e-8)


def test_power_reexpansion_constant_term():
    exp = HermiteExpansion.from_spectrum(0.3 + 0.2j, 0.7 - 0.1j, 3, 2, 0.9 + 0.2j)
    c = power_reexpansion(exp, 4)
    assert c.kind == "power-z" and len(c) == 5
    assert c[0] == pytest.approx(exp(0), rel=1e-13)


def test_power_reexpansion_of_linear_function():
    s = 1.5
    exp = HermiteExpansion.from_params(BiconfluentParams(0, 0, 0, 2, s))
    assert np.allclose(power_reexpansion(exp, 4).values, [0, 2 * s, 0, 0, 0], atol=1e-13)


def test_power_reexpansion_against_finite_differences():
    exp = HermiteExpansion.from_spectrum(0.5 - 0.2j, 0.4 + 0.3j, 1, 0, 1.1)
    c = power_reexpansion(exp, 2).values
    h = 1e-4
    d1 = (exp(h) - exp(-h)) / (2 * h)
    d2 = (exp(h) - 2 * exp(0) + exp(-h)) / h**2
    assert c[1] == pytest.approx(d1, rel=1e-6)
    assert c[2] == pytest.approx(d2 / 2, rel=1e-6)


def test_power_reexpansion_sums_to_the_function():
    exp = HermiteExpansion.from_spectrum(0.3 + 0.2j, 0.7 - 0.1j, 2, 0, 0.9 + 0.2j)
    c = power_reexpansion(exp, 50).values
    z = 0.35 - 0.2j
    assert np.polyval(c[::-1], z) == pytest.approx(exp(z), rel=1e-10)


def test_terminated_sums_solve_the_equation():
    worst = 0.0
    for _, exp in hermite_cases(4):
        f = lambda z: evaluate_hermite_series(exp, z, extended=True)
        worst = max(worst, max(abs(ode_residual(f, exp.params, z)) for z in annulus_points(20)))
    assert worst < 1e-8
