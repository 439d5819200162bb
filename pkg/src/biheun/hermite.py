"""Hermite functions of complex order and Hermite-function expansions.

A solution is written ``F(z) = sum_n d_n H_{beta+n}(s z - p1/2)`` with
``beta = p0 + q1/2``. With ``p0 = -N`` and q0 on the spectrum of the
(N+1)x(N+1) minor, the sum has at most N+1 terms.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateParameter, NonConvergence, ResonantOrder
from .frobenius import (
    BiconfluentParams,
    CoefficientSeries,
    SpectrumResult,
    tridiagonal_matrix,
    tridiagonal_null_vector,
)
from .hypergeom import HypergeomTerm, pfq_eval
from .numerics import DEFAULT_CONFIG, EXT, ToleranceConfig, gamma, pochhammer, poly_roots, recip_gamma, tridiagonal_charpoly

SQRT_PI = math.sqrt(math.pi)
_TINY = 1e-290  # subnormal-range scale: no relative precision left
_LOG2 = math.log(2.0)


def _pow2(x: complex) -> complex:
    return cmath.exp(complex(x) * _LOG2)


def hermite_at_zero(nu: complex) -> complex:
    """``H_nu(0) = 2**nu sqrt(pi) / Gamma(1/2 - nu/2)``."""
    return _pow2(nu) * SQRT_PI * recip_gamma(0.5 - nu / 2)


def hermite_eval(nu: complex, x: complex, cfg: ToleranceConfig = DEFAULT_CONFIG, extended: bool = False) -> complex:
    """Hermite function ``H_nu(x)`` from its two-Kummer representation.

    Each Kummer term carries a reciprocal-gamma weight; a weight that is
    exactly zero drops the term, which is how the classical polynomials
    lose their even or odd part.
    """
    nu, x = complex(nu), EXT(x)
    even_w = _pow2(nu) * SQRT_PI * recip_gamma(0.5 - nu / 2)
    odd_w = _pow2(nu + 1) * SQRT_PI * recip_gamma(-nu / 2)
    x2 = x * x
    out = EXT(0)
    if even_w != 0:
        out += even_w * pfq_eval(HypergeomTerm((-nu / 2,), (0.5,)), x2, cfg, extended=True)
    if odd_w != 0:
        out -= odd_w * x * pfq_eval(HypergeomTerm((0.5 - nu / 2,), (1.5,)), x2, cfg, extended=True)
    return out if extended else complex(out)


def hermite_power_series(nu: complex, x: complex, cfg: ToleranceConfig = DEFAULT_CONFIG) -> complex:
    """``H_nu(x)`` from its Taylor series in gamma-ratio form.

    Independent of :func:`hermite_eval`; used as a cross-check. Only
    defined when ``Gamma(-nu)`` is finite, i.e. nu is not a nonnegative
    integer.
    """
    nu, x = complex(nu), complex(x)
    inv = recip_gamma(-nu)
    if inv == 0:
        raise DegenerateParameter(f"Gamma(-nu) has a pole at nu={nu}", factor="Gamma(-nu)")
    # term_k = Gamma(k/2 - nu/2) / (2 Gamma(-nu)) * (-2x)^k / k!, stepped by k -> k+2
    terms = [gamma(-nu / 2) * inv / 2, gamma(0.5 - nu / 2) * inv / 2 * (-2 * x)]
    if not all(cmath.isfinite(t) for t in terms):
        raise DegenerateParameter(f"Gamma(k/2 - nu/2) has a pole at nu={nu}", factor="Gamma(k/2-nu/2)")
    total = terms[0] + terms[1]
    small = 0
    y2 = 4 * x * x
    for k in range(2, cfg.max_terms):
        prev = terms[k % 2]
        t = prev * ((k - 2) / 2 - nu / 2) * y2 / ((k - 1) * k)
        terms[k % 2] = t
        total += t
        if abs(t) < cfg.tol_series * abs(total):
            small += 1
            if small >= 3:
                return total
        else:
            small = 0
    raise NonConvergence(f"Hermite power series did not settle for nu={nu}, x={x}")


def hermite_coefficients(params: BiconfluentParams, n_terms: int) -> CoefficientSeries:
    """Expansion coefficients ``d_0 .. d_{n_terms-1}`` with ``d_0 = 1``.

    Raises
    ------
    ResonantOrder
        If ``n + beta`` vanishes for some ``1 <= n < n_terms``.
    """
    if n_terms < 1:
        raise ValueError("n_terms must be at least 1")
    p0, p1, q0 = params.p0, params.p1, params.q0
    beta = params.beta
    d = np.zeros(n_terms, dtype=complex)
    d[0] = 1.0
    for n in range(1, n_terms):
        if abs(n + beta) < 1e-12:
            raise ResonantOrder(n)
        R = 2 * n * (n + beta)
        Q = p1 * (n - 1) + p0 * p1 - q0
        P = n - 2 + p0
        prev2 = d[n - 2] if n >= 2 else 0.0
        d[n] = -(Q * d[n - 1] + P * prev2) / R
    return CoefficientSeries(d, "hermite-d")


def hermite_recurrence_residuals(values, params: BiconfluentParams, extra: int = 0) -> np.ndarray:
    """Relative recurrence residuals at n = 1..len-1+extra (missing d's read as 0)."""
    d = np.asarray(values, dtype=complex)
    beta, p0, p1, q0 = params.beta, params.p0, params.p1, params.q0
    get = lambda i: d[i] if 0 <= i < d.size else 0.0
    out = []
    for n in range(1, d.size + extra):
        terms = (
            2 * n * (n + beta) * get(n),
            (p1 * (n - 1) + p0 * p1 - q0) * get(n - 1),
            (n - 2 + p0) * get(n - 2),
        )
        scale = max(abs(t) for t in terms)
        out.append(abs(sum(terms)) / scale if scale > _TINY else 0.0)
    return np.asarray(out)


def hermite_spectrum(p1: complex, q1: complex, N: int, cfg: ToleranceConfig = DEFAULT_CONFIG) -> SpectrumResult:
    """Values of q0 for which the Hermite expansion terminates (p0 = -N).

    q0 is an eigenvalue of the minor, so the polynomial is ``det(q0 I - M)``.
    """
    if N < 0:
        raise ValueError("N must be nonnegative")
    p1, q1 = complex(p1), complex(q1)
    diag = [(n - N) * p1 for n in range(N + 1)]
    sup = [2 * (n + 1) * (n + 1 - N + q1 / 2) for n in range(N)]
    sub = [n - N for n in range(N)]
    char = tridiagonal_charpoly(diag, sup, sub)
    roots = poly_roots(char, cfg, expected_degree=N + 1)
    vectors = []
    for q0 in roots:
        v, k, flag = tridiagonal_null_vector(diag, sup, sub, q0)
        vectors.append(CoefficientSeries(v, "hermite-d", normalized_at=k, flagged=flag))
    return SpectrumResult(N, "hermite", char, roots, vectors, tridiagonal_matrix(diag, sup, sub))


@dataclass(frozen=True, eq=False)
class HermiteExpansion:
    """A terminated expansion: ``p0 = -N`` and N+1 coefficients ``d``.

    Construction checks the recurrence at n = 1..N. Whether ``d_{N+1}``
    really vanishes (q0 on the spectrum) is reported by
    :meth:`termination_residual` rather than enforced, so off-spectrum
    expansions can still be built as negative controls.
    """

    params: BiconfluentParams
    N: int
    d: CoefficientSeries

    def __post_init__(self):
        if self.N < 0:
            raise ValueError("N must be nonnegative")
        if abs(self.params.p0 + self.N) > 1e-12:
            raise ValueError(f"p0 must equal -N={-self.N}, got {self.params.p0}")
        if self.d.kind != "hermite-d" or len(self.d) != self.N + 1:
            raise ValueError(f"expected {self.N + 1} hermite-d coefficients")
        res = hermite_recurrence_residuals(self.d.values, self.params)
        if res.size and res.max() > 1e-10:
            raise ValueError(f"coefficients violate the recurrence (max relative residual {res.max():.2e})")

    @classmethod
    def from_params(cls, params: BiconfluentParams, N: int | None = None) -> "HermiteExpansion":
        if N is None:
            N = int(round(-params.p0.real))
        return cls(params, N, hermite_coefficients(params, N + 1))

    @classmethod
    def from_spectrum(
        cls, p1: complex, q1: complex, N: int, root_index: int = 0, s: complex = 1.0, cfg: ToleranceConfig = DEFAULT_CONFIG
    ) -> "HermiteExpansion":
        spec = hermite_spectrum(p1, q1, N, cfg)
        q0 = spec.admissible_q0[root_index]
        params = BiconfluentParams(-N, p1, q0, q1, s)
        vec = spec.eigenvectors[root_index]
        if vec.normalized_at == 0:
            return cls.from_params(params, N)
        return cls(params, N, vec)

    @property
    def beta(self) -> complex:
        return self.params.beta

    @property
    def order_base(self) -> complex:
        return self.params.beta

    def termination_residual(self) -> float:
        """Relative size of ``d_{N+1}`` implied by the recurrence."""
        return float(hermite_recurrence_residuals(self.d.values, self.params, extra=1)[-1])

    def __call__(self, z, cfg: ToleranceConfig = DEFAULT_CONFIG):
        return evaluate_hermite_series(self, z, cfg)


def evaluate_hermite_series(
    exp: HermiteExpansion, z: complex, cfg: ToleranceConfig = DEFAULT_CONFIG, order: int = 0, extended: bool = False
) -> complex:
    """``sum_n d_n H_{beta+n}(s z - p1/2)``; ``order=1`` gives d/dz.

    The derivative uses ``H_nu' = 2 nu H_{nu-1}``. ``extended=True``
    returns the unrounded extended-precision value.
    """
    if order not in (0, 1):
        raise ValueError("order must be 0 or 1")
    xi = exp.params.xi(EXT(z))
    beta = exp.beta
    total = EXT(0)
    for n, dn in enumerate(exp.d.values):
        if dn == 0:
            continue
        nu = beta + n
        if order == 0:
            total += dn * hermite_eval(nu, xi, cfg, extended=True)
        else:
            total += dn * 2 * nu * hermite_eval(nu - 1, xi, cfg, extended=True)
    total = total * (exp.params.s if order == 1 else 1.0)
    return total if extended else complex(total)


def power_reexpansion(exp: HermiteExpansion, k_max: int, cfg: ToleranceConfig = DEFAULT_CONFIG) -> CoefficientSeries:
    """Taylor coefficients of the expansion in plain powers ``z**k`` about 0.

    Built from the shift expansion of each Hermite function about
    ``-p1/2``; no two-term recurrence exists for these, so this is a
    validation path only.
    """
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    s = exp.params.s
    x0 = -exp.params.p1 / 2
    beta = exp.beta
    out = np.zeros(k_max + 1, dtype=complex)
    for j, dj in enumerate(exp.d.values):
        if dj == 0:
            continue
        nu = beta + j
        for k in range(k_max + 1):
            out[k] += dj * pochhammer(-nu, k) * hermite_eval(nu - k, x0, cfg) * (-2.0) ** k / math.factorial(k)
    out *= np.array([s**k for k in range(k_max + 1)])
    return CoefficientSeries(out, "power-z")
