"""Power-series solutions of the biconfluent Heun equation about z = 0.

The equation handled throughout the package is::

    z F'' + (p0 + p1 s z - 2 s^2 z^2) F' + (q0 s + q1 s^2 z) F = 0

and the zero-exponent Frobenius solution is ``F(z) = sum_n c_n (s z)^n``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import IndicialCollision, NonConvergence
from .numerics import DEFAULT_CONFIG, EXT, CPoly, ToleranceConfig, poly_roots, tridiagonal_charpoly

_TINY = 1e-290

KINDS = (
    "frobenius-c",
    "hermite-d",
    "shifted-ctilde",
    "split-cprime",
    "split-cdoubleprime",
    "power-z",
)


@dataclass(frozen=True)
class BiconfluentParams:
    """The five complex constants of the equation; ``beta`` is derived."""

    p0: complex
    p1: complex
    q0: complex
    q1: complex
    s: complex = 1.0

    def __post_init__(self):
        for name in ("p0", "p1", "q0", "q1", "s"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if self.s == 0:
            raise ValueError("s must be nonzero")

    @property
    def beta(self) -> complex:
        return self.p0 + self.q1 / 2

    def xi(self, z):
        """Scaled and shifted argument ``s z - p1/2``."""
        return self.s * z - self.p1 / 2

    def replace(self, **changes) -> "BiconfluentParams":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("p0", "p1", "q0", "q1", "s")}


@dataclass(frozen=True, eq=False)
class CoefficientSeries:
    """Ordered complex coefficients tagged with the recurrence that produced them.

    ``normalized_at`` is the index scaled to 1 (0 unless the natural
    normalization component vanished, in which case ``flagged`` is set).
    """

    values: np.ndarray
    kind: str
    normalized_at: int = 0
    flagged: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown coefficient kind {self.kind!r}")
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex).ravel())

    def __len__(self):
        return self.values.size

    def __getitem__(self, i):
        return self.values[i]


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    """Termination spectrum of one (N+1)x(N+1) recurrence minor.

    ``char_poly`` is monic in q0; ``matrix`` is the minor itself, kept for
    brute-force cross-checks.
    """

    n_max: int
    family: str
    char_poly: CPoly
    admissible_q0: list
    eigenvectors: list
    matrix: np.ndarray = field(repr=False)


def _recurrence_coeffs(params: BiconfluentParams, n: int):
    """(R_n, Q_{n-1}, P_{n-2}) of the Frobenius three-term recurrence."""
    R = n * (n - 1 + params.p0)
    Q = params.p1 * (n - 1) + params.q0
    P = -2 * (n - 2) + params.q1
    return R, Q, P


def frobenius_coefficients(params: BiconfluentParams, n_terms: int) -> CoefficientSeries:
    """First ``n_terms`` Frobenius coefficients with ``c_0 = 1``.

    Raises
    ------
    IndicialCollision
        If ``n (n - 1 + p0)`` vanishes for some ``1 <= n < n_terms``; the
        zero-exponent branch does not exist there.
    """
    if n_terms < 1:
        raise ValueError("n_terms must be at least 1")
    c = np.zeros(n_terms, dtype=complex)
    c[0] = 1.0
    for n in range(1, n_terms):
        R, Q, P = _recurrence_coeffs(params, n)
        if abs(R) < 1e-13 * n * n:
            raise IndicialCollision(n)
        prev2 = c[n - 2] if n >= 2 else 0.0
        c[n] = -(Q * c[n - 1] + P * prev2) / R
    return CoefficientSeries(c, "frobenius-c")


def frobenius_recurrence_residuals(values: Sequence[complex], params: BiconfluentParams) -> np.ndarray:
    """Relative residual of the three-term recurrence at each n = 1..len-1."""
    c = np.asarray(values, dtype=complex)
    out = np.zeros(max(c.size - 1, 0))
    for n in range(1, c.size):
        R, Q, P = _recurrence_coeffs(params, n)
        prev2 = c[n - 2] if n >= 2 else 0.0
        terms = (R * c[n], Q * c[n - 1], P * prev2)
        scale = max(abs(t) for t in terms)
        # below ~1e-290 the terms are subnormal and carry no relative precision
        out[n - 1] = abs(sum(terms)) / scale if scale > _TINY else 0.0
    return out


def evaluate_frobenius(
    coeffs: CoefficientSeries,
    params: BiconfluentParams,
    z: complex,
    cfg: ToleranceConfig = DEFAULT_CONFIG,
    order: int = 0,
    extended: bool = False,
) -> complex:
    """Partial sum of ``c_n (s z)^n`` (``order=1`` gives the z-derivative).

    Summation stops once three consecutive terms fall below
    ``tol_series * |partial sum|`` or the coefficient list ends.
    ``extended=True`` returns the unrounded extended-precision sum.
    """
    if coeffs.kind != "frobenius-c":
        raise ValueError(f"expected frobenius-c coefficients, got {coeffs.kind}")
    if order not in (0, 1):
        raise ValueError("order must be 0 or 1")
    x = params.s * EXT(z)
    c = coeffs.values
    limit = min(c.size, cfg.max_terms)
    total = EXT(0)
    finish = (lambda v: v) if extended else complex
    small = 0
    mags = [0.0, 0.0]
    for n in range(order, limit):
        if order == 0:
            term = c[n] * x**n
        else:
            term = n * c[n] * params.s * x ** (n - 1)
        total += term
        mags = [mags[1], abs(term)]
        if abs(term) < cfg.tol_series * abs(total):
            small += 1
            if small >= 3:
                return finish(total)
        else:
            small = 0
    if c.size > cfg.max_terms and mags[1] > mags[0]:
        raise NonConvergence(f"Frobenius series still growing after {cfg.max_terms} terms at z={complex(z)}")
    return finish(total)


def tridiagonal_null_vector(diag, sup, sub, shift: complex):
    """Null vector of ``A - shift*I`` for tridiagonal A.

    Forward substitution from component 0 when every superdiagonal entry is
    nonzero; otherwise the smallest right singular vector. Returns
    ``(vector, normalized_at, flagged)``.
    """
    n = len(diag)
    scale = max([1.0] + [abs(x) for x in (*diag, *sup, *sub)])
    if all(abs(u) > 1e-13 * scale for u in sup):
        v = np.zeros(n, dtype=complex)
        v[0] = 1.0
        for i in range(n - 1):
            acc = (diag[i] - shift) * v[i]
            if i > 0:
                acc += sub[i - 1] * v[i - 1]
            v[i + 1] = -acc / sup[i]
        return v, 0, False
    A = np.diag(np.asarray(diag, dtype=complex) - shift)
    if n > 1:
        A += np.diag(np.asarray(sup, dtype=complex), 1) + np.diag(np.asarray(sub, dtype=complex), -1)
    _, _, vh = np.linalg.svd(A)
    v = vh[-1].conj()
    mags = np.abs(v)
    if mags[0] > 1e-8 * mags.max():
        return v / v[0], 0, False
    k = int(np.nonzero(mags > 1e-8 * mags.max())[0][0])
    return v / v[k], k, True


def tridiagonal_matrix(diag, sup, sub) -> np.ndarray:
    A = np.diag(np.asarray(diag, dtype=complex))
    if len(diag) > 1:
        A += np.diag(np.asarray(sup, dtype=complex), 1) + np.diag(np.asarray(sub, dtype=complex), -1)
    return A


def frobenius_spectrum(p0: complex, p1: complex, N: int, cfg: ToleranceConfig = DEFAULT_CONFIG) -> SpectrumResult:
    """Values of q0 for which the power series terminates at degree N (q1 = 2N).

    The minor is assembled row by row from the recurrence over
    ``(c_0, ..., c_N)``; ``-q0`` is one of its eigenvalues, so the returned
    characteristic polynomial is ``det(M + q0 I)``.
    """
    if N < 0:
        raise ValueError("N must be nonnegative")
    p0, p1 = complex(p0), complex(p1)
    diag = [n * p1 for n in range(N + 1)]
    sup = [(n + 1) * (n + p0) for n in range(N)]
    sub = [2 * (N - n) for n in range(N)]
    # det(M + q0 I) = det(q0 I - (-M))
    char = tridiagonal_charpoly([-x for x in diag], [-x for x in sup], [-x for x in sub])
    roots = poly_roots(char, cfg, expected_degree=N + 1)
    vectors = []
    for q0 in roots:
        v, k, flag = tridiagonal_null_vector(diag, sup, sub, -q0)
        vectors.append(CoefficientSeries(v, "frobenius-c", normalized_at=k, flagged=flag))
    return SpectrumResult(N, "frobenius", char, roots, vectors, tridiagonal_matrix(diag, sup, sub))
