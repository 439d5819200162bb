"""Complex-scalar kernels shared by the rest of the package.

Polynomials are stored with ascending-degree coefficients, matching
``numpy.polynomial.polynomial``.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import DegenerateLeadingCoefficient

logger = logging.getLogger(__name__)

TRIM_RELATIVE = 1e-14
POLE_TOL = 1e-12

# Lanczos approximation, g = 7, nine coefficients.
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical tolerances, all dimensionless.

    Attributes
    ----------
    tol_root : float
        Residual bound for polynomial roots, relative to ``1 + max|coeff|``.
    tol_series : float
        Relative size below which a series term counts as negligible.
    max_terms : int
        Hard cap on the number of series terms.
    tol_validate : float
        Pass threshold for ODE residuals and cross-representation deviations.
    """

    tol_root: float = 1e-10
    tol_series: float = 1e-15
    max_terms: int = 2000
    tol_validate: float = 1e-8

    def __post_init__(self):
        for name in ("tol_root", "tol_series", "tol_validate"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be strictly positive, got {value!r}")
        if int(self.max_terms) != self.max_terms or self.max_terms < 16:
            raise ValueError(f"max_terms must be an integer >= 16, got {self.max_terms!r}")

    def as_dict(self) -> dict:
        return {
            "tol_root": self.tol_root,
            "tol_series": self.tol_series,
            "max_terms": self.max_terms,
            "tol_validate": self.tol_validate,
        }


DEFAULT_CONFIG = ToleranceConfig()

# z-dependent sums run in extended precision (80-bit on x86) so that
# cancellation inside a series does not leak into finite differences.
EXT = np.clongdouble


def _as_coeff_array(coeffs) -> np.ndarray:
    arr = np.asarray(coeffs, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValueError("polynomial coefficients must be one-dimensional")
    return arr


@dataclass(frozen=True, eq=False)
class CPoly:
    """Polynomial with complex coefficients in ascending degree order.

    The zero polynomial is represented by an empty coefficient list after
    trimming and has degree -1.
    """

    coeffs: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeff_array(self.coeffs))

    @classmethod
    def from_roots(cls, roots: Iterable[complex], leading: complex = 1.0) -> "CPoly":
        roots = list(roots)
        if not roots:
            return cls([leading])
        return cls(leading * npoly.polyfromroots(np.asarray(roots, dtype=complex)))

    def trimmed(self) -> "CPoly":
        c = self.coeffs
        if c.size == 0:
            return self
        scale = np.max(np.abs(c))
        if scale == 0:
            return CPoly(np.zeros(0, dtype=complex))
        nonzero = np.nonzero(np.abs(c) > TRIM_RELATIVE * scale)[0]
        return CPoly(c[: nonzero[-1] + 1])

    @property
    def degree(self) -> int:
        return self.trimmed().coeffs.size - 1

    @property
    def leading(self) -> complex:
        t = self.trimmed().coeffs
        return complex(t[-1]) if t.size else 0j

    def monic(self) -> "CPoly":
        t = self.trimmed()
        if t.coeffs.size == 0:
            raise DegenerateLeadingCoefficient("the zero polynomial has no monic form")
        return CPoly(t.coeffs / t.coeffs[-1])

    def __call__(self, x):
        c = self.coeffs
        if c.size == 0:
            return 0j * np.asarray(x) if np.ndim(x) else 0j
        acc = c[-1] + 0 * np.asarray(x, dtype=complex)
        for a in c[-2::-1]:
            acc = acc * x + a
        return complex(acc) if np.ndim(acc) == 0 else acc

    def __add__(self, other: "CPoly") -> "CPoly":
        return CPoly(npoly.polyadd(self._nz(), _coerce(other)._nz()))

    def __sub__(self, other: "CPoly") -> "CPoly":
        return CPoly(npoly.polysub(self._nz(), _coerce(other)._nz()))

    def __mul__(self, other) -> "CPoly":
        if isinstance(other, CPoly):
            return CPoly(npoly.polymul(self._nz(), other._nz()))
        return CPoly(self.coeffs * complex(other))

    __rmul__ = __mul__

    def _nz(self) -> np.ndarray:
        return self.coeffs if self.coeffs.size else np.zeros(1, dtype=complex)

    def roots(self, cfg: ToleranceConfig = DEFAULT_CONFIG) -> list[complex]:
        return poly_roots(self, cfg)

    def __repr__(self):
        return f"CPoly({self.coeffs.tolist()!r})"


def _coerce(p) -> CPoly:
    return p if isinstance(p, CPoly) else CPoly([p])


def sort_key(z: complex) -> tuple[float, float]:
    return (z.real, z.imag)


def poly_roots(p: CPoly, cfg: ToleranceConfig = DEFAULT_CONFIG, expected_degree: int | None = None) -> list[complex]:
    """Roots of ``p`` with multiplicity, sorted by (real, imag).

    Companion-matrix eigenvalues polished by a few Newton steps on the
    original coefficients.
    """
    t = p.trimmed()
    deg = t.coeffs.size - 1
    if expected_degree is not None and deg < expected_degree:
        raise DegenerateLeadingCoefficient(
            f"leading coefficient below {TRIM_RELATIVE:g} x max|coeff|: degree {deg} < expected {expected_degree}"
        )
    if deg < 0:
        raise DegenerateLeadingCoefficient("the zero polynomial has no well-defined roots")
    if deg == 0:
        return []
    c = t.coeffs
    raw = npoly.polyroots(c)
    dp = CPoly(npoly.polyder(c))
    roots = []
    for r in raw:
        r = complex(r)
        fr = abs(t(r))
        for _ in range(8):
            d = dp(r)
            if d == 0 or fr == 0:
                break
            cand = r - t(r) / d
            fc = abs(t(cand))
            if fc >= fr:
                break
            r, fr = cand, fc
        roots.append(r)
    bound = cfg.tol_root * (1.0 + float(np.max(np.abs(c))))
    worst = max(abs(t(r)) for r in roots)
    if worst > bound:
        logger.warning("root residual %.3e exceeds bound %.3e (degree %d)", worst, bound, deg)
    return sorted(roots, key=sort_key)


def pochhammer(a: complex, k: int) -> complex:
    """Rising factorial ``a (a+1) ... (a+k-1)``; ``(a)_0 = 1``."""
    if k < 0:
        raise ValueError("pochhammer order must be nonnegative")
    out = 1.0 + 0j
    a = complex(a)
    for i in range(k):
        out *= a + i
    return out


def falling_factorial_poly(k: int) -> CPoly:
    """``x (x-1) ... (x-k+1)`` as a polynomial in x."""
    return CPoly.from_roots(range(k))


def rising_poly(a: complex, j: int) -> CPoly:
    """``(a + x)_j`` as a polynomial in x."""
    return CPoly.from_roots([-(a + i) for i in range(j)])


def _nonpositive_integer(z: complex, tol: float = POLE_TOL) -> bool:
    n = round(z.real)
    return n <= 0 and abs(z - n) < tol


def _lanczos_loggamma(z: complex) -> complex:
    # valid for Re z >= 0.5
    z = z - 1.0
    x = _LANCZOS_COEFFS[0]
    for i in range(1, len(_LANCZOS_COEFFS)):
        x += _LANCZOS_COEFFS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(x)


def recip_gamma(z: complex) -> complex:
    """Entire function ``1/Gamma(z)``, exactly zero at nonpositive integers."""
    z = complex(z)
    if _nonpositive_integer(z):
        return 0j
    if z.real < 0.5:
        # reflection: 1/Gamma(z) = Gamma(1-z) sin(pi z) / pi
        return cmath.exp(_lanczos_loggamma(1.0 - z)) * cmath.sin(math.pi * z) / math.pi
    return cmath.exp(-_lanczos_loggamma(z))


def gamma(z: complex) -> complex:
    """Gamma function; complex infinity at the poles."""
    r = recip_gamma(z)
    if r == 0:
        return complex(math.inf, 0.0)
    return 1.0 / r


def tridiagonal_charpoly(diag: Sequence[complex], sup: Sequence[complex], sub: Sequence[complex]) -> CPoly:
    """``det(x I - A)`` for a tridiagonal A, by the three-term cofactor recursion.

    ``sup[i] = A[i, i+1]`` and ``sub[i] = A[i+1, i]``.
    """
    prev = CPoly([1.0])
    cur = CPoly([-diag[0], 1.0])
    for k in range(1, len(diag)):
        nxt = CPoly([-diag[k], 1.0]) * cur - (complex(sup[k - 1]) * complex(sub[k - 1])) * prev
        prev, cur = cur, nxt
    return cur
