"""Generalized hypergeometric series and shifted-parameter combinations.

A sum ``sum_n b_n pFq(a1 + n, a2, ...; g...; z)`` collapses into a single
``p+N F q+N`` whose extra parameter pairs ``(lam + 1; lam)`` come from the
roots of the shift polynomial built by :func:`combination_polynomial`.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import DegenerateParameter, DegenerateRoot, LowerParameterPole, NonConvergence, ZeroSum
from .numerics import (
    DEFAULT_CONFIG,
    EXT,
    CPoly,
    ToleranceConfig,
    falling_factorial_poly,
    pochhammer,
    poly_roots,
    sort_key,
)

logger = logging.getLogger(__name__)

PARAM_TOL = 1e-12
ROOT_POLE_TOL = 1e-10


@dataclass(frozen=True)
class HypergeomTerm:
    """One ``prefactor * xi**xi_power * pFq(upper; lower; xi**2)`` term.

    The trailing ``n_pairs`` entries of ``upper``/``lower`` are the
    ``(lam + 1; lam)`` pairs added by a shift combination. With
    ``scaled_pairs`` set, each pair is evaluated as ``lam * (lam+1)_k/(lam)_k
    = lam + k``, which stays finite at ``lam = 0``.
    """

    upper: tuple
    lower: tuple
    prefactor: complex = 1.0
    xi_power: int = 0
    n_pairs: int = 0
    scaled_pairs: bool = False

    def __post_init__(self):
        object.__setattr__(self, "upper", tuple(complex(a) for a in self.upper))
        object.__setattr__(self, "lower", tuple(complex(b) for b in self.lower))
        object.__setattr__(self, "prefactor", complex(self.prefactor))
        if self.xi_power not in (0, 1):
            raise ValueError("xi_power must be 0 or 1")
        if self.n_pairs > min(len(self.upper), len(self.lower)):
            raise ValueError("n_pairs exceeds the parameter lists")

    @property
    def p(self) -> int:
        return len(self.upper)

    @property
    def q(self) -> int:
        return len(self.lower)

    def replace(self, **changes) -> "HypergeomTerm":
        return dataclasses.replace(self, **changes)

    def at_xi(self, xi: complex, cfg: ToleranceConfig = DEFAULT_CONFIG, order: int = 0, extended: bool = False) -> complex:
        """``prefactor * xi**xi_power * F(xi**2)`` or its first xi-derivative.

        ``extended=True`` returns the unrounded extended-precision value.
        """
        if order not in (0, 1):
            raise ValueError("order must be 0 or 1")
        if self.prefactor == 0:
            return EXT(0) if extended else 0j
        xi = EXT(xi)
        x = xi * xi
        if order == 0:
            out = self.prefactor * (xi if self.xi_power else 1.0) * pfq_eval(self, x, cfg, extended=True)
        else:
            dF = pfq_eval(self, x, cfg, derivative=1, extended=True)
            if self.xi_power:
                out = self.prefactor * (pfq_eval(self, x, cfg, extended=True) + 2 * x * dF)
            else:
                out = self.prefactor * 2 * xi * dF
        return out if extended else complex(out)


@dataclass(frozen=True)
class CombinationInput:
    """A base term and weights ``b_0..b_N`` multiplying ``F(a1 + n, ...)``."""

    base: HypergeomTerm
    b: tuple

    def __post_init__(self):
        b = tuple(complex(x) for x in self.b)
        object.__setattr__(self, "b", b)
        if not b:
            raise ValueError("at least one weight is required")
        if not self.base.upper:
            raise ValueError("the base term needs an upper parameter to shift")
        if len(b) > 1 and b[-1] == 0:
            raise ValueError("leading weight b_N vanishes; drop it and lower N")
        N = len(b) - 1
        if N and pochhammer(self.alpha1, N) == 0:
            raise DegenerateParameter(f"(a1)_N vanishes for a1={self.alpha1}", factor="alpha1")

    @property
    def N(self) -> int:
        return len(self.b) - 1

    @property
    def alpha1(self) -> complex:
        return self.base.upper[0]


def _is_nonpositive_integer(z: complex, tol: float) -> bool:
    n = round(z.real)
    return n <= 0 and abs(z - n) < tol


def pfq_eval(
    term: HypergeomTerm, z: complex, cfg: ToleranceConfig = DEFAULT_CONFIG, derivative: int = 0, extended: bool = False
) -> complex:
    """Sum the Pochhammer series of ``term`` at ``z`` (prefactor not applied).

    ``derivative=m`` returns the m-th z-derivative by termwise
    differentiation. The sum stops once three consecutive terms are below
    ``tol_series * |partial sum|``; an upper parameter equal to ``-m``
    truncates it exactly after the ``z**m`` term.

    Raises
    ------
    LowerParameterPole
        If a lower parameter reaches a nonpositive integer before the
        series has truncated.
    NonConvergence
        For ``p > q + 1`` without truncation, or when ``max_terms`` is
        exhausted while terms still grow.
    """
    z = EXT(z)
    if term.scaled_pairs and term.n_pairs:
        upper = term.upper[: -term.n_pairs]
        lower = term.lower[: -term.n_pairs]
        lams = term.lower[-term.n_pairs :]
    else:
        upper, lower, lams = term.upper, term.lower, ()

    def weight(k):
        w = 1.0 + 0j
        for lam in lams:
            w *= lam + k
        return w

    truncates = any(_is_nonpositive_integer(a, PARAM_TOL) for a in upper)
    if len(upper) > len(lower) + 1 and not truncates and z != 0:
        raise NonConvergence(f"{len(upper)}F{len(lower)} series diverges for z != 0")

    m = derivative
    coef = EXT(1)  # Pochhammer ratio / k! at index k
    total = EXT(0)
    finish = (lambda v: v) if extended else complex
    small = 0
    mags = [0.0, 0.0]
    for k in range(cfg.max_terms):
        if k >= m:
            falling = 1.0
            for i in range(m):
                falling *= k - i
            zp = z ** (k - m) if k > m else 1.0
            t = coef * weight(k) * falling * zp
            total += t
            mags = [mags[1], abs(t)]
            if abs(t) < cfg.tol_series * abs(total) or (t == 0 and total == 0 and k > m):
                small += 1
                if small >= 3:
                    return finish(total)
            else:
                small = 0
        # advance coef to index k + 1
        num = 1.0 + 0j
        hit_zero = False
        for a in upper:
            if abs(a + k) < PARAM_TOL:
                hit_zero = True
            num *= a + k
        den = 1.0 + 0j
        for b in lower:
            if abs(b + k) < PARAM_TOL:
                if hit_zero:
                    return finish(total)
                raise LowerParameterPole(f"lower parameter {b} reaches a pole at k={k}")
            den *= b + k
        if hit_zero:
            return finish(total)
        coef = coef * num / (den * (k + 1))
    if mags[1] > mags[0]:
        raise NonConvergence(f"series still growing after {cfg.max_terms} terms at z={complex(z)}")
    logger.warning("pFq series hit max_terms=%d at z=%s without meeting the stopping rule", cfg.max_terms, complex(z))
    return finish(total)


def combination_polynomial(inp: CombinationInput) -> CPoly:
    """Shift polynomial ``g(x) = sum_n sum_k b_n C(n,k)/(a1)_k x(x-1)...(x-k+1)``.

    Its leading coefficient is ``b_N/(a1)_N`` and ``g(0) = sum(b)``; the
    negated roots are the ``lam_i`` of the combined term.
    """
    a1 = inp.alpha1
    N = inp.N
    weights = [0j] * (N + 1)  # weights[k] multiplies the k-th falling factorial
    for n, bn in enumerate(inp.b):
        for k in range(n + 1):
            weights[k] += bn * comb(n, k) / pochhammer(a1, k)
    g = CPoly([0j])
    for k, w in enumerate(weights):
        g = g + w * falling_factorial_poly(k)
    return g


def combine_shifted(inp: CombinationInput, cfg: ToleranceConfig = DEFAULT_CONFIG) -> HypergeomTerm:
    """Collapse ``sum_n b_n F(a1 + n, ...)`` into one term with N extra pairs.

    Raises
    ------
    ZeroSum
        When ``sum(b)`` vanishes. The exception's ``fallback`` carries the
        unnormalized form ``b_N/(a1)_N * prod(lam) * F``, built with
        ``scaled_pairs`` so it evaluates finitely.
    DegenerateRoot
        When some ``lam`` lies on a nonpositive integer.
    """
    base = inp.base
    if base.scaled_pairs:
        raise ValueError("cannot combine on top of a scaled-pair term")
    N = inp.N
    total = sum(inp.b)
    if N == 0:
        return base.replace(prefactor=base.prefactor * total)
    g = combination_polynomial(inp)
    lams = sorted((-r for r in poly_roots(g, cfg, expected_degree=N)), key=sort_key)
    upper = base.upper + tuple(lam + 1 for lam in lams)
    lower = base.lower + tuple(lams)
    scale = max(abs(x) for x in inp.b)
    if abs(total) <= 1e-12 * scale:
        fallback = HypergeomTerm(
            upper,
            lower,
            base.prefactor * inp.b[-1] / pochhammer(inp.alpha1, N),
            base.xi_power,
            n_pairs=base.n_pairs + N,
            scaled_pairs=True,
        )
        raise ZeroSum(f"weights sum to {total:.3e}; normalized form undefined", fallback=fallback)
    for lam in lams:
        if _is_nonpositive_integer(lam, ROOT_POLE_TOL):
            raise DegenerateRoot(f"shift root lambda={lam} is a nonpositive integer")
    return HypergeomTerm(upper, lower, base.prefactor * total, base.xi_power, n_pairs=base.n_pairs + N)


def explicit_shift_sum(inp: CombinationInput, z: complex, cfg: ToleranceConfig = DEFAULT_CONFIG) -> complex:
    """Left-hand side ``prefactor * sum_n b_n F(a1 + n, ...; z)``, term by term."""
    base = inp.base
    total = 0j
    for n, bn in enumerate(inp.b):
        shifted = base.replace(upper=(base.upper[0] + n,) + base.upper[1:], prefactor=1.0)
        total += bn * pfq_eval(shifted, z, cfg)
    return base.prefactor * total


def term_value(term: HypergeomTerm, z: complex, cfg: ToleranceConfig = DEFAULT_CONFIG) -> complex:
    """``prefactor * F(z)`` with z used directly as the series argument."""
    if term.prefactor == 0:
        return 0j
    return term.prefactor * pfq_eval(term, z, cfg)


def _random_disc(rng, size=None):
    r = np.sqrt(rng.uniform(0, 1, size))
    return r * np.exp(2j * np.pi * rng.uniform(0, 1, size))


def _clear_of_poles(values, margin: float) -> bool:
    return all(abs(v - round(v.real)) > margin or round(v.real) > 0 for v in values)


def _special_case_lams(b, a1) -> list[complex]:
    """Closed-form shift roots for one or two shifts."""
    if len(b) == 2:
        return [a1 * (1 + b[0] / b[1])]
    # quadratic in lam from the two-shift case, highest power first
    b0, b1, b2 = b
    lead = b2 / (a1 * (a1 + 1))
    coeffs = [lead, lead - (b1 + 2 * b2) / a1, b0 + b1 + b2]
    return sorted((complex(r) for r in np.roots(coeffs)), key=sort_key)


def shift_identity_suite(
    draws: int = 200, points: int = 5, seed: int = 0, cfg: ToleranceConfig = DEFAULT_CONFIG, margin: float = 0.1
) -> dict:
    """Check the shift-combination identity on random 1F1 bases.

    Every draw picks ``a1``, ``g`` and the weights in the unit disc, with
    N cycling through 1, 2, 3, and rejects draws whose lower parameters
    or shift roots come within ``margin`` of a nonpositive integer, or
    whose weights nearly cancel. For each accepted draw the left side is
    compared with the combined term at ``points`` random ``|z| <= 1``.

    Returns the max relative deviation per check: ``general`` (any N via
    :func:`combine_shifted`), ``one_shift`` and ``two_shift`` (closed-form
    roots for N = 1, 2), and ``root_formula`` (closed form vs computed roots).
    """
    rng = np.random.default_rng(seed)
    worst = {"general": 0.0, "one_shift": 0.0, "two_shift": 0.0, "root_formula": 0.0}
    counts = dict.fromkeys(worst, 0)
    accepted = 0
    while accepted < draws:
        N = 1 + accepted % 3
        a1, g = _random_disc(rng, 2)
        b = tuple(_random_disc(rng, N + 1))
        if not _clear_of_poles([complex(a1), complex(g)], margin) or abs(sum(b)) < margin * max(map(abs, b)):
            continue
        try:
            inp = CombinationInput(HypergeomTerm((a1,), (g,)), b)
            term = combine_shifted(inp, cfg)
        except (DegenerateParameter, DegenerateRoot):
            continue
        lams = term.lower[1:]
        if not _clear_of_poles(lams, margin):
            continue
        accepted += 1
        zs = _random_disc(rng, points)
        lhs = [explicit_shift_sum(inp, z, cfg) for z in zs]
        scale = [max(abs(v), 1e-300) for v in lhs]

        def dev(t):
            return max(abs(term_value(t, z, cfg) - v) / s for z, v, s in zip(zs, lhs, scale))

        worst["general"] = max(worst["general"], dev(term))
        counts["general"] += 1
        if N <= 2:
            closed = _special_case_lams(inp.b, inp.alpha1)
            gap = max(abs(x - y) / max(1.0, abs(y)) for x, y in zip(closed, sorted(lams, key=sort_key)))
            worst["root_formula"] = max(worst["root_formula"], gap)
            counts["root_formula"] += 1
            closed_term = HypergeomTerm(
                (a1,) + tuple(lam + 1 for lam in closed), (g,) + tuple(closed), sum(inp.b), n_pairs=N
            )
            key = "one_shift" if N == 1 else "two_shift"
            worst[key] = max(worst[key], dev(closed_term))
            counts[key] += 1
    return {"max_relative_deviation": worst, "checks": counts, "draws": draws, "points": points, "seed": seed}
