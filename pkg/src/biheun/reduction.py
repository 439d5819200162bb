"""Four-term generalized-hypergeometric form of a terminated Hermite expansion.

Expanding each ``H_{beta+n}(xi)`` into its two Kummer functions of
``xi**2`` and grouping by parity of n gives four families of Kummer
functions whose first upper parameter steps by integers:

=======  ===========  =====================  =====  ======
group    d indices    first upper parameter  lower  xi
=======  ===========  =====================  =====  ======
C'       even         -beta/2 - N'            1/2    no
D'       even         1/2 - beta/2 - N'       3/2    yes
C''      odd          -beta/2 - 1/2 - N''     1/2    no
D''      odd          -beta/2 - N''           3/2    yes
=======  ===========  =====================  =====  ======

with ``N' = N // 2`` and ``N'' = (N - 1) // 2``. Each family collapses to
one ``pFq`` via :func:`biheun.hypergeom.combine_shifted`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DegenerateParameter, DegenerateRoot, ZeroSum
from .frobenius import BiconfluentParams, CoefficientSeries
from .hermite import SQRT_PI, HermiteExpansion, _pow2, hermite_at_zero
from .hypergeom import CombinationInput, HypergeomTerm, combination_polynomial, combine_shifted
from .numerics import DEFAULT_CONFIG, EXT, CPoly, ToleranceConfig, gamma, pochhammer, recip_gamma, rising_poly

GROUP_LABELS = ("C'", "D'", "C''", "D''")
ROOT_LABELS = ("lambda'", "mu'", "lambda''", "mu''")


def n_prime(N: int) -> int:
    return N // 2


def n_dprime(N: int) -> int:
    return (N - 1) // 2


@dataclass(frozen=True)
class _Group:
    label: str
    n_max: int
    alpha: complex  # first upper parameter of the n = 0 member
    lower: float
    xi_power: int
    sign: int
    gamma_arg: complex  # 1/Gamma(gamma_arg + n) weights member n
    exp2: complex  # power of 2 in the n = 0 weight
    odd: bool

    def d_index(self, n: int) -> int:
        return 2 * self.n_max - 2 * n + (1 if self.odd else 0)


def _groups(beta: complex, N: int) -> list[_Group]:
    Np, Npp = n_prime(N), n_dprime(N)
    return [
        _Group("C'", Np, -beta / 2 - Np, 0.5, 0, 1, 0.5 - beta / 2 - Np, beta + 2 * Np, False),
        _Group("D'", Np, 0.5 - beta / 2 - Np, 1.5, 1, -1, -beta / 2 - Np, beta + 1 + 2 * Np, False),
        _Group("C''", Npp, -beta / 2 - 0.5 - Npp, 0.5, 0, 1, -beta / 2 - Npp, beta + 1 + 2 * Npp, True),
        _Group("D''", Npp, -beta / 2 - Npp, 1.5, 1, -1, -beta / 2 - 0.5 - Npp, beta + 2 + 2 * Npp, True),
    ]


def _raw_weights(group: _Group, d: np.ndarray) -> list[complex]:
    # pole-safe: each member's own 1/Gamma, no common factor pulled out
    return [
        d[group.d_index(n)] * _pow2(group.exp2 - 2 * n) * SQRT_PI * recip_gamma(group.gamma_arg + n)
        for n in range(group.n_max + 1)
    ]


def _normalized_weights(group: _Group, d: np.ndarray) -> tuple[complex, list[complex]]:
    """Common prefactor and the weights left after pulling it out."""
    pref = _pow2(group.exp2) * SQRT_PI * recip_gamma(group.gamma_arg)
    b = []
    for n in range(group.n_max + 1):
        den = 4**n * pochhammer(group.gamma_arg, n)
        if den == 0:
            raise DegenerateParameter(
                f"[{group.label}] Pochhammer factor ({group.gamma_arg})_{n} vanishes", factor=f"{group.label}:({group.gamma_arg})_{n}"
            )
        b.append(d[group.d_index(n)] / den)
    return pref, b


def _trim(b: list[complex]) -> list[complex]:
    if not b:
        return b
    scale = max(abs(x) for x in b)
    if scale == 0:
        return []
    b = list(b)
    while len(b) > 1 and abs(b[-1]) <= 1e-14 * scale:
        b.pop()
    return b


@dataclass(frozen=True, eq=False)
class SplitCoefficients:
    """Taylor coefficients in ``xi`` and their even-/odd-index-d parts.

    ``route`` records how ``c_prime``/``c_dprime`` were obtained: ``"closed"``
    for the Pochhammer closed forms, ``"direct"`` when a gamma pole forced
    the parity-restricted gamma sums instead.
    """

    c_tilde: CoefficientSeries
    c_prime: CoefficientSeries
    c_dprime: CoefficientSeries
    N_prime: int
    N_dprime: int
    beta: complex
    route: str = "closed"


class StructurePolynomials(NamedTuple):
    phi: CPoly
    psi: CPoly
    g1: CPoly
    h1: CPoly
    g2: CPoly
    h2: CPoly


def _ctilde(exp: HermiteExpansion, k_max: int, parity: int | None = None) -> np.ndarray:
    # Taylor coefficients of sum_j d_j H_{beta+j} at xi = 0, from H^(k) = 2^k nu..(nu-k+1) H_{nu-k}
    beta = exp.beta
    out = np.zeros(k_max + 1, dtype=complex)
    for j, dj in enumerate(exp.d.values):
        if dj == 0 or (parity is not None and j % 2 != parity):
            continue
        nu = beta + j
        for k in range(k_max + 1):
            out[k] += dj * pochhammer(-nu, k) * (-2.0) ** k / math.factorial(k) * hermite_at_zero(nu - k)
    return out


def _phi_sum(a: complex, B: complex, d: np.ndarray, idx, jmax: int, z: complex) -> complex:
    total = 0j
    for j in range(jmax + 1):
        den = pochhammer(B, 2 * j)
        if den == 0:
            raise DegenerateParameter(f"Pochhammer factor ({B})_{2 * j} vanishes", factor=f"({B})_{2 * j}")
        total += pochhammer(a + z, j) / den * d[idx(j)]
    return total


def _closed_split(exp: HermiteExpansion, k_max: int) -> tuple[np.ndarray, np.ndarray]:
    beta, N, d = exp.beta, exp.N, exp.d.values
    Np, Npp = n_prime(N), n_dprime(N)
    cp = np.zeros(k_max + 1, dtype=complex)
    cpp = np.zeros(k_max + 1, dtype=complex)

    def fill(out, a_poly, a_even, a_odd, B, jmax, idx, shift_even, shift_odd):
        inv_B = recip_gamma(B)
        g_even, g_odd = gamma(a_even), gamma(a_odd)
        if not (np.isfinite(g_even) and np.isfinite(g_odd)):
            raise DegenerateParameter("gamma pole in split prefactor", factor="split-gamma")
        for k in range(k_max + 1):
            m, odd = divmod(k, 2)
            if odd:
                pre = g_odd * inv_B / 2 * pochhammer(a_odd, m)
                z = m + shift_odd
            else:
                pre = g_even * inv_B / 2 * pochhammer(a_even, m)
                z = m + shift_even
            out[k] = pre * (-2.0) ** k / math.factorial(k) * _phi_sum(a_poly, B, d, idx, jmax, z)

    a = -beta / 2 - Np
    fill(cp, a, a, a + 0.5, -beta - 2 * Np, Np, lambda j: 2 * Np - 2 * j, 0.0, 0.5)
    if Npp >= 0:
        a = -beta / 2 - Npp
        fill(cpp, a, a - 0.5, a, -1 - beta - 2 * Npp, Npp, lambda j: 2 * Npp - 2 * j + 1, -0.5, 0.0)
    return cp, cpp


def shifted_power_coefficients(exp: HermiteExpansion, k_max: int = 40) -> SplitCoefficients:
    """Coefficients of the solution in powers of ``xi = s z - p1/2``.

    ``c_tilde`` comes from the Taylor series of each Hermite function; the
    even and odd parts come from their Pochhammer closed forms, so
    ``c_tilde = c_prime + c_dprime`` is a genuine cross-check.
    """
    N = exp.N
    ct = _ctilde(exp, k_max)
    route = "closed"
    try:
        cp, cpp = _closed_split(exp, k_max)
    except DegenerateParameter:
        route = "direct"
        cp, cpp = _ctilde(exp, k_max, parity=0), _ctilde(exp, k_max, parity=1)
    return SplitCoefficients(
        CoefficientSeries(ct, "shifted-ctilde"),
        CoefficientSeries(cp, "split-cprime"),
        CoefficientSeries(cpp, "split-cdoubleprime"),
        n_prime(N),
        n_dprime(N),
        exp.beta,
        route,
    )


def seed_values(exp: HermiteExpansion) -> dict:
    """Closed forms of the first two coefficients of each series."""
    beta, N, d = exp.beta, exp.N, exp.d.values
    Np, Npp = n_prime(N), n_dprime(N)
    ct0 = sum(d[j] * SQRT_PI * _pow2(beta + j) * recip_gamma(0.5 - beta / 2 - j / 2) for j in range(N + 1))
    ct1 = -sum(d[j] * SQRT_PI * _pow2(1 + beta + j) * recip_gamma(-beta / 2 - j / 2) for j in range(N + 1))
    even = lambda a: sum((-4) ** j * d[2 * j] * pochhammer(a, j) for j in range(Np + 1))
    odd = lambda a: sum((-4) ** j * d[2 * j + 1] * pochhammer(a, j) for j in range(Npp + 1))
    return {
        "ctilde0": ct0,
        "ctilde1": ct1,
        "cprime0": SQRT_PI * _pow2(beta) * recip_gamma(0.5 - beta / 2) * even(0.5 + beta / 2),
        "cprime1": -SQRT_PI * _pow2(1 + beta) * recip_gamma(-beta / 2) * even(1 + beta / 2),
        "cdprime0": SQRT_PI * _pow2(1 + beta) * recip_gamma(-beta / 2) * odd(1 + beta / 2),
        "cdprime1": -SQRT_PI * _pow2(2 + beta) * recip_gamma(-0.5 - beta / 2) * odd(1.5 + beta / 2),
    }


def structure_polynomials(exp: HermiteExpansion) -> StructurePolynomials:
    """phi, psi and the four shift polynomials g', h', g'', h''.

    phi and psi govern the two-term ratios of the split coefficients; the
    negated roots of g', h', g'', h'' are the extra parameters of the four
    combined terms. Families that do not exist (N = 0 has no odd d) give
    the zero polynomial.

    Raises
    ------
    DegenerateParameter
        If a Pochhammer denominator vanishes; the offending factor is named.
    """
    beta, N, d = exp.beta, exp.N, exp.d.values
    Np, Npp = n_prime(N), n_dprime(N)

    def ratio_poly(a, B, jmax, idx):
        p = CPoly([0j])
        for j in range(jmax + 1):
            den = pochhammer(B, 2 * j)
            if den == 0:
                raise DegenerateParameter(f"Pochhammer factor ({B})_{2 * j} vanishes", factor=f"({B})_{2 * j}")
            p = p + (d[idx(j)] / den) * rising_poly(a, j)
        return p

    phi = ratio_poly(-beta / 2 - Np, -beta - 2 * Np, Np, lambda j: 2 * Np - 2 * j)
    psi = CPoly([]) if Npp < 0 else ratio_poly(-beta / 2 - Npp, -1 - beta - 2 * Npp, Npp, lambda j: 2 * Npp - 2 * j + 1)

    shift_polys = []
    for group in _groups(beta, N):
        if group.n_max < 0:
            shift_polys.append(CPoly([]))
            continue
        _, b = _normalized_weights(group, d)
        b = _trim(b)
        if not b:
            shift_polys.append(CPoly([]))
            continue
        base = HypergeomTerm((group.alpha,), (group.lower,), 1.0, group.xi_power)
        try:
            shift_polys.append(combination_polynomial(CombinationInput(base, tuple(b))))
        except DegenerateParameter as err:
            raise DegenerateParameter(f"[{group.label}] {err}", factor=f"{group.label}:{err.factor}") from err
    return StructurePolynomials(phi, psi, *shift_polys)


@dataclass(frozen=True)
class RecurrenceReport:
    """Max relative deviation of each two-term ratio identity."""

    max_deviation: dict
    checked: dict
    skipped: dict

    def passed(self, tol: float) -> bool:
        return all(v <= tol for v in self.max_deviation.values())


def _negligible(poly: CPoly, z: float) -> bool:
    val = abs(poly(z))
    scale = sum(abs(c) * abs(z) ** i for i, c in enumerate(poly.coeffs))
    return val <= 1e-13 * scale


def check_two_term_recurrences(split: SplitCoefficients, phi: CPoly, psi: CPoly, k_max: int = 30) -> RecurrenceReport:
    """Compare consecutive same-parity coefficient ratios with their closed forms.

    A ratio is skipped when its denominator coefficient is exactly zero or
    the phi/psi value in the denominator is negligible (below 1e-13 of its
    own term scale), since the ratio is then undefined.
    """
    a1 = -split.beta / 2 - split.N_prime
    a2 = -split.beta / 2 - split.N_dprime
    cp, cpp = split.c_prime.values, split.c_dprime.values
    length = min(cp.size, cpp.size)
    checks = {
        # name: (series, offset, factor numerator shift, factor denominator shift, poly, arg shift num, arg shift den)
        "even_cprime": (cp, 0, a1, 0.5, phi, 1.0, 0.0),
        "odd_cprime": (cp, 1, a1 + 0.5, 1.5, phi, 1.5, 0.5),
        "even_cdprime": (cpp, 0, a2 - 0.5, 0.5, psi, 0.5, -0.5),
        "odd_cdprime": (cpp, 1, a2, 1.5, psi, 1.0, 0.0),
    }
    devs, counts, skips = {}, {}, {}
    for name, (c, off, a, half, poly, znum, zden) in checks.items():
        worst, n_ok, n_skip = 0.0, 0, 0
        empty = poly.coeffs.size == 0 or not np.any(c)
        for k in range(k_max + 1):
            i_den, i_num = 2 * k + off, 2 * k + 2 + off
            if empty or i_num >= length:
                break
            if c[i_den] == 0 or _negligible(poly, k + zden):
                n_skip += 1
                continue
            predicted = (a + k) / ((k + 1) * (k + half)) * poly(k + znum) / poly(k + zden)
            actual = c[i_num] / c[i_den]
            scale = max(abs(predicted), abs(actual))
            worst = max(worst, abs(actual - predicted) / scale if scale else 0.0)
            n_ok += 1
        devs[name], counts[name], skips[name] = worst, n_ok, n_skip
    return RecurrenceReport(devs, counts, skips)


@dataclass(frozen=True, eq=False)
class HypergeomCombination:
    """``F(z) = sum_i terms[i].prefactor * xi**xi_power * pFq(...; xi**2)``.

    ``terms`` are ordered C', D', C'', D''; D-terms carry their minus sign in
    the prefactor. ``constants`` holds the unsigned group constants, and
    ``shift_roots`` the extra parameters lambda', mu', lambda'', mu''.
    A family that is absent or whose weights all vanish keeps a term with
    prefactor 0.
    """

    terms: tuple
    params: BiconfluentParams
    N: int
    constants: dict
    shift_roots: dict
    zero_sum_groups: tuple = field(default_factory=tuple)

    def xi(self, z):
        return self.params.xi(z)

    def __call__(self, z, cfg: ToleranceConfig = DEFAULT_CONFIG):
        return evaluate_combination(self, z, cfg)


def build_ghg_solution(exp: HermiteExpansion, cfg: ToleranceConfig = DEFAULT_CONFIG) -> HypergeomCombination:
    """Collapse each Kummer family of the expansion into one generalized
    hypergeometric term.

    Member weights keep their own reciprocal gamma factor, so a family
    whose common gamma factor sits on a pole still combines correctly and
    a family whose weights all vanish drops out.

    Raises
    ------
    DegenerateRoot, DegenerateParameter
        With the offending group label in the message.
    """
    d = exp.d.values
    terms, constants, roots, zero_sum = [], {}, {}, []
    for group, root_label in zip(_groups(exp.beta, exp.N), ROOT_LABELS):
        empty = HypergeomTerm((group.alpha,), (group.lower,), 0.0, group.xi_power)
        w = _trim(_raw_weights(group, d)) if group.n_max >= 0 else []
        if not w:
            terms.append(empty)
            constants[group.label] = 0j
            roots[root_label] = []
            continue
        base = HypergeomTerm((group.alpha,), (group.lower,), group.sign, group.xi_power)
        try:
            term = combine_shifted(CombinationInput(base, tuple(w)), cfg)
        except ZeroSum as err:
            term = err.fallback
            zero_sum.append(group.label)
        except DegenerateRoot as err:
            raise DegenerateRoot(str(err), group=group.label) from err
        except DegenerateParameter as err:
            raise DegenerateParameter(f"[{group.label}] {err}", factor=f"{group.label}:{err.factor}") from err
        terms.append(term)
        constants[group.label] = complex(sum(w))
        roots[root_label] = list(term.lower[len(term.lower) - term.n_pairs :]) if term.n_pairs else []
    return HypergeomCombination(tuple(terms), exp.params, exp.N, constants, roots, tuple(zero_sum))


def evaluate_combination(
    comb: HypergeomCombination, z: complex, cfg: ToleranceConfig = DEFAULT_CONFIG, order: int = 0, extended: bool = False
) -> complex:
    """Sum the four terms at ``xi = s z - p1/2``; ``order=1`` gives d/dz.

    ``extended=True`` returns the unrounded extended-precision value.
    """
    xi = comb.xi(EXT(z))
    total = sum(term.at_xi(xi, cfg, order, extended=True) for term in comb.terms)
    total = total * (comb.params.s if order == 1 else 1.0)
    return total if extended else complex(total)
