"""Independent checks: ODE residuals, direct integration, cross-comparison.

Nothing here knows how a representation was built; each is just a
callable ``z -> complex``.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .errors import NormalizationFailure, SingularPath
from .frobenius import BiconfluentParams
from .numerics import DEFAULT_CONFIG, EXT, ToleranceConfig

Representation = Callable[[complex], complex]

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


@dataclass
class ValidationReport:
    residual_max: float
    residual_points: list
    pairwise_dev: dict
    passed: bool
    tol_validate: float = DEFAULT_CONFIG.tol_validate
    residual_by_rep: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "residual_max": self.residual_max,
            "residual_points": [[[z.real, z.imag], r] for z, r in self.residual_points],
            "residual_by_representation": self.residual_by_rep,
            "pairwise_dev": self.pairwise_dev,
            "passed": self.passed,
            "tol_validate": self.tol_validate,
        }


def ode_residual(phi: Representation, params: BiconfluentParams, z: complex, h: float = 1e-3) -> complex:
    """Left side of the equation at z, derivatives by 5-point central differences.

    Normalized by ``max(1, |phi(z)|)``. The stencil spans ``z +- 2h`` along
    the real direction and must stay clear of the singular point z = 0.

    Stencil nodes are formed in extended precision, so a ``phi`` that
    accepts and returns extended values (see the ``extended`` flag of the
    evaluators) sees differencing noise far below double roundoff; a plain
    ``complex`` callable works as well.
    """
    if not 1e-6 <= h <= 1e-3:
        raise ValueError("step h must lie in [1e-6, 1e-3]")
    z = EXT(z)
    if abs(z) <= 2 * h:
        raise ValueError(f"z={complex(z)} is within the stencil width of the singular point 0")
    fm2, fm1, f0, fp1, fp2 = (phi(z + k * h) for k in (-2, -1, 0, 1, 2))
    d1 = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h)
    d2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h)
    s = params.s
    lhs = z * d2 + (params.p0 + params.p1 * s * z - 2 * s * s * z * z) * d1 + (params.q0 * s + params.q1 * s * s * z) * f0
    return complex(lhs / max(1.0, abs(f0)))


def _segment_distance_to_origin(z0: complex, z1: complex) -> float:
    d = z1 - z0
    if d == 0:
        return abs(z0)
    t = max(0.0, min(1.0, -((z0.conjugate() * d).real) / abs(d) ** 2))
    return abs(z0 + t * d)


def ode_reference_solve(
    params: BiconfluentParams,
    z0: complex,
    phi0: complex,
    dphi0: complex,
    z1: complex,
    steps: int = 2000,
    return_derivative: bool = False,
):
    """Integrate the equation along the straight segment z0 -> z1.

    Classical fourth-order Runge-Kutta with ``steps`` equal steps on the
    first-order system ``(F, F')``, accumulated in extended precision.

    Raises
    ------
    SingularPath
        If the segment comes within 1e-3 of z = 0.
    """
    if steps < 100:
        raise ValueError("steps must be at least 100")
    z0, z1 = EXT(z0), EXT(z1)
    if z1 == z0:
        return (complex(phi0), complex(dphi0)) if return_derivative else complex(phi0)
    if _segment_distance_to_origin(complex(z0), complex(z1)) < 1e-3:
        raise SingularPath(f"segment {complex(z0)} -> {complex(z1)} passes within 1e-3 of z=0")
    p0, p1, q0, q1, s = params.p0, params.p1, params.q0, params.q1, params.s

    def rhs(z, y, dy):
        d2 = -((p0 + p1 * s * z - 2 * s * s * z * z) * dy + (q0 * s + q1 * s * s * z) * y) / z
        return dy, d2

    h = (z1 - z0) / steps
    y, dy = EXT(phi0), EXT(dphi0)
    for i in range(steps):
        z = z0 + i * h
        k1y, k1d = rhs(z, y, dy)
        k2y, k2d = rhs(z + h / 2, y + h / 2 * k1y, dy + h / 2 * k1d)
        k3y, k3d = rhs(z + h / 2, y + h / 2 * k2y, dy + h / 2 * k2d)
        k4y, k4d = rhs(z + h, y + h * k3y, dy + h * k3d)
        y += h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y)
        dy += h / 6 * (k1d + 2 * k2d + 2 * k3d + k4d)
    return (complex(y), complex(dy)) if return_derivative else complex(y)


def reference_representation(params: BiconfluentParams, z0: complex, phi0: complex, dphi0: complex, steps: int = 2000) -> Representation:
    """A callable that integrates from fixed initial data at z0 to each z."""

    def rep(z):
        return ode_reference_solve(params, z0, phi0, dphi0, z, steps)

    return rep


def disc_points(center: complex, radius: float, count: int) -> list[complex]:
    """Deterministic, evenly spread points in a disc (sunflower pattern)."""
    return [
        complex(center) + radius * math.sqrt((i + 0.5) / count) * cmath.exp(1j * i * GOLDEN_ANGLE)
        for i in range(count)
    ]


def annulus_points(count: int, r_min: float = 0.1, r_max: float = 2.0) -> list[complex]:
    """Deterministic points with ``r_min <= |z| <= r_max``."""
    out = []
    for i in range(count):
        frac = (i + 0.5) / count
        r = math.sqrt(r_min**2 + frac * (r_max**2 - r_min**2))
        out.append(r * cmath.exp(1j * i * GOLDEN_ANGLE))
    return out


def relative_deviation(u: complex, v: complex) -> float:
    """``|u - v| / max(|u|, |v|, 1)``: relative above unit size, absolute below."""
    return float(abs(u - v) / max(abs(u), abs(v), 1.0))


def cross_validate(
    params: BiconfluentParams,
    representations: Sequence[Representation] | Mapping[str, Representation],
    center: complex,
    radius: float,
    count: int = 20,
    cfg: ToleranceConfig = DEFAULT_CONFIG,
    h: float = 1e-3,
    min_abs_z: float = 0.1,
) -> ValidationReport:
    """Compare representations of one solution over a disc.

    Each representation is rescaled to 1 at ``center`` first, since
    different constructions normalize differently. ODE residuals are taken
    at the sample points with ``|z| >= min_abs_z``.

    Raises
    ------
    NormalizationFailure
        If a representation nearly vanishes at the center.
    """
    if isinstance(representations, Mapping):
        named = dict(representations)
    else:
        named = {f"rep{i}": f for i, f in enumerate(representations)}
    if len(named) < 2:
        raise ValueError("cross_validate needs at least two representations")
    points = disc_points(center, radius, count)
    scaled = {}
    for name, f in named.items():
        c = f(EXT(center))
        if abs(c) < 1e-12:
            raise NormalizationFailure(f"representation {name!r} is ~0 at center {center}; choose another center")
        scaled[name] = [f(z) / c for z in points]
    pairwise = {}
    for a, b in itertools.combinations(named, 2):
        pairwise[f"{a}~{b}"] = max(relative_deviation(u, v) for u, v in zip(scaled[a], scaled[b]))
    residual_points = []
    by_rep = {}
    for name, f in named.items():
        worst = 0.0
        for z in points:
            if abs(z) < max(min_abs_z, 3 * h):
                continue
            r = abs(ode_residual(f, params, z, h))
            residual_points.append((z, r))
            worst = max(worst, r)
        by_rep[name] = worst
    residual_points.sort(key=lambda item: abs(item[0]))
    residual_max = max((r for _, r in residual_points), default=0.0)
    tol = cfg.tol_validate
    passed = residual_max <= tol and all(v <= tol for v in pairwise.values())
    return ValidationReport(residual_max, residual_points, pairwise, passed, tol, by_rep)
