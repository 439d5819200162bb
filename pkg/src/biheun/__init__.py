"""Solutions of the biconfluent Heun equation in three representations.

Power series about z = 0, finite sums of Hermite functions, and four-term
combinations of generalized hypergeometric functions, together with the
eigenvalue problems that decide when the finite forms exist and oracles
that check them against each other.
"""

__version__ = "0.1.0"

from .errors import (
    BiheunError,
    DegenerateLeadingCoefficient,
    DegenerateParameter,
    DegenerateRoot,
    IndicialCollision,
    LowerParameterPole,
    NonConvergence,
    NormalizationFailure,
    ResonantOrder,
    SingularPath,
    ZeroSum,
)
from .frobenius import (
    BiconfluentParams,
    CoefficientSeries,
    SpectrumResult,
    evaluate_frobenius,
    frobenius_coefficients,
    frobenius_spectrum,
)
from .hermite import (
    HermiteExpansion,
    evaluate_hermite_series,
    hermite_coefficients,
    hermite_eval,
    hermite_spectrum,
    power_reexpansion,
)
from .hypergeom import CombinationInput, HypergeomTerm, combination_polynomial, combine_shifted, pfq_eval
from .numerics import DEFAULT_CONFIG, CPoly, ToleranceConfig, gamma, poly_roots, recip_gamma
from .reduction import (
    HypergeomCombination,
    build_ghg_solution,
    check_two_term_recurrences,
    evaluate_combination,
    seed_values,
    shifted_power_coefficients,
    structure_polynomials,
)
from .validation import ValidationReport, cross_validate, ode_reference_solve, ode_residual
