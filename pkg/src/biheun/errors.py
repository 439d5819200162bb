"""Exception types raised by the numerical kernels."""


class BiheunError(Exception):
    """Base class for all numerical failures reported by this package."""


class DegenerateLeadingCoefficient(BiheunError):
    pass


class IndicialCollision(BiheunError):
    """The zero-exponent Frobenius branch hits R_n = 0."""

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"indicial collision: R_n vanishes at n={index}")


class ResonantOrder(BiheunError):
    """The Hermite ladder has n + beta = 0 for some index n."""

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"resonant Hermite order: n + beta vanishes at n={index}")


class NonConvergence(BiheunError):
    pass


class LowerParameterPole(BiheunError):
    pass


class DegenerateRoot(BiheunError):
    """A shift root lambda sits on a nonpositive integer."""

    def __init__(self, message, group=None):
        self.group = group
        super().__init__(message if group is None else f"[{group}] {message}")


class ZeroSum(BiheunError):
    """The weights b_n sum to zero; ``fallback`` holds the unnormalized term."""

    def __init__(self, message, fallback=None, group=None):
        self.fallback = fallback
        self.group = group
        super().__init__(message if group is None else f"[{group}] {message}")


class DegenerateParameter(BiheunError):
    """A Pochhammer or gamma factor needed by a closed form vanishes or diverges."""

    def __init__(self, message, factor=None):
        self.factor = factor
        super().__init__(message)


class SingularPath(BiheunError):
    pass


class NormalizationFailure(BiheunError):
    pass
