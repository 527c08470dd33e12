"""Exception types raised on violated preconditions."""


class VarmonoError(ValueError):
    pass


class InvalidSample(VarmonoError):
    """Values or weights cannot form a probability-weighted sample."""


class NegativeValue(VarmonoError):
    pass


class NonpositiveValue(VarmonoError):
    pass


class NonpositiveExponent(VarmonoError):
    pass


class ExponentOrder(VarmonoError):
    """Raised when 0 < r < s < p fails."""


class ExponentRange(VarmonoError):
    pass


class ZeroSample(VarmonoError):
    pass


class TooFewPoints(VarmonoError):
    pass


class InvalidStart(VarmonoError):
    """The start sample of a local search does not satisfy the target's preconditions."""
