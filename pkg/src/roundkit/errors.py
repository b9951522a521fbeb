"""Exception types shared across the package."""


class RoundkitError(Exception):
    """Base class for all package errors."""


class RankDeficient(RoundkitError):
    """Input vectors are numerically dependent."""


class DimensionMismatch(RoundkitError):
    """Operands live in different ambient dimensions."""


class SingularMap(RoundkitError):
    """Linear map is not invertible to working precision."""


class NonFiniteGauge(RoundkitError):
    """A gauge evaluation returned 0, inf, or NaN (degenerate body)."""


class Degenerate(RoundkitError):
    """Point set does not span the ambient space."""


class UnsupportedRepresentation(RoundkitError):
    """Operation has no path for this body representation."""


class InnerContainmentFailed(RoundkitError):
    """Probing found a boundary point of the ellipsoid outside the body."""


class SearchExhausted(RoundkitError):
    """Randomized subspace search hit its trial budget."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class WitnessViolated(RoundkitError):
    """A measured volume ratio exceeded its certified bound beyond 3 sigma."""


class BoundViolated(RoundkitError):
    """A measured roundness exceeded the guaranteed bound."""


class FrameMismatch(RoundkitError):
    """Body reconstructed from a certificate frame disagrees with the pipeline body."""
