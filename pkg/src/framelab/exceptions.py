"""Exception types raised by framelab."""


class FramelabError(Exception):
    """Base class for all framelab errors."""


class DimensionMismatchError(FramelabError, ValueError):
    """Array shapes do not conform to the ambient dimension."""


class InvariantViolation(FramelabError, ValueError):
    """A domain-type invariant failed during construction or loading.

    ``invariant`` names the failed check (e.g. ``"involution"``) and
    ``path`` locates the offending field in an input document, if any.
    """

    def __init__(self, invariant, message, path=None):
        self.invariant = invariant
        self.path = path
        where = f" at {path}" if path else ""
        super().__init__(f"{invariant}{where}: {message}")


class NonOrthogonalBasisError(InvariantViolation):
    def __init__(self, message, path=None):
        super().__init__("orthonormal_basis", message, path)


class ZeroVectorError(FramelabError, ValueError):
    """Operation is undefined for the zero vector."""


class NotAFrameError(FramelabError):
    """The family has no positive lower frame bound."""


class ProjectionInvalidError(FramelabError, ValueError):
    """Matrix is not an orthogonal projection."""


class CommutationFailureError(FramelabError, ValueError):
    """Projection does not commute with the fundamental symmetry."""


class KernelNotTrivialError(FramelabError, ValueError):
    """Gram operator has a (numerically) nontrivial kernel."""


class ZeroWeightError(KernelNotTrivialError):
    """A multiplication weight vanishes at some grid point."""


class NonMonotoneError(FramelabError, ValueError):
    """A sweep parameter list is not strictly monotone."""


class EnvelopeViolation(FramelabError):
    """A degradation sample broke its theoretical envelope."""


class ParseError(FramelabError, ValueError):
    """An input document could not be parsed."""


class ConditioningWarning(UserWarning):
    """The Gram operator is badly conditioned; transferred bounds lose digits."""
