"""Exception hierarchy.

The CLI maps these onto exit codes: ``InputError`` subclasses exit with 2,
``NotInZError`` with 3 and ``AlgorithmInvariantError`` with 4.
"""

from __future__ import annotations


class FIClosureError(Exception):
    """Base class for every error raised by this package."""


class InputError(FIClosureError, ValueError):
    """Malformed or inconsistent input data."""


class FormatError(InputError):
    pass


class CompositionError(InputError):
    pass


class ActionError(InputError):
    pass


class EvaluationError(InputError):
    pass


class PolynomialKindError(InputError):
    """Arithmetic between ``matrix_x`` and ``tensor_y`` polynomials."""


class DiagonalEntryError(InputError):
    """An off-diagonal tensor was given an entry with a repeated index."""


class IndexRangeError(InputError):
    pass


class AxisError(InputError):
    pass


class OffDiagonalityError(InputError):
    """A requested minor touches the big diagonal."""


class DenseSizeError(InputError):
    """Dense materialization would exceed the configured cap."""


class EmbeddingError(InputError):
    pass


class WidthError(InputError):
    pass


class RowError(InputError):
    pass


class PushforwardError(InputError):
    pass


class SingularMatrixError(FIClosureError, ArithmeticError):
    pass


class NotInZError(FIClosureError):
    """The tensor has a nonzero off-diagonal (l+1)-minor.

    ``witness`` is the offending :class:`MembershipWitness`; ``component`` is
    the 1-based component index when raised from a product completion.
    """

    def __init__(self, message, witness=None, component=None):
        super().__init__(message)
        self.witness = witness
        self.component = component


class AlgorithmInvariantError(FIClosureError, AssertionError):
    """Internal consistency check failed. Should never happen."""
