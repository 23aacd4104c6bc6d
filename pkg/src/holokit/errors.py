"""Exception hierarchy.

Everything raised on purpose derives from HolokitError so callers (and the
CLI) can distinguish expected failures from genuine bugs.  Names mirror the
failure modes of the individual operations: arithmetic preconditions,
operator-algebra mismatches, guessing data shortages, and parse problems.
"""


class HolokitError(Exception):
    """Base class for all errors raised by this package."""


class ZeroPolynomial(HolokitError):
    """An operation that needs a nonzero polynomial received zero."""


class DuplicatePrime(HolokitError):
    """CRT input contained the same prime twice."""


class NoReconstruction(HolokitError):
    """No small fraction p/q exists below the rational-reconstruction bound."""


class ReconstructionFailed(HolokitError):
    """Modular solving could not be lifted to exact rationals."""


class UnluckyPrimeExhaustion(HolokitError):
    """Every prime in the working set had to be discarded as unlucky."""


class KindMismatch(HolokitError):
    """Ore operators of different kinds (or variables) were combined."""


class DivisionByZeroOperator(HolokitError):
    """Right division by the zero operator."""


class NotEnoughData(HolokitError):
    """Too few terms/coefficients for the requested operation."""


class InconsistentTerms(HolokitError):
    """Supplied terms are not rational or contradict a stated relation."""


class SingularSeed(HolokitError):
    """dP/dy vanishes at (0, seed): no unique power-series branch."""


class NotSquarefree(HolokitError):
    """Squarefree reduction of an annihilating polynomial failed."""


class AlreadyHomogeneous(HolokitError):
    """Homogenization requested for a relation with no inhomogeneous part."""


class ZeroRatio(HolokitError):
    """Geometric rescaling by ratio 0."""


class MissingInitialTerms(HolokitError):
    """Unrolling needs initial terms at indices the relation cannot produce.

    ``indices`` lists exactly which term indices must be supplied.
    """

    def __init__(self, indices, message=None):
        self.indices = list(indices)
        super().__init__(message or f"initial terms required at indices {self.indices}")


class InvalidParameter(HolokitError):
    """A named-series parameter is outside its allowed set."""


class ParseError(HolokitError):
    """Malformed textual input; carries a 1-based line number when known."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class NonContiguousIndices(HolokitError):
    """b-file indices must be contiguous and ascending."""
