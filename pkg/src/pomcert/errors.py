"""Exception hierarchy.

Everything raised on purpose derives from :class:`PomError`.  The CLI maps
these onto exit code 1 (structural error); certification *failures* are
report entries, never exceptions.
"""


class PomError(Exception):
    """Base class for all library errors."""


class StructuralError(PomError):
    """An input object violates a structural invariant."""


class ResidualExceeded(StructuralError):
    def __init__(self, what: str, residual: float, tol: float):
        super().__init__(f"{what}: residual {residual:.3e} exceeds tolerance {tol:.3e}")
        self.residual = residual
        self.tol = tol


class DimensionMismatch(StructuralError):
    pass


class UnsupportedN(PomError):
    pass


class EigenFailure(PomError):
    pass


class NumericOverflow(PomError):
    pass


class InfeasibleLP(PomError):
    pass


class ParseError(PomError):
    pass


# extraction failures -------------------------------------------------------


class ExtractionError(PomError):
    """A step of the unitary extraction could not be carried out."""


class NonDichotomic(ExtractionError):
    pass


class UnbalancedSpectrum(ExtractionError):
    pass


class DiagonalLeakage(ExtractionError):
    pass


class NonUnitaryBlock(ExtractionError):
    pass


class HermiticityLost(ExtractionError):
    pass


class AnticommutationLost(ExtractionError):
    def __init__(self, message: str, pairs=()):
        super().__init__(message)
        self.pairs = list(pairs)


class DimensionNotDivisible(ExtractionError):
    pass


class NotAnticommuting(StructuralError):
    pass
