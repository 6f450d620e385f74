"""Exception types shared across the package."""


class MvopError(Exception):
    """Base class for all errors raised by mvop."""


class SingularMatrix(MvopError, ArithmeticError):
    """A linear solve was requested on a non-invertible matrix."""


class GradeMismatch(MvopError, ValueError):
    """Two nonzero PiRational values with different powers of pi were added."""


class InvalidWeight(MvopError, ValueError):
    """A highest weight violates dominance, parity or interlacing constraints."""


class OutOfRange(MvopError, ValueError):
    """A family parameter (n, p, ell, d, w, delta) is outside its admissible range."""


class NonTruncating(MvopError, ValueError):
    """The hypergeometric series does not terminate at the requested degree."""


class InconsistentSystem(MvopError, ArithmeticError):
    """An exact linear system has no solution or no unique solution."""


class NormalizationImpossible(MvopError, ArithmeticError):
    """A polynomial cannot be normalized because its value at y = 1 vanishes."""


class DomainError(MvopError, ValueError):
    """A sample point lies outside the open interval where an operator is regular."""
