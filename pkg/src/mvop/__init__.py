"""Exact construction and verification of matrix-valued orthogonal polynomials
arising from spherical functions on (SO(n+1), SO(n))."""

from .errors import (
    DomainError,
    GradeMismatch,
    InconsistentSystem,
    InvalidWeight,
    MvopError,
    NonTruncating,
    NormalizationImpossible,
    OutOfRange,
    SingularMatrix,
)
from .families import (
    SolvedPolynomial,
    SphericalFamily,
    build_family,
    build_family_top,
    build_scalar_family,
    construct_P,
    weight_poly,
)
from .numeric import MatPoly, Matrix, PiRational, Rational
from .spectra import EigKey, HighestWeight

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "GradeMismatch",
    "InconsistentSystem",
    "InvalidWeight",
    "MvopError",
    "NonTruncating",
    "NormalizationImpossible",
    "OutOfRange",
    "SingularMatrix",
    "SolvedPolynomial",
    "SphericalFamily",
    "build_family",
    "build_family_top",
    "build_scalar_family",
    "construct_P",
    "weight_poly",
    "MatPoly",
    "Matrix",
    "PiRational",
    "Rational",
    "EigKey",
    "HighestWeight",
]
