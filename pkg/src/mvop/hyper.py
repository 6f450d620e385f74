"""Matrix hypergeometric coefficients, truncation, and terminating 2F1 polynomials."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Sequence

from .errors import NonTruncating, OutOfRange
from .numeric import MatPoly, Matrix, as_rational, mat_inverse, mat_kernel, spoly_trim

__all__ = [
    "HyperParams",
    "Truncation",
    "huv_coefficient",
    "huv_coefficients",
    "truncation_factor",
    "detect_truncation",
    "matrix_hyper_poly",
    "apply_D",
    "gauss_2f1_poly",
]


@dataclass(frozen=True)
class HyperParams:
    """The matrices (C, U, V) of ``DP = y(1-y)P'' + (C - yU)P' - VP``."""

    C: Matrix
    U: Matrix
    V: Matrix

    def __post_init__(self):
        m = self.C.rows
        if m not in (2, 3):
            raise ValueError("only 2x2 and 3x3 operators are supported")
        for M in (self.C, self.U, self.V):
            if M.shape != (m, m):
                raise ValueError("C, U and V must be square of the same size")

    @property
    def size(self) -> int:
        return self.C.rows

    @property
    def n(self) -> int:
        return int(self.U[0, 0]) - 2


@dataclass(frozen=True)
class Truncation:
    w: int
    kernel: list


def truncation_factor(params: HyperParams, lam, j: int) -> Matrix:
    """``j(U + j - 1) + V + lam``."""
    return (params.U.add_scalar(j - 1) * j + params.V).add_scalar(as_rational(lam))


def huv_coefficients(params: HyperParams, lam, upto: int) -> list[Matrix]:
    """``[C;U;V+lam]_j`` for j = 0..upto, via (C+j)^{-1} (j(U+j-1)+V+lam) [..]_j."""
    out = [Matrix.identity(params.size)]
    for j in range(upto):
        step = mat_inverse(params.C.add_scalar(j)) @ truncation_factor(params, lam, j)
        out.append(step @ out[-1])
    return out


def huv_coefficient(params: HyperParams, lam, j: int) -> Matrix:
    if j < 0:
        raise ValueError("j must be nonnegative")
    return huv_coefficients(params, lam, j)[j]


def detect_truncation(params: HyperParams, lam, j_max: int) -> Truncation | None:
    """Smallest j <= j_max at which the truncation factor is singular, with its kernel."""
    if j_max < 0:
        raise ValueError("j_max must be nonnegative")
    for j in range(j_max + 1):
        ker = mat_kernel(truncation_factor(params, lam, j))
        if ker:
            return Truncation(j, ker)
    return None


def matrix_hyper_poly(params: HyperParams, lam, P0: Sequence, w: int) -> MatPoly:
    """Degree-w vector polynomial ``sum_j y^j/j! [C;U;V+lam]_j P0``.

    Raises NonTruncating unless the factor at j = w kills ``[C;U;V+lam]_w P0``
    (the series then stops at degree w).
    """
    P0 = Matrix.column(P0)
    if P0.rows != params.size:
        raise ValueError("P0 has the wrong length")
    coeffs = huv_coefficients(params, lam, w)
    F = truncation_factor(params, lam, w)
    if not mat_kernel(F):
        raise NonTruncating(f"truncation factor is regular at j = {w}")
    if not (F @ coeffs[w] @ P0).is_zero():
        raise NonTruncating(f"series through P0 does not terminate at degree {w}")
    terms = [(c @ P0) * Fraction(1, factorial(j)) for j, c in enumerate(coeffs)]
    return MatPoly.from_coeffs(terms)


def apply_D(params: HyperParams, P: MatPoly) -> MatPoly:
    """``y(1-y)P'' + (C - yU)P' - VP``."""
    d1 = P.derivative(1)
    d2 = P.derivative(2)
    out = d2.mul_scalar_poly((0, 1, -1))
    out = out + d1.lmul(params.C) - d1.lmul(params.U).shift(1)
    return out - P.lmul(params.V)


def gauss_2f1_poly(a: int, b, c) -> tuple[Fraction, ...]:
    """Terminating 2F1(a, b; c; y) for a in {0, -1, -2, ...}, coefficients low degree first."""
    if int(a) != a or a > 0:
        raise OutOfRange(f"a must be a nonpositive integer, got {a}")
    a = int(a)
    b = as_rational(b)
    c = as_rational(c)
    if c.denominator == 1 and c <= 0:
        raise OutOfRange(f"c must not be a nonpositive integer, got {c}")
    coeffs = [Fraction(1)]
    term = Fraction(1)
    for k in range(-a):
        term = term * (a + k) * (b + k) / ((c + k) * (k + 1))
        coeffs.append(term)
    return spoly_trim(coeffs)
