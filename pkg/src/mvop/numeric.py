"""Exact scalars, small dense matrices and matrix-coefficient polynomials.

Every matrix here is tiny (at most 3x3 for the families, a few more rows for
stacked linear systems), so everything is dense and written out by hand.
Entries are either ``Fraction`` (exact mode) or ``float``/``complex``
(float mode); the arithmetic is shared between both.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Number
from typing import Iterable, Sequence

import numpy as np

from .errors import GradeMismatch, InconsistentSystem, SingularMatrix

Rational = Fraction
Scalar = Fraction | float | complex

__all__ = [
    "Rational",
    "PiRational",
    "Matrix",
    "MatPoly",
    "as_rational",
    "rational_str",
    "parse_rational",
    "mat_solve",
    "mat_inverse",
    "mat_kernel",
    "mat_rank",
    "mat_det",
    "solve_consistent",
    "poly_eval",
    "poly_derivative",
    "spoly_trim",
    "spoly_add",
    "spoly_mul",
    "spoly_scale",
    "spoly_deriv",
    "spoly_eval",
]


def as_rational(x) -> Fraction:
    """Convert ints, Fractions and decimal/ratio strings to ``Fraction``.

    Floats are rejected: silently importing binary64 rounding into the exact
    path is always a bug here.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def rational_str(q: Fraction) -> str:
    """Serialize as ``"p/q"``, or ``"p"`` when the denominator is 1."""
    return str(Fraction(q))


def parse_rational(s: str) -> Fraction:
    return Fraction(s.strip())


def _is_exact(x) -> bool:
    return isinstance(x, (Fraction, int)) and not isinstance(x, bool)


# ---------------------------------------------------------------------------
# q * pi**k
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PiRational:
    """Exact scalar ``coeff * pi**pi_power``.

    Beta moments are rational for even n and rational multiples of pi for odd
    n; the normalization constant contributes 1/pi for even n, so inner
    products of even-n families land on ``pi**-1``.
    """

    coeff: Fraction
    pi_power: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coeff", as_rational(self.coeff))
        if self.coeff == 0:
            object.__setattr__(self, "pi_power", 0)
        if self.pi_power not in (-1, 0, 1):
            raise ValueError(f"pi_power must be -1, 0 or 1, got {self.pi_power}")

    @classmethod
    def zero(cls) -> "PiRational":
        return cls(Fraction(0), 0)

    def is_zero(self) -> bool:
        return self.coeff == 0

    def __add__(self, other):
        if not isinstance(other, PiRational):
            other = PiRational(as_rational(other), 0)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.pi_power != other.pi_power:
            raise GradeMismatch(
                f"cannot add pi^{self.pi_power} and pi^{other.pi_power} terms"
            )
        return PiRational(self.coeff + other.coeff, self.pi_power)

    __radd__ = __add__

    def __neg__(self):
        return PiRational(-self.coeff, self.pi_power)

    def __sub__(self, other):
        if not isinstance(other, PiRational):
            other = PiRational(as_rational(other), 0)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, PiRational):
            return PiRational(self.coeff * other.coeff, self.pi_power + other.pi_power)
        return PiRational(self.coeff * as_rational(other), self.pi_power)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, PiRational):
            return PiRational(self.coeff / other.coeff, self.pi_power - other.pi_power)
        return PiRational(self.coeff / as_rational(other), self.pi_power)

    def __float__(self) -> float:
        return float(self.coeff) * float(np.pi) ** self.pi_power

    def sign(self) -> int:
        return (self.coeff > 0) - (self.coeff < 0)

    def to_json(self) -> dict:
        return {"q": rational_str(self.coeff), "pi": self.pi_power}

    @classmethod
    def from_json(cls, obj: dict) -> "PiRational":
        return cls(parse_rational(obj["q"]), int(obj["pi"]))

    def __str__(self) -> str:
        if self.pi_power == 0:
            return rational_str(self.coeff)
        return f"{rational_str(self.coeff)}*pi^{self.pi_power}"


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------


def _coerce_entry(x):
    if isinstance(x, bool):
        raise TypeError("bool entries are not allowed")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, (Fraction, float, complex)):
        return x
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, Number):
        return x
    raise TypeError(f"unsupported matrix entry {x!r}")


@dataclass(frozen=True)
class Matrix:
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if self.rows <= 0 or self.cols <= 0:
            raise ValueError("matrix dimensions must be positive")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entries length must equal rows*cols")

    # construction -------------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "Matrix":
        rows = [list(r) for r in rows]
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), ncols, tuple(_coerce_entry(x) for r in rows for x in r))

    @classmethod
    def column(cls, values: Iterable) -> "Matrix":
        vals = [_coerce_entry(v) for v in values]
        return cls(len(vals), 1, tuple(vals))

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "Matrix":
        cols = rows if cols is None else cols
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls.diag([1] * n)

    @classmethod
    def diag(cls, values: Sequence) -> "Matrix":
        n = len(values)
        ent = [Fraction(0)] * (n * n)
        for i, v in enumerate(values):
            ent[i * n + i] = _coerce_entry(v)
        return cls(n, n, tuple(ent))

    @classmethod
    def scalar(cls, n: int, value) -> "Matrix":
        return cls.diag([value] * n)

    # access --------------------------------------------------------------
    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def tolist(self) -> list[list]:
        return [list(self.row(i)) for i in range(self.rows)]

    def vector(self) -> tuple:
        """Entries of a single-column matrix."""
        if self.cols != 1:
            raise ValueError("not a column vector")
        return self.entries

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.entries)

    def is_exact(self) -> bool:
        return all(isinstance(x, Fraction) for x in self.entries)

    # arithmetic -------------------------------------------------------------
    def _check_same(self, other: "Matrix"):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        return Matrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        return Matrix(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "Matrix":
        return Matrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def __mul__(self, c) -> "Matrix":
        if isinstance(c, Matrix):
            raise TypeError("use @ for matrix products")
        c = _coerce_entry(c)
        return Matrix(self.rows, self.cols, tuple(a * c for a in self.entries))

    __rmul__ = __mul__

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        zero = Fraction(0) if self.is_exact() and other.is_exact() else 0.0
        out = []
        for i in range(self.rows):
            r = self.row(i)
            for j in range(other.cols):
                acc = zero
                for k in range(self.cols):
                    a = r[k]
                    if a:
                        acc += a * other.entries[k * other.cols + j]
                out.append(acc)
        return Matrix(self.rows, other.cols, tuple(out))

    def add_scalar(self, c) -> "Matrix":
        """``self + c*I`` (square only)."""
        if self.rows != self.cols:
            raise ValueError("add_scalar needs a square matrix")
        return self + Matrix.scalar(self.rows, c)

    @property
    def T(self) -> "Matrix":
        return Matrix(self.cols, self.rows,
                      tuple(self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)))

    def conj_T(self) -> "Matrix":
        return Matrix(self.cols, self.rows,
                      tuple(_conj(self.entries[i * self.cols + j])
                            for j in range(self.cols) for i in range(self.rows)))

    def to_float(self) -> "Matrix":
        return Matrix(self.rows, self.cols, tuple(_to_float(x) for x in self.entries))

    def to_numpy(self) -> np.ndarray:
        dtype = complex if any(isinstance(x, complex) for x in self.entries) else float
        return np.array([_to_float(x) for x in self.entries], dtype=dtype).reshape(self.rows, self.cols)

    def to_json(self) -> list[list[str]]:
        return [[rational_str(x) for x in self.row(i)] for i in range(self.rows)]

    @classmethod
    def from_json(cls, rows: list[list[str]]) -> "Matrix":
        return cls.from_rows([[parse_rational(x) for x in r] for r in rows])


def _conj(x):
    return x.conjugate() if isinstance(x, complex) else x


def _to_float(x):
    if isinstance(x, complex):
        return x
    return float(x)


# ---------------------------------------------------------------------------
# Linear algebra
# ---------------------------------------------------------------------------


def _rref(rows: list[list]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form with partial pivoting; returns (rows, pivot columns)."""
    m = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    exact = all(_is_exact(x) for r in m for x in r)
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        if exact:
            piv = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        else:
            piv = max(range(r, nrows), key=lambda i: abs(m[i][c]))
            if m[piv][c] == 0:
                piv = None
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [x / p for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def mat_rank(A: Matrix) -> int:
    _, piv = _rref(A.tolist())
    return len(piv)


def mat_det(A: Matrix):
    """Determinant by elimination (exact for rational entries)."""
    if A.rows != A.cols:
        raise ValueError("mat_det needs a square matrix")
    m = A.tolist()
    n = A.rows
    det = Fraction(1) if A.is_exact() else 1.0
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return det * 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        p = m[c][c]
        det = det * p
        for i in range(c + 1, n):
            f = m[i][c] / p
            if f:
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return det


def mat_solve(A: Matrix, b) -> tuple:
    """Solve ``A x = b`` for square invertible ``A``.

    ``b`` may be a sequence or a column Matrix. Raises SingularMatrix when A
    has a zero pivot (exactly zero in float mode too).
    """
    if A.rows != A.cols:
        raise ValueError("mat_solve needs a square matrix")
    bvec = b.vector() if isinstance(b, Matrix) else tuple(_coerce_entry(x) for x in b)
    if len(bvec) != A.rows:
        raise ValueError("right-hand side has the wrong length")
    aug = [list(A.row(i)) + [bvec[i]] for i in range(A.rows)]
    red, piv = _rref(aug)
    if piv != list(range(A.cols)):
        raise SingularMatrix(f"matrix of size {A.rows} is singular")
    return tuple(red[i][-1] for i in range(A.rows))


def mat_inverse(A: Matrix) -> Matrix:
    n = A.rows
    if n != A.cols:
        raise ValueError("mat_inverse needs a square matrix")
    aug = [list(A.row(i)) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    red, piv = _rref(aug)
    if piv[:n] != list(range(n)):
        raise SingularMatrix(f"matrix of size {n} is singular")
    return Matrix.from_rows([r[n:] for r in red])


def mat_kernel(A: Matrix) -> list[tuple[Fraction, ...]]:
    """Exact null-space basis of ``A``; empty iff A has full column rank.

    Each basis vector has a 1 in its free coordinate, as produced directly by
    back substitution from the reduced row echelon form.
    """
    red, piv = _rref(A.tolist())
    free = [c for c in range(A.cols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * A.cols
        v[f] = Fraction(1)
        for r, c in enumerate(piv):
            v[c] = -red[r][f]
        basis.append(tuple(v))
    return basis


def solve_consistent(rows: Sequence[Sequence], rhs: Sequence) -> tuple[Fraction, ...]:
    """Unique exact solution of a possibly overdetermined system.

    Raises InconsistentSystem if the system has no solution or more than one.
    """
    nunk = len(rows[0])
    aug = [list(r) + [rhs[i]] for i, r in enumerate(rows)]
    red, piv = _rref(aug)
    if nunk in piv:
        raise InconsistentSystem("system is inconsistent")
    if len(piv) < nunk:
        raise InconsistentSystem(f"system has rank {len(piv)} < {nunk} unknowns")
    sol = [Fraction(0)] * nunk
    for r, c in enumerate(piv):
        sol[c] = red[r][-1]
    return tuple(sol)


# ---------------------------------------------------------------------------
# Matrix-coefficient polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MatPoly:
    """Polynomial in y with ``rows x cols`` matrix coefficients, low degree first.

    Trailing zero coefficients are stripped, so the zero polynomial has an
    empty coefficient tuple and degree -1.
    """

    rows: int
    cols: int
    coeffs: tuple[Matrix, ...]

    def __post_init__(self):
        cs = list(self.coeffs)
        for c in cs:
            if c.shape != (self.rows, self.cols):
                raise ValueError("coefficient shape mismatch")
        while cs and cs[-1].is_zero():
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[Matrix]) -> "MatPoly":
        if not coeffs:
            raise ValueError("need at least one coefficient to infer the shape")
        return cls(coeffs[0].rows, coeffs[0].cols, tuple(coeffs))

    @classmethod
    def constant(cls, M: Matrix) -> "MatPoly":
        return cls(M.rows, M.cols, (M,))

    @classmethod
    def zero(cls, rows: int, cols: int) -> "MatPoly":
        return cls(rows, cols, ())

    @classmethod
    def from_columns(cls, cols: Sequence["MatPoly"]) -> "MatPoly":
        """Glue vector polynomials side by side into a matrix polynomial."""
        m = cols[0].rows
        deg = max(c.degree for c in cols)
        out = []
        for k in range(deg + 1):
            rows = [[c.coeff(k)[i, 0] for c in cols] for i in range(m)]
            out.append(Matrix.from_rows(rows))
        if not out:
            return cls.zero(m, len(cols))
        return cls(m, len(cols), tuple(out))

    @classmethod
    def from_entry_polys(cls, entries: Sequence[Sequence[Sequence]]) -> "MatPoly":
        """Build from a grid of scalar coefficient lists (low degree first)."""
        rows = len(entries)
        cols = len(entries[0])
        deg = max(len(e) for r in entries for e in r) - 1
        out = []
        for k in range(deg + 1):
            out.append(Matrix.from_rows(
                [[e[k] if k < len(e) else 0 for e in r] for r in entries]))
        return cls(rows, cols, tuple(out))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int) -> Matrix:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Matrix.zeros(self.rows, self.cols)

    def leading(self) -> Matrix:
        if not self.coeffs:
            return Matrix.zeros(self.rows, self.cols)
        return self.coeffs[-1]

    def entry(self, i: int, j: int) -> tuple:
        """Scalar coefficient list of entry (i, j)."""
        return spoly_trim(tuple(c[i, j] for c in self.coeffs))

    def __add__(self, other: "MatPoly") -> "MatPoly":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        n = max(len(self.coeffs), len(other.coeffs))
        return MatPoly(self.rows, self.cols, tuple(self.coeff(k) + other.coeff(k) for k in range(n)))

    def __neg__(self) -> "MatPoly":
        return MatPoly(self.rows, self.cols, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "MatPoly") -> "MatPoly":
        return self + (-other)

    def __mul__(self, c) -> "MatPoly":
        return MatPoly(self.rows, self.cols, tuple(m * c for m in self.coeffs))

    __rmul__ = __mul__

    def lmul(self, A: Matrix) -> "MatPoly":
        """``A @ P``."""
        return MatPoly(A.rows, self.cols, tuple(A @ c for c in self.coeffs))

    def rmul(self, A: Matrix) -> "MatPoly":
        """``P @ A``."""
        return MatPoly(self.rows, A.cols, tuple(c @ A for c in self.coeffs))

    def __matmul__(self, other: "MatPoly") -> "MatPoly":
        if self.cols != other.rows:
            raise ValueError("inner dimension mismatch")
        if self.is_zero() or other.is_zero():
            return MatPoly.zero(self.rows, other.cols)
        out = [Matrix.zeros(self.rows, other.cols)] * (self.degree + other.degree + 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a @ b
        return MatPoly(self.rows, other.cols, tuple(out))

    def mul_scalar_poly(self, s: Sequence) -> "MatPoly":
        """Multiply by a scalar polynomial given as a coefficient list."""
        s = spoly_trim(tuple(_coerce_entry(x) for x in s))
        if not s or self.is_zero():
            return MatPoly.zero(self.rows, self.cols)
        out = [Matrix.zeros(self.rows, self.cols)] * (self.degree + len(s))
        for i, a in enumerate(self.coeffs):
            for j, c in enumerate(s):
                if c:
                    out[i + j] = out[i + j] + a * c
        return MatPoly(self.rows, self.cols, tuple(out))

    def shift(self, k: int) -> "MatPoly":
        """Multiply by ``y**k``."""
        if self.is_zero():
            return self
        return MatPoly(self.rows, self.cols,
                       (Matrix.zeros(self.rows, self.cols),) * k + self.coeffs)

    def derivative(self, order: int = 1) -> "MatPoly":
        return poly_derivative(self, order)

    def __call__(self, y) -> Matrix:
        return poly_eval(self, y)

    @property
    def T(self) -> "MatPoly":
        return MatPoly(self.cols, self.rows, tuple(c.T for c in self.coeffs))

    def to_float(self) -> "MatPoly":
        return MatPoly(self.rows, self.cols, tuple(c.to_float() for c in self.coeffs))

    def column_coeffs(self) -> list[list]:
        """For vector polynomials: one list of entries per degree."""
        return [list(c.vector()) for c in self.coeffs]


def poly_eval(P: MatPoly, y) -> Matrix:
    """Horner evaluation; exact when both P and y are rational."""
    if isinstance(y, int) and not isinstance(y, bool):
        y = Fraction(y)
    acc = Matrix.zeros(P.rows, P.cols)
    for c in reversed(P.coeffs):
        acc = acc * y + c
    return acc


def poly_derivative(P: MatPoly, order: int = 1) -> MatPoly:
    if order < 0:
        raise ValueError("order must be nonnegative")
    out = P
    for _ in range(order):
        out = MatPoly(out.rows, out.cols, tuple(c * k for k, c in enumerate(out.coeffs) if k > 0))
    return out


# ---------------------------------------------------------------------------
# Scalar polynomials as coefficient tuples (low degree first)
# ---------------------------------------------------------------------------


def spoly_trim(p: Sequence) -> tuple:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def spoly_add(p: Sequence, q: Sequence) -> tuple:
    n = max(len(p), len(q))
    return spoly_trim(
        (p[k] if k < len(p) else 0) + (q[k] if k < len(q) else 0) for k in range(n))


def spoly_scale(p: Sequence, c) -> tuple:
    return spoly_trim(x * c for x in p)


def spoly_mul(p: Sequence, q: Sequence) -> tuple:
    if not p or not q:
        return ()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return spoly_trim(out)


def spoly_deriv(p: Sequence, order: int = 1) -> tuple:
    p = tuple(p)
    for _ in range(order):
        p = tuple(k * c for k, c in enumerate(p) if k > 0)
    return spoly_trim(p)


def spoly_eval(p: Sequence, y):
    acc = Fraction(0) if _is_exact(y) else 0.0
    for c in reversed(p):
        acc = acc * y + c
    return acc
