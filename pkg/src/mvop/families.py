"""Spherical-function families for (SO(n+1), SO(n)) and their polynomial eigenfunctions.

Three shapes of family are supported:

* ``"2x2"``: K-type Lambda^p(C^n) with 1 <= p <= floor(n/2) - 1 (two M-submodules);
* ``"3x3"``: n = 2l+1 and K-type Lambda^l(C^n) (three M-submodules);
* ``"scalar"``: n = 2l and K-type (d,...,d,+-d), which is M-irreducible.

For the matrix families ``P_{w,delta}`` is the vector polynomial with
``H = Psi P`` the restriction of the spherical function to the torus A,
written in ``y = (1 + cos s)/2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, prod

import numpy as np

from .errors import DomainError, InconsistentSystem, NormalizationImpossible, OutOfRange
from .hyper import (
    HyperParams,
    detect_truncation,
    gauss_2f1_poly,
    huv_coefficients,
    matrix_hyper_poly,
    truncation_factor,
)
from .numeric import (
    MatPoly,
    Matrix,
    PiRational,
    solve_consistent,
    spoly_eval,
    spoly_mul,
    spoly_scale,
)
from .spectra import EigKey, HighestWeight, delta_eigenvalue, fundamental_dims, gt_dimension, top_dims

__all__ = [
    "SphericalFamily",
    "PsiSpec",
    "SolvedPolynomial",
    "Weight",
    "build_family",
    "build_family_top",
    "build_scalar_family",
    "family_for",
    "grid_families",
    "eigenvalue",
    "keys_for",
    "scalar_h",
    "construct_P",
    "weight_poly",
    "radial_apply",
    "radial_residual",
    "restrict",
    "restrict_y",
    "double_factorial",
]

DEFAULT_TAU = 1e-3


def double_factorial(k: int) -> int:
    """k!! with 0!! = (-1)!! = 1."""
    if k < -1:
        raise ValueError("double factorial is defined for k >= -1")
    return prod(range(k, 0, -2)) if k > 0 else 1


def _haar_constant(n: int) -> PiRational:
    """(n-1)!!/(n-2)!! * 2/omega, omega = pi for even n and 2 for odd n."""
    ratio = Fraction(double_factorial(n - 1), double_factorial(n - 2))
    if n % 2 == 0:
        return PiRational(2 * ratio, -1)
    return PiRational(ratio, 0)


# ---------------------------------------------------------------------------
# Psi
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PsiSpec:
    """The conjugating matrix Psi of a family.

    The 3x3 columns, in delta order (-1, 0, +1), are (e^{is}, 1, e^{-is}),
    (1, cos s, 1) and (e^{-is}, 1, e^{is}); with this choice the derivative at
    s = 0 is the matrix [[i,0,-i],[0,0,0],[-i,0,i]] used to pin P_{w,+-1}(0).
    """

    size: int
    exact: MatPoly | None

    def evaluate(self, y: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Psi(y), Psi'(y), Psi''(y) as numpy arrays (complex for size 3)."""
        if self.exact is not None:
            P = self.exact.to_float()
            return (P(y).to_numpy(), P.derivative(1)(y).to_numpy(), P.derivative(2)(y).to_numpy())
        c = 2.0 * y - 1.0
        r = np.sqrt(y - y * y)
        dr = (1.0 - 2.0 * y) / (2.0 * r)
        d2r = -1.0 / (4.0 * r ** 3)
        return (_psi3(c + 2j * r, c, 1.0), _psi3(2.0 + 2j * dr, 2.0, 0.0), _psi3(2j * d2r, 0.0, 0.0))

    def at_cos_sin(self, c: float, sn: float) -> np.ndarray:
        """Psi from cos s and sin s (avoids round trips through the angle)."""
        if self.size == 1:
            return np.ones((1, 1))
        if self.size == 2:
            return np.array([[c, 1.0], [1.0, c]])
        return _psi3(complex(c, sn), c, 1.0)


def _psi3(z, c, one) -> np.ndarray:
    """3x3 Psi pattern from e^{is}, cos s and the constant entry (or their derivatives)."""
    zc = np.conj(z)
    return np.array([[z, one, zc], [one, c, one], [zc, one, z]], dtype=complex)


def _psi_2x2() -> MatPoly:
    return MatPoly.from_entry_polys([[(-1, 2), (1,)], [(1,), (-1, 2)]])


# ---------------------------------------------------------------------------
# Families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SphericalFamily:
    n: int
    kind: str
    params: HyperParams | None
    dims: tuple[int, ...]
    norm_const: PiRational
    E: Matrix
    N: Matrix
    p: int | None = None
    d: int | None = None
    sign: int | None = None

    @property
    def ell(self) -> int:
        return self.n // 2

    @property
    def size(self) -> int:
        return self.E.rows

    @property
    def weight_exponent(self) -> Fraction:
        return Fraction(self.n, 2) - 1

    @property
    def deltas(self) -> tuple[int, ...]:
        return {"2x2": (0, 1), "3x3": (-1, 0, 1), "scalar": (0,)}[self.kind]

    @property
    def family_id(self) -> str:
        if self.kind == "2x2":
            return f"n{self.n}-p{self.p}"
        if self.kind == "3x3":
            return f"top-l{self.ell}"
        return f"scalar-l{self.ell}-d{self.d}{'+' if self.sign >= 0 else '-'}"

    @property
    def psi(self) -> PsiSpec:
        if self.kind == "2x2":
            return PsiSpec(2, _psi_2x2())
        if self.kind == "scalar":
            return PsiSpec(1, MatPoly.constant(Matrix.identity(1)))
        return PsiSpec(3, None)

    @property
    def min_w(self) -> int:
        return self.d if self.kind == "scalar" else 0

    def __repr__(self) -> str:
        return f"SphericalFamily({self.family_id})"


def build_family(n: int, p: int) -> SphericalFamily:
    """2x2 family of K-type Lambda^p(C^n), 1 <= p <= floor(n/2) - 1."""
    if n < 3 or not 1 <= p <= n // 2 - 1:
        raise OutOfRange(f"2x2 families need 1 <= p <= {n // 2 - 1} for n = {n}, got p = {p}")
    h = Fraction(n, 2) + 1
    params = HyperParams(
        C=Matrix.from_rows([[h, 1], [1, h]]),
        U=Matrix.scalar(2, n + 2),
        V=Matrix.diag([p, n - p]),
    )
    norm = _haar_constant(n) * Fraction(factorial(n - 1), factorial(p) * factorial(n - p))
    return SphericalFamily(
        n=n, kind="2x2", params=params, dims=fundamental_dims(n, p), norm_const=norm,
        E=Matrix.from_rows([[0, p - n], [-p, 0]]), N=Matrix.diag([p - n, -p]), p=p,
    )


def build_family_top(ell: int) -> SphericalFamily:
    """3x3 family for n = 2l+1 and K-type Lambda^l(C^n)."""
    if ell < 1:
        raise OutOfRange(f"ell must be at least 1, got {ell}")
    n = 2 * ell + 1
    h = Fraction(n + 2, 2)
    half = Fraction(1, 2)
    params = HyperParams(
        C=Matrix.from_rows([[h, half, 0], [1, h, 1], [0, half, h]]),
        U=Matrix.scalar(3, n + 2),
        V=Matrix.diag([ell + 1, ell, ell + 1]),
    )
    e = Fraction(-(ell + 1), 2)
    return SphericalFamily(
        n=n, kind="3x3", params=params, dims=top_dims(ell), norm_const=_haar_constant(n),
        E=Matrix.from_rows([[0, -ell, 0], [e, 0, e], [0, -ell, 0]]),
        N=Matrix.diag([-ell, -ell - 1, -ell]), p=ell,
    )


def build_scalar_family(ell: int, d: int, sign: int = 1) -> SphericalFamily:
    """Scalar family for n = 2l and K-type (d,...,d,sign*d)."""
    if ell < 2:
        raise OutOfRange(f"ell must be at least 2, got {ell}")
    if d < 0:
        raise OutOfRange(f"d must be nonnegative, got {d}")
    if sign not in (1, -1):
        raise OutOfRange("sign must be +1 or -1")
    n = 2 * ell
    k = d * (d + ell - 1)
    weight = HighestWeight.for_group(n, (d,) * (ell - 1) + (sign * d,))
    return SphericalFamily(
        n=n, kind="scalar", params=None, dims=(gt_dimension(n, weight),),
        norm_const=_haar_constant(n), E=Matrix.from_rows([[-k]]), N=Matrix.from_rows([[-k]]),
        d=d, sign=sign,
    )


def family_for(n: int, p: int) -> SphericalFamily:
    """The matrix family of K-type Lambda^p(C^n): 3x3 when n = 2p+1, else 2x2."""
    if n % 2 == 1 and p == (n - 1) // 2:
        return build_family_top(p)
    return build_family(n, p)


def grid_families(n_values) -> list[SphericalFamily]:
    """Every 2x2 and 3x3 family for the given n values."""
    out = []
    for n in n_values:
        for p in range(1, n // 2):
            out.append(build_family(n, p))
        if n % 2 == 1:
            out.append(build_family_top(n // 2))
    return out


def keys_for(family: SphericalFamily, w: int) -> list[EigKey]:
    return [EigKey(w, dl) for dl in family.deltas]


def eigenvalue(family: SphericalFamily, key: EigKey) -> Fraction:
    if key.delta not in family.deltas:
        raise OutOfRange(f"delta = {key.delta} is not admissible for {family.family_id}")
    if family.kind == "scalar":
        if key.w < family.d:
            raise OutOfRange(f"scalar family needs w >= d = {family.d}")
        l, d, w = family.ell, family.d, key.w
        return Fraction(-w * (w + 2 * l - 1) + d * (d + l - 1))
    return delta_eigenvalue(family.n, family.p, key)


# ---------------------------------------------------------------------------
# Polynomial eigenfunctions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SolvedPolynomial:
    key: EigKey
    lam: Fraction
    P: MatPoly
    P0: tuple


def scalar_h(family: SphericalFamily, w: int) -> tuple[Fraction, ...]:
    """h_w(y) = u y^d 2F1(d-w, 2l+d+w-1; 2d+l; y) normalized by h_w(1) = 1."""
    if family.kind != "scalar":
        raise ValueError("scalar_h needs a scalar family")
    l, d = family.ell, family.d
    if w < d:
        raise OutOfRange(f"w must be at least d = {d}")
    f = gauss_2f1_poly(d - w, 2 * l + d + w - 1, 2 * d + l)
    g = spoly_mul((0,) * d + (1,), f)
    at_one = spoly_eval(g, Fraction(1))
    if at_one == 0:
        raise NormalizationImpossible(f"unnormalized h_{w} vanishes at y = 1")
    return spoly_scale(g, 1 / at_one)


@lru_cache(maxsize=4096)
def construct_P(family: SphericalFamily, key: EigKey) -> SolvedPolynomial:
    """Solve for P_{w,delta}(0) and assemble the degree-w eigenpolynomial."""
    lam = eigenvalue(family, key)
    if family.kind == "scalar":
        h = scalar_h(family, key.w)
        P = MatPoly.from_entry_polys([[h]])
        return SolvedPolynomial(key, lam, P, (P.coeff(0)[0, 0],))

    params, m, w = family.params, family.size, key.w
    found = detect_truncation(params, lam, w + family.n + 4)
    if found is None or found.w != w:
        raise InconsistentSystem(f"expected truncation at j = {w}, found {found and found.w}")
    coeffs = huv_coefficients(params, lam, w)
    kill = truncation_factor(params, lam, w) @ coeffs[w]
    at_one = coeffs[0]
    for j in range(1, w + 1):
        at_one = at_one + coeffs[j] * Fraction(1, factorial(j))
    norm = Matrix.from_rows([[1] * m] * m) @ at_one

    rows = [list(kill.row(i)) for i in range(m)] + [list(norm.row(i)) for i in range(m)]
    rhs = [Fraction(0)] * m + [Fraction(1)] * m
    if family.kind == "3x3" and key.delta != 0:
        # p1(1) - p3(1) = -delta (w+l+1)/(l+1)
        l = family.ell
        rows.append([a - b for a, b in zip(at_one.row(0), at_one.row(2))])
        rhs.append(Fraction(-key.delta * (w + l + 1), l + 1))
    P0 = solve_consistent(rows, rhs)
    P = matrix_hyper_poly(params, lam, P0, w)
    if P.degree != w:
        raise InconsistentSystem(f"constructed polynomial has degree {P.degree}, expected {w}")
    return SolvedPolynomial(key, lam, P, P0)


# ---------------------------------------------------------------------------
# Weight
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Weight:
    """``W(y) = norm_const * (y(1-y))**exponent * part(y)``.

    ``part`` is the polynomial matrix; the exponent n/2 - 1 is a half-integer
    for odd n and is kept symbolic.
    """

    part: MatPoly
    exponent: Fraction
    norm_const: PiRational

    def full(self) -> MatPoly:
        """``(y(1-y))**exponent * part`` as a polynomial (integer exponent only)."""
        if self.exponent.denominator != 1:
            raise ValueError("the weight factor has a half-integer exponent for odd n")
        factor = (1,)
        for _ in range(int(self.exponent)):
            factor = spoly_mul(factor, (0, 1, -1))
        return self.part.mul_scalar_poly(factor)


class _SurdPoly:
    """Element of Q(i)[y, r] with r**2 = y - y**2; keys (deg_y, deg_r in {0,1})."""

    def __init__(self, terms=None):
        self.terms = {k: v for k, v in (terms or {}).items() if v != 0}

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return _SurdPoly(out)

    def __mul__(self, other):
        out = {}
        for (a, ra), u in self.terms.items():
            for (b, rb), v in other.terms.items():
                if ra + rb == 2:
                    for dy, c in ((1, 1), (2, -1)):
                        k = (a + b + dy, 0)
                        out[k] = out.get(k, 0) + c * u * v
                else:
                    k = (a + b, ra + rb)
                    out[k] = out.get(k, 0) + u * v
        return _SurdPoly(out)

    def scale(self, c):
        return _SurdPoly({k: c * v for k, v in self.terms.items()})

    def conj(self):
        return _SurdPoly({k: v.conjugate() for k, v in self.terms.items()})

    def real_poly(self) -> tuple[tuple[Fraction, ...], bool]:
        """(coefficients, exact) where exact means no imaginary or surd part remains."""
        exact = all(k[1] == 0 and v.imag == 0 for k, v in self.terms.items())
        deg = max((k[0] for k in self.terms), default=-1)
        coeffs = [Fraction(0)] * (deg + 1)
        for (a, r), v in self.terms.items():
            if r == 0:
                coeffs[a] += v.real
        return tuple(coeffs), exact


class _GaussRat:
    """Gaussian rational a + bi with Fraction parts."""

    __slots__ = ("real", "imag")

    def __init__(self, real, imag=0):
        self.real = Fraction(real)
        self.imag = Fraction(imag)

    def __add__(self, o):
        o = o if isinstance(o, _GaussRat) else _GaussRat(o)
        return _GaussRat(self.real + o.real, self.imag + o.imag)

    __radd__ = __add__

    def __mul__(self, o):
        o = o if isinstance(o, _GaussRat) else _GaussRat(o)
        return _GaussRat(self.real * o.real - self.imag * o.imag,
                         self.real * o.imag + self.imag * o.real)

    __rmul__ = __mul__

    def conjugate(self):
        return _GaussRat(self.real, -self.imag)

    def __eq__(self, o):
        o = o if isinstance(o, _GaussRat) else _GaussRat(o)
        return self.real == o.real and self.imag == o.imag

    def __ne__(self, o):
        return not self == o


def _psi_3x3_symbolic() -> list[list[_SurdPoly]]:
    G = _GaussRat
    z = _SurdPoly({(0, 0): G(-1), (1, 0): G(2), (0, 1): G(0, 2)})
    c = _SurdPoly({(0, 0): G(-1), (1, 0): G(2)})
    one = _SurdPoly({(0, 0): G(1)})
    zc = z.conj()
    return [[z, one, zc], [one, c, one], [zc, one, z]]


def weight_3x3_exact(dims) -> tuple[MatPoly, bool]:
    """``Psi* diag(dims) Psi`` in exact arithmetic, and whether it came out real."""
    psi = _psi_3x3_symbolic()
    entries = []
    real = True
    for i in range(3):
        row = []
        for j in range(3):
            acc = _SurdPoly()
            for k in range(3):
                acc = acc + (psi[k][i].conj() * psi[k][j]).scale(_GaussRat(dims[k]))
            coeffs, ok = acc.real_poly()
            real = real and ok
            row.append(coeffs or (Fraction(0),))
        entries.append(row)
    return MatPoly.from_entry_polys(entries), real


def weight_poly(family: SphericalFamily) -> Weight:
    """Weight matrix of the family, split into constant, measure factor and polynomial part."""
    if family.kind == "2x2":
        psi = _psi_2x2()
        part = psi.T @ psi.lmul(Matrix.diag([family.p, family.n - family.p]))
    elif family.kind == "3x3":
        part, real = weight_3x3_exact(family.dims)
        if not real:
            raise ArithmeticError("3x3 weight has a nonzero imaginary part")
    else:
        part = MatPoly.constant(Matrix.from_rows([[family.dims[0]]]))
    return Weight(part, family.weight_exponent, family.norm_const)


# ---------------------------------------------------------------------------
# Radial operator and restriction to A
# ---------------------------------------------------------------------------


def _poly_float_derivs(P: MatPoly, y: float):
    # exact Horner at the binary value of y; float Horner loses digits for w near 10
    yq = Fraction(y)
    return tuple(np.array([float(x) for x in P.derivative(k)(yq).vector()]) for k in range(3))


def radial_apply(family: SphericalFamily, sol: SolvedPolynomial, y: float,
                 tau: float = DEFAULT_TAU) -> np.ndarray:
    """Evaluate the radial operator on H = Psi P at y in [tau, 1 - tau] (float path)."""
    y = float(y)
    if not tau <= y <= 1.0 - tau:
        raise DomainError(f"y = {y} is outside [{tau}, {1 - tau}]")
    psi, dpsi, d2psi = family.psi.evaluate(y)
    P, dP, d2P = _poly_float_derivs(sol.P, y)
    H = psi @ P
    dH = dpsi @ P + psi @ dP
    d2H = d2psi @ P + 2.0 * (dpsi @ dP) + psi @ d2P
    N = family.N.to_numpy()
    E = family.E.to_numpy()
    yy = y * (1.0 - y)
    t = 1.0 - 2.0 * y
    return (yy * d2H + 0.5 * family.n * t * dH
            + (t * t + 1.0) / (4.0 * yy) * (N @ H) + t / (2.0 * yy) * (E @ H))


def radial_residual(family: SphericalFamily, sol: SolvedPolynomial, ys) -> float:
    """max over ys of |radial_apply - lam H|_inf / |H|_inf."""
    worst = 0.0
    lam = float(sol.lam)
    for y in ys:
        psi = family.psi.evaluate(float(y))[0]
        H = psi @ _poly_float_derivs(sol.P, float(y))[0]
        r = radial_apply(family, sol, y) - lam * H
        worst = max(worst, float(np.max(np.abs(r)) / np.max(np.abs(H))))
    return worst


def _real_if_exact(H: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(H) and np.all(H.imag == 0):
        return H.real
    return H


def restrict(family: SphericalFamily, sol: SolvedPolynomial, s: float) -> np.ndarray:
    """The diagonal values of Phi(a(s)), i.e. (Psi P)((1 + cos s)/2), for 0 < s < pi."""
    s = float(s)
    if not 0.0 < s < np.pi:
        raise DomainError(f"s = {s} is outside (0, pi)")
    c = np.cos(s)
    P = _poly_float_derivs(sol.P, (1.0 + c) / 2.0)[0]
    return _real_if_exact(family.psi.at_cos_sin(c, np.sin(s)) @ P)


def restrict_y(family: SphericalFamily, sol: SolvedPolynomial, y: float) -> np.ndarray:
    """``(Psi P)(y)`` for 0 < y < 1, with cos s = 2y - 1 and sin s = 2 sqrt(y(1-y))."""
    y = float(y)
    if not 0.0 < y < 1.0:
        raise DomainError(f"y = {y} is outside (0, 1)")
    P = _poly_float_derivs(sol.P, y)[0]
    psi = family.psi.at_cos_sin(2.0 * y - 1.0, 2.0 * np.sqrt(y - y * y))
    return _real_if_exact(psi @ P)
