"""Exact moments, inner products, Gram matrices and the verification suite."""

from __future__ import annotations

import json
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np

from .errors import MvopError
from .families import (
    SphericalFamily,
    construct_P,
    eigenvalue,
    keys_for,
    radial_residual,
    scalar_h,
    weight_3x3_exact,
    weight_poly,
)
from .hyper import apply_D, truncation_factor
from .numeric import (
    MatPoly,
    Matrix,
    PiRational,
    mat_det,
    mat_inverse,
    mat_kernel,
    rational_str,
    spoly_add,
    spoly_deriv,
    spoly_mul,
    spoly_scale,
)
from .spectra import (
    EigKey,
    HighestWeight,
    delta_eigenvalue,
    delta_eigenvalue_via_casimir,
    fundamental_weight,
    spherical_weight,
)

__all__ = [
    "moment",
    "PiMatrix",
    "inner_product",
    "GramReport",
    "gram_sequence",
    "random_vector_poly",
    "check_symmetry",
    "check_positivity",
    "check_reduction3",
    "check_irreducibility_heuristic",
    "check_weight_real",
    "scalar_ode_residual",
    "scalar_orthogonality",
    "gauss_jacobi",
    "float_inner_product",
    "CheckResult",
    "VerifyReport",
    "run_suite",
]


# ---------------------------------------------------------------------------
# Moments
# ---------------------------------------------------------------------------


def _gamma(x: Fraction) -> tuple[Fraction, int]:
    """Gamma at a positive integer or half-integer, as (rational, power of sqrt(pi))."""
    if x.denominator == 1:
        return Fraction(factorial(int(x) - 1)), 0
    m = int(x - Fraction(1, 2))
    return Fraction(factorial(2 * m), 4 ** m * factorial(m)), 1


@lru_cache(maxsize=None)
def _moment_rational(n: int, k: int) -> Fraction:
    a = Fraction(n, 2) - 1
    g1, _ = _gamma(k + a + 1)
    g2, _ = _gamma(a + 1)
    g3, _ = _gamma(k + 2 * a + 2)
    return g1 * g2 / g3


def _n_of(family_or_n) -> int:
    return family_or_n.n if isinstance(family_or_n, SphericalFamily) else int(family_or_n)


def moment(k: int, family_or_n) -> PiRational:
    """``int_0^1 y^k (y(1-y))^(n/2-1) dy``; carries a factor pi exactly when n is odd."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    n = _n_of(family_or_n)
    return PiRational(_moment_rational(n, k), n % 2)


# ---------------------------------------------------------------------------
# Inner products
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PiMatrix:
    """Rational matrix times a common power of pi."""

    coeffs: Matrix
    pi_power: int

    def entry(self, i: int, j: int) -> PiRational:
        return PiRational(self.coeffs[i, j], self.pi_power)

    @property
    def shape(self) -> tuple[int, int]:
        return self.coeffs.shape

    def is_zero(self) -> bool:
        return self.coeffs.is_zero()

    def __sub__(self, other: "PiMatrix") -> "PiMatrix":
        if self.is_zero():
            return PiMatrix(-other.coeffs, other.pi_power)
        if other.is_zero():
            return self
        if self.pi_power != other.pi_power:
            raise ValueError("pi powers differ")
        return PiMatrix(self.coeffs - other.coeffs, self.pi_power)

    def to_json(self) -> dict:
        return {"q": self.coeffs.to_json(), "pi": self.pi_power}


class _MomentTable:
    """Matrix moments ``WM_t = sum_k W_k mu_{t+k}`` for one family (rational parts)."""

    def __init__(self, family: SphericalFamily):
        self.family = family
        weight = weight_poly(family)
        self.norm = weight.norm_const
        self.part = weight.part
        self.pi_power = self.norm.pi_power + family.n % 2
        self._cache: dict[int, Matrix] = {}

    def __call__(self, t: int) -> Matrix:
        if t not in self._cache:
            n = self.family.n
            acc = Matrix.zeros(self.part.rows)
            for k, Wk in enumerate(self.part.coeffs):
                acc = acc + Wk * _moment_rational(n, t + k)
            self._cache[t] = acc
        return self._cache[t]

    def pair(self, A: MatPoly, B: MatPoly) -> PiMatrix:
        """``norm * int B^T W A`` (all coefficients are real)."""
        out = Matrix.zeros(B.cols, A.cols)
        BT = [b.T for b in B.coeffs]
        for i, a in enumerate(A.coeffs):
            for j, bt in enumerate(BT):
                out = out + bt @ self(i + j) @ a
        return PiMatrix(out * self.norm.coeff, self.pi_power)


_TABLES: dict[SphericalFamily, _MomentTable] = {}


def _table(family: SphericalFamily) -> _MomentTable:
    if family not in _TABLES:
        _TABLES[family] = _MomentTable(family)
    return _TABLES[family]


def inner_product(family: SphericalFamily, A: MatPoly, B: MatPoly) -> PiMatrix:
    """``<A, B>_W = int_0^1 B(y)* W(y) A(y) dy`` computed exactly from Beta moments."""
    m = family.size
    if A.rows != m or B.rows != m:
        raise ValueError(f"polynomials must have {m} rows")
    return _table(family).pair(A, B)


def _is_positive_definite(M: Matrix) -> bool:
    return all(mat_det(_leading(M, k)) > 0 for k in range(1, M.rows + 1))


def _leading(M: Matrix, k: int) -> Matrix:
    return Matrix.from_rows([list(M.row(i))[:k] for i in range(k)])


# ---------------------------------------------------------------------------
# Gram matrices
# ---------------------------------------------------------------------------


@dataclass
class GramReport:
    family_id: str
    w_max: int
    blocks: dict[tuple[int, int], PiMatrix]
    status: dict[tuple[int, int], str]

    @property
    def passed(self) -> bool:
        return all(s != "violation" for s in self.status.values())

    def violations(self) -> list[tuple[int, int]]:
        return sorted(k for k, s in self.status.items() if s == "violation")

    def to_json(self) -> dict:
        return {
            "family": self.family_id,
            "w_max": self.w_max,
            "passed": self.passed,
            "blocks": [
                {"w": w, "w_prime": v, "status": self.status[(w, v)], **self.blocks[(w, v)].to_json()}
                for (w, v) in sorted(self.blocks)
            ],
        }


def poly_matrix(family: SphericalFamily, w: int) -> MatPoly:
    """P_w: the matrix polynomial whose columns are P_{w,delta} in delta order."""
    cols = [construct_P(family, k).P for k in keys_for(family, w)]
    return MatPoly.from_columns(cols)


def gram_sequence(family: SphericalFamily, w_max: int) -> GramReport:
    """All ``<P_w, P_w'>_W`` for w, w' <= w_max, classified as zero / diagonal / violation."""
    if w_max < 0:
        raise ValueError("w_max must be nonnegative")
    ws = range(family.min_w, w_max + 1)
    polys = {w: poly_matrix(family, w) for w in ws}
    blocks, status = {}, {}
    for w in ws:
        for v in ws:
            if v < w:
                G = blocks[(v, w)]
                G = PiMatrix(G.coeffs.T, G.pi_power)
            else:
                G = inner_product(family, polys[w], polys[v])
            blocks[(w, v)] = G
            if w != v:
                status[(w, v)] = "zero" if G.is_zero() else "violation"
            else:
                C = G.coeffs
                diag_ok = all(C[i, j] == 0 for i in range(C.rows) for j in range(C.cols) if i != j)
                pos_ok = all(C[i, i] > 0 for i in range(C.rows))
                status[(w, v)] = "diagonal" if diag_ok and pos_ok else "violation"
    return GramReport(family.family_id, w_max, blocks, status)


# ---------------------------------------------------------------------------
# Symmetry, positivity, reduction, irreducibility
# ---------------------------------------------------------------------------


def random_vector_poly(rng: random.Random, size: int, degree: int) -> MatPoly:
    """Vector polynomial with small random rational coefficients and exact degree."""
    coeffs = []
    for k in range(degree + 1):
        vals = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(size)]
        if k == degree and all(v == 0 for v in vals):
            vals[0] = Fraction(1)
        coeffs.append(Matrix.column(vals))
    return MatPoly.from_coeffs(coeffs)


def check_symmetry(family: SphericalFamily, A: MatPoly, B: MatPoly) -> PiMatrix:
    """``<DA, B>_W - <A, DB>_W``; zero when D is symmetric for W."""
    if family.params is None:
        raise ValueError("the symmetry check needs a matrix family")
    DA = apply_D(family.params, A)
    DB = apply_D(family.params, B)
    return inner_product(family, DA, B) - inner_product(family, A, DB)


def check_positivity(family: SphericalFamily, samples) -> list[bool]:
    """Per sample: are all leading principal minors of the polynomial part of W(y) positive?"""
    part = weight_poly(family).part
    out = []
    for y in samples:
        y = Fraction(y)
        if not 0 < y < 1:
            raise ValueError(f"sample {y} is not strictly inside (0, 1)")
        out.append(_is_positive_definite(part(y)))
    return out


def check_reduction3(ell: int, samples) -> Fraction:
    """Largest block-off entry of ``M W(y) M^T`` for M = [[1,0,1],[0,sqrt2,0],[-1,0,1]].

    Entries carrying a sqrt(2) factor are reported by their rational cofactor.
    """
    from .families import build_family_top

    part = weight_poly(build_family_top(ell)).part
    worst = Fraction(0)
    for y in samples:
        W = part(Fraction(y))
        off = (
            -W[0, 0] + W[0, 2] - W[2, 0] + W[2, 2],
            -W[0, 0] - W[0, 2] + W[2, 0] + W[2, 2],
            W[1, 2] - W[1, 0],
            W[2, 1] - W[0, 1],
        )
        worst = max([worst] + [abs(x) for x in off])
    return worst


def check_irreducibility_heuristic(family: SphericalFamily) -> bool:
    """True when W(1/4)W(3/4)^-1 and W(1/3)W(3/4)^-1 do not commute."""
    if family.kind != "2x2":
        raise ValueError("the heuristic applies to 2x2 families")
    part = weight_poly(family).part
    inv = mat_inverse(part(Fraction(3, 4)))
    A = part(Fraction(1, 4)) @ inv
    B = part(Fraction(1, 3)) @ inv
    return not (A @ B - B @ A).is_zero()


def check_weight_real(family: SphericalFamily) -> bool:
    """Whether the imaginary and surd parts of Psi* diag(dims) Psi cancel exactly."""
    if family.kind != "3x3":
        return True
    return weight_3x3_exact(family.dims)[1]


# ---------------------------------------------------------------------------
# Scalar family
# ---------------------------------------------------------------------------


def scalar_ode_residual(family: SphericalFamily, w: int) -> tuple:
    """``y (y(1-y)h'' + l(1-2y)h' - k(1-y)/y h - lam h)`` as a polynomial (zero expected)."""
    h = scalar_h(family, w)
    l, d = family.ell, family.d
    k = d * (d + l - 1)
    lam = eigenvalue(family, EigKey(w, 0))
    terms = (
        spoly_mul((0, 0, 1, -1), spoly_deriv(h, 2)),
        spoly_mul(spoly_scale((0, 1, -2), l), spoly_deriv(h, 1)),
        spoly_mul((-k, k), h),
        spoly_mul((0, -lam), h),
    )
    out = ()
    for t in terms:
        out = spoly_add(out, t)
    return out


def scalar_orthogonality(family: SphericalFamily, w: int, v: int) -> PiRational:
    """``int_0^1 (y(1-y))^(l-1) h_w h_v dy`` exactly."""
    prod_ = spoly_mul(scalar_h(family, w), scalar_h(family, v))
    acc = Fraction(0)
    for k, c in enumerate(prod_):
        acc += c * _moment_rational(family.n, k)
    return PiRational(acc, 0)


# ---------------------------------------------------------------------------
# Gauss-Jacobi cross-check
# ---------------------------------------------------------------------------


def gauss_jacobi(num: int, alpha: float, beta: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1] for the weight (1-x)^alpha (1+x)^beta."""
    if num < 1:
        raise ValueError("need at least one node")
    ab = alpha + beta
    k = np.arange(num, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        diag = (beta ** 2 - alpha ** 2) / ((2 * k + ab) * (2 * k + ab + 2))
    if abs(ab) < 1e-300:
        diag[0] = (beta - alpha) / (ab + 2)
    diag = np.nan_to_num(diag)
    kk = np.arange(1, num, dtype=float)
    b = (4 * kk * (kk + alpha) * (kk + beta) * (kk + ab)
         / ((2 * kk + ab) ** 2 * (2 * kk + ab + 1) * (2 * kk + ab - 1)))
    J = np.diag(diag) + np.diag(np.sqrt(b), 1) + np.diag(np.sqrt(b), -1)
    nodes, vecs = np.linalg.eigh(J)
    mu0 = 2 ** (ab + 1) * math.gamma(alpha + 1) * math.gamma(beta + 1) / math.gamma(ab + 2)
    return nodes, mu0 * vecs[0, :] ** 2


def float_inner_product(family: SphericalFamily, A: MatPoly, B: MatPoly) -> np.ndarray:
    """``<A, B>_W`` by Gauss-Jacobi quadrature on [0, 1] (float path)."""
    weight = weight_poly(family)
    a = float(weight.exponent)
    deg = A.degree + B.degree + weight.part.degree
    num = math.ceil((deg + 2) / 2) + 1
    x, wts = gauss_jacobi(num, a, a)
    y = (1.0 + x) / 2.0
    wts = wts * 4.0 ** (-a) / 2.0
    Af, Bf, Wf = A.to_float(), B.to_float(), weight.part.to_float()
    out = np.zeros((B.cols, A.cols))
    for yi, wi in zip(y, wts):
        out += wi * (Bf(yi).to_numpy().T @ Wf(yi).to_numpy() @ Af(yi).to_numpy())
    return float(weight.norm_const) * out


# ---------------------------------------------------------------------------
# Suite
# ---------------------------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: Fraction | float | int
    elapsed_ms: float
    detail: str = ""

    def to_json(self) -> dict:
        r = self.residual
        return {
            "name": self.name,
            "status": "pass" if self.passed else "fail",
            "residual": rational_str(r) if isinstance(r, Fraction) else (float(r) if isinstance(r, float) else r),
            "elapsed_ms": round(self.elapsed_ms, 3),
            **({"detail": self.detail} if self.detail else {}),
        }


@dataclass
class VerifyReport:
    family_id: str
    w_max: int
    mode: str
    tol: float
    seed: int
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def failures(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def max_float_residual(self) -> float:
        vals = [c.residual for c in self.checks if isinstance(c.residual, float)]
        return max(vals, default=0.0)

    def to_json(self) -> dict:
        return {
            "family": self.family_id,
            "w_max": self.w_max,
            "mode": self.mode,
            "tol": self.tol,
            "seed": self.seed,
            "passed": self.passed,
            "failures": self.failures,
            "checks": [c.to_json() for c in self.checks],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _timed(report: VerifyReport, name: str, fn):
    t0 = time.perf_counter()
    try:
        passed, residual, detail = fn()
    except MvopError as exc:
        passed, residual, detail = False, 1, f"{type(exc).__name__}: {exc}"
    report.checks.append(CheckResult(name, passed, residual, 1000 * (time.perf_counter() - t0), detail))


def _all_keys(family: SphericalFamily, w_max: int) -> list[EigKey]:
    return [k for w in range(family.min_w, w_max + 1) for k in keys_for(family, w)]


def _expected_kernel(family: SphericalFamily, delta: int) -> list[tuple]:
    m = family.size
    e = [tuple(Fraction(int(i == j)) for i in range(m)) for j in range(m)]
    if family.kind == "2x2":
        return [e[delta]]
    return [e[1]] if delta == 0 else [e[0], e[2]]


def _chk_eigen(family, w_max):
    bad = 0
    for key in _all_keys(family, w_max):
        if family.kind == "scalar":
            bad += bool(scalar_ode_residual(family, key.w))
            continue
        sol = construct_P(family, key)
        bad += not (apply_D(family.params, sol.P) - sol.P * sol.lam).is_zero()
    return bad == 0, bad, ""


def _chk_normalization(family, w_max):
    bad = 0
    for key in _all_keys(family, w_max):
        val = construct_P(family, key).P(Fraction(1))
        bad += sum(val.vector()) != 1
    return bad == 0, bad, ""


def _chk_base_case(family, w_max):
    if family.kind == "scalar":
        d = family.d
        h = scalar_h(family, d)
        ok = h == (0,) * d + (1,)
        return ok, int(not ok), ""
    bad = 0
    for i, key in enumerate(keys_for(family, 0)):
        P = construct_P(family, key).P
        target = [Fraction(0)] * family.size
        target[{"2x2": key.delta, "3x3": key.delta + 1}[family.kind]] = Fraction(1)
        bad += P.degree != 0 or list(P.coeff(0).vector()) != target
    return bad == 0, bad, ""


def _chk_truncation(family, w_max):
    bad = 0
    for key in _all_keys(family, w_max):
        lam = eigenvalue(family, key)
        ker = mat_kernel(truncation_factor(family.params, lam, key.w))
        bad += ker != _expected_kernel(family, key.delta)
    return bad == 0, bad, ""


def _chk_gram(family, w_max):
    if family.kind == "scalar":
        bad = 0
        ws = range(family.min_w, w_max + 1)
        for w in ws:
            for v in ws:
                val = scalar_orthogonality(family, w, v).coeff
                bad += (val != 0) if w != v else (val <= 0)
        return bad == 0, bad, ""
    rep = gram_sequence(family, w_max)
    return rep.passed, len(rep.violations()), ""


def _chk_gram_float(family, w_max, tol):
    ws = range(family.min_w, w_max + 1)
    polys = {w: poly_matrix(family, w) for w in ws}
    worst = 0.0
    for w in ws:
        for v in ws:
            G = float_inner_product(family, polys[w], polys[v])
            if w == v:
                D = np.sqrt(np.abs(np.diag(G)))
                G = G - np.diag(np.diag(G))
                scale = np.outer(D, D)
            else:
                Dw = np.sqrt(np.abs(np.diag(float_inner_product(family, polys[w], polys[w]))))
                Dv = np.sqrt(np.abs(np.diag(float_inner_product(family, polys[v], polys[v]))))
                scale = np.outer(Dv, Dw)
            worst = max(worst, float(np.max(np.abs(G) / scale)))
    return worst <= tol, worst, ""


def _chk_symmetry(family, seed, pairs):
    rng = random.Random(seed)
    bad = 0
    for _ in range(pairs):
        A = random_vector_poly(rng, family.size, rng.randint(0, 6))
        B = random_vector_poly(rng, family.size, rng.randint(0, 6))
        bad += not check_symmetry(family, A, B).is_zero()
    return bad == 0, bad, f"seed={seed} pairs={pairs}"


def _chk_conjugation(family, w_max, tol):
    ys = [(i + 0.5) / 20 for i in range(20)]
    worst = max(radial_residual(family, construct_P(family, k), ys) for k in _all_keys(family, w_max))
    return worst < tol, worst, ""


def _chk_positivity(family):
    ok = all(check_positivity(family, [Fraction(i, 26) for i in range(1, 26)]))
    return ok and check_weight_real(family), int(not ok), ""


def _chk_reduction(family):
    worst = check_reduction3(family.ell, [Fraction(i, 11) for i in range(1, 11)])
    return worst == 0, worst, ""


def _chk_casimir(family, w_max):
    bad = 0
    for key in _all_keys(family, w_max):
        if family.kind == "scalar":
            l, d = family.ell, family.d
            top = HighestWeight.for_group(family.n + 1, (key.w,) + (d,) * (l - 1))
            low = HighestWeight.for_group(family.n, (d,) * (l - 1) + (family.sign * d,))
            bad += delta_eigenvalue_via_casimir(family.n, top, low) != eigenvalue(family, key)
            continue
        top = spherical_weight(family.n, family.p, key)
        low = fundamental_weight(family.n, family.p)
        bad += delta_eigenvalue_via_casimir(family.n, top, low) != delta_eigenvalue(family.n, family.p, key)
    return bad == 0, bad, ""


def run_suite(family: SphericalFamily, w_max: int, tol: float = 1e-9, *, mode: str = "exact",
              seed: int = 0, symmetry_pairs: int = 10) -> VerifyReport:
    """Run every applicable check on the family; failures are recorded, not raised."""
    if mode not in ("exact", "float"):
        raise ValueError("mode must be 'exact' or 'float'")
    report = VerifyReport(family.family_id, w_max, mode, tol, seed)
    _timed(report, "eigen_identity", lambda: _chk_eigen(family, w_max))
    _timed(report, "normalization", lambda: _chk_normalization(family, w_max))
    _timed(report, "base_case", lambda: _chk_base_case(family, w_max))
    if family.kind != "scalar":
        _timed(report, "truncation_kernel", lambda: _chk_truncation(family, w_max))
    if mode == "float" and family.kind != "scalar":
        _timed(report, "gram", lambda: _chk_gram_float(family, w_max, tol))
    else:
        _timed(report, "gram", lambda: _chk_gram(family, w_max))
    if family.kind != "scalar":
        _timed(report, "symmetry", lambda: _chk_symmetry(family, seed, symmetry_pairs))
    _timed(report, "conjugation", lambda: _chk_conjugation(family, w_max, tol))
    _timed(report, "positivity", lambda: _chk_positivity(family))
    if family.kind == "3x3":
        _timed(report, "reduction", lambda: _chk_reduction(family))
    if family.kind == "2x2":
        _timed(report, "irreducibility_heuristic", lambda: (check_irreducibility_heuristic(family), 0, ""))
    _timed(report, "casimir", lambda: _chk_casimir(family, w_max))
    return report
