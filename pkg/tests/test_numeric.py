from fractions import Fraction as F

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from mvop.errors import GradeMismatch, InconsistentSystem, SingularMatrix
from mvop.numeric import (
    MatPoly,
    Matrix,
    PiRational,
    as_rational,
    mat_det,
    mat_inverse,
    mat_kernel,
    mat_rank,
    mat_solve,
    parse_rational,
    poly_derivative,
    poly_eval,
    rational_str,
    solve_consistent,
    spoly_mul,
)

small = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def col(*xs):
    return Matrix.column(xs)


# --- scalars ------------------------------------------------------------------


def test_rational_serialization():
    assert rational_str(F(-6, 4)) == "-3/2"
    assert rational_str(F(7)) == "7"
    assert parse_rational("-3/2") == F(-3, 2)
    assert parse_rational(rational_str(F(0))) == 0


def test_as_rational_rejects_floats():
    with pytest.raises(TypeError):
        as_rational(0.5)


def test_pirational_grades():
    a = PiRational(F(1, 2), 1)
    b = PiRational(F(1, 3), 1)
    assert (a + b) == PiRational(F(5, 6), 1)
    with pytest.raises(GradeMismatch):
        a + PiRational(F(1), 0)
    # zero is the identity for every grade
    assert a + PiRational(F(0), 0) == a
    assert PiRational(F(0), 1).pi_power == 0


def test_pirational_mul_and_float():
    a = PiRational(F(3), -1)
    assert float(a * PiRational(F(1, 8), 1)) == pytest.approx(3 / 8)
    assert float(a) == pytest.approx(3 / np.pi)
    assert (a * F(2)).coeff == 6


def test_pirational_json_roundtrip():
    a = PiRational(F(-8, 5), -1)
    assert a.to_json() == {"q": "-8/5", "pi": -1}
    assert PiRational.from_json(a.to_json()) == a


# --- matrices ---------------------------------------------------------------------


def test_mat_solve_example():
    A = Matrix.from_rows([[3, 1], [1, 3]])
    assert mat_solve(A, (0, 2)) == (F(-1, 4), F(3, 4))


def test_mat_solve_identity():
    assert mat_solve(Matrix.identity(3), (F(1, 2), 5, -1)) == (F(1, 2), 5, -1)


def test_mat_solve_singular():
    with pytest.raises(SingularMatrix):
        mat_solve(Matrix.from_rows([[1, 1], [1, 1]]), (1, 2))


@pytest.mark.parametrize(
    "diag, expected",
    [
        ((0, 2), [(1, 0)]),
        ((1, 1), []),
        ((0, -1, 0), [(1, 0, 0), (0, 0, 1)]),
    ],
)
def test_mat_kernel_examples(diag, expected):
    assert mat_kernel(Matrix.diag(diag)) == [tuple(F(x) for x in v) for v in expected]


def test_solve_consistent_errors():
    with pytest.raises(InconsistentSystem):
        solve_consistent([[1, 0], [1, 0]], [F(1), F(2)])
    with pytest.raises(InconsistentSystem):
        solve_consistent([[1, 1], [2, 2]], [F(1), F(2)])
    assert solve_consistent([[1, 0], [0, 1], [1, 1]], [F(1), F(2), F(3)]) == (1, 2)


def test_matmul_exact_and_float():
    A = Matrix.from_rows([[1, 2], [3, 4]])
    assert (A @ A).tolist() == [[7, 10], [15, 22]]
    assert (A @ A).is_exact()
    B = A.to_float()
    assert np.allclose((B @ B).to_numpy(), [[7, 10], [15, 22]])


def test_matrix_json_roundtrip():
    A = Matrix.from_rows([[F(1, 2), -3], [0, F(7, 9)]])
    assert Matrix.from_json(A.to_json()) == A


# --- polynomials -------------------------------------------------------------------


def test_poly_eval_examples():
    P = MatPoly.from_coeffs([col(-2, -1), col(4, 0)])
    assert poly_eval(P, F(1)).vector() == (2, -1)
    assert poly_eval(P, F(1, 2)).vector() == (0, -1)
    I = MatPoly.constant(Matrix.identity(2))
    assert poly_eval(I, F(1, 2)) == Matrix.identity(2)


def test_poly_derivative_examples():
    a0, a1, a2 = col(1), col(2), col(3)
    assert poly_derivative(MatPoly.constant(a0)).is_zero()
    assert poly_derivative(MatPoly.from_coeffs([a0, a1])).coeffs == (a1,)
    assert poly_derivative(MatPoly.from_coeffs([a0, a1, a2]), 2).coeffs == (a2 * 2,)


def test_matpoly_trims_trailing_zeros():
    P = MatPoly.from_coeffs([col(1), col(0)])
    assert P.degree == 0
    assert MatPoly.zero(2, 1).degree == -1


# --- properties ----------------------------------------------------------------------


square2 = st.lists(small, min_size=4, max_size=4).map(lambda xs: Matrix.from_rows([xs[:2], xs[2:]]))
square3 = st.lists(small, min_size=9, max_size=9).map(
    lambda xs: Matrix.from_rows([xs[:3], xs[3:6], xs[6:]]))


@settings(max_examples=60, deadline=None)
@given(square3, st.lists(small, min_size=3, max_size=3))
def test_solve_reproduces_rhs(A, b):
    try:
        x = mat_solve(A, b)
    except SingularMatrix:
        assert mat_det(A) == 0
        return
    assert (A @ Matrix.column(x)).vector() == tuple(b)


@settings(max_examples=60, deadline=None)
@given(square3)
def test_kernel_vectors_are_annihilated(A):
    ker = mat_kernel(A)
    for v in ker:
        assert (A @ Matrix.column(v)).is_zero()
    assert len(ker) == 3 - sympy.Matrix(A.tolist()).rank()
    assert mat_rank(A) == sympy.Matrix(A.tolist()).rank()


@settings(max_examples=60, deadline=None)
@given(square3)
def test_det_matches_sympy(A):
    assert mat_det(A) == sympy.Rational(sympy.Matrix(A.tolist()).det())


@settings(max_examples=40, deadline=None)
@given(square2)
def test_inverse_roundtrip(A):
    if mat_det(A) == 0:
        return
    assert A @ mat_inverse(A) == Matrix.identity(2)


@settings(max_examples=40, deadline=None)
@given(st.lists(small, min_size=1, max_size=5), st.lists(small, min_size=1, max_size=5), small)
def test_poly_product_evaluates_pointwise(p, q, y):
    P = MatPoly.from_entry_polys([[p]])
    Q = MatPoly.from_entry_polys([[q]])
    assert (P @ Q)(y)[0, 0] == P(y)[0, 0] * Q(y)[0, 0]
    assert (P @ Q).entry(0, 0) == spoly_mul(P.entry(0, 0), Q.entry(0, 0))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-10**6, 10**6), min_size=4, max_size=4),
       st.lists(st.integers(-10**6, 10**6), min_size=2, max_size=2))
def test_float_and_exact_agree(xs, b):
    A = Matrix.from_rows([xs[:2], xs[2:]])
    if mat_det(A) == 0:
        return
    exact = np.array([float(v) for v in mat_solve(A, b)])
    approx = np.array(mat_solve(A.to_float(), [float(v) for v in b]))
    scale = np.max(np.abs(exact)) or 1.0
    cond = np.linalg.cond(A.to_numpy())
    assert np.max(np.abs(exact - approx)) / scale < 1e-12 * max(1.0, cond)
