from fractions import Fraction as F

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from mvop.errors import NonTruncating, OutOfRange
from mvop.families import build_family, build_family_top, eigenvalue, grid_families, keys_for
from mvop.hyper import (
    HyperParams,
    apply_D,
    detect_truncation,
    gauss_2f1_poly,
    huv_coefficient,
    huv_coefficients,
    matrix_hyper_poly,
    truncation_factor,
)
from mvop.numeric import MatPoly, Matrix

P41 = build_family(4, 1).params
y = sympy.Symbol("y")


def test_huv_zero_is_identity():
    assert huv_coefficient(P41, F(-3), 0) == Matrix.identity(2)


@pytest.mark.parametrize(
    "lam, expected",
    [(-7, [[F(-9, 4), F(1, 2)], [F(3, 4), F(-3, 2)]]), (-1, [[0, F(-1, 4)], [0, F(3, 4)]])],
)
def test_huv_examples(lam, expected):
    assert huv_coefficient(P41, F(lam), 1).tolist() == expected


def test_truncation_factor_examples():
    assert truncation_factor(P41, F(-7), 1) == Matrix.diag([0, 2])
    assert truncation_factor(P41, F(-1), 0) == Matrix.diag([0, 2])
    top = build_family_top(1).params
    for w in range(6):
        lam = F(-w * (w + 4) - 1)
        assert truncation_factor(top, lam, w) == Matrix.diag([1, 0, 1])


def test_detect_truncation_examples():
    t = detect_truncation(P41, F(-7), 30)
    assert t.w == 1 and t.kernel == [(1, 0)]
    t = detect_truncation(P41, F(-3), 30)
    assert t.w == 0 and t.kernel == [(0, 1)]
    assert detect_truncation(P41, F(-5), 30) is None


def test_matrix_hyper_poly_examples():
    P = matrix_hyper_poly(P41, F(-1), (1, 0), 0)
    assert P.degree == 0 and P.coeff(0).vector() == (1, 0)
    P = matrix_hyper_poly(P41, F(-7), (-2, -1), 1)
    assert P.column_coeffs() == [[-2, -1], [4, 0]]
    with pytest.raises(NonTruncating):
        matrix_hyper_poly(P41, F(-7), (1, 0), 1)


def test_apply_D_on_constants_is_minus_V():
    e2 = MatPoly.constant(Matrix.column([0, 1, 0]))
    fam = build_family_top(2)
    assert apply_D(fam.params, e2).coeffs == ((e2.coeff(0) * F(-fam.ell)),)


def test_params_validation():
    with pytest.raises(ValueError):
        HyperParams(Matrix.identity(2), Matrix.identity(3), Matrix.identity(2))


@pytest.mark.parametrize("fam", grid_families(range(4, 10)), ids=lambda f: f.family_id)
def test_truncation_is_unique_and_kernel_predicted(fam):
    for w in range(13):
        for key in keys_for(fam, w):
            t = detect_truncation(fam.params, eigenvalue(fam, key), w + fam.n + 4)
            assert t.w == w
            if fam.kind == "2x2":
                expected = [tuple(F(int(i == key.delta)) for i in range(2))]
            elif key.delta == 0:
                expected = [(0, 1, 0)]
            else:
                expected = [(1, 0, 0), (0, 0, 1)]
            assert t.kernel == [tuple(map(F, v)) for v in expected]


@pytest.mark.parametrize("fam", grid_families([4, 5, 7]), ids=lambda f: f.family_id)
def test_recursion_by_multiplication(fam):
    lam = F(-13, 3)
    cs = huv_coefficients(fam.params, lam, 8)
    for j in range(8):
        lhs = fam.params.C.add_scalar(j) @ cs[j + 1]
        assert lhs == truncation_factor(fam.params, lam, j) @ cs[j]


def test_gauss_examples():
    assert gauss_2f1_poly(0, 5, 3) == (1,)
    assert gauss_2f1_poly(-1, 6, 4) == (1, F(-3, 2))
    assert gauss_2f1_poly(-1, F(7, 3), F(7, 3)) == (1, -1)


def test_gauss_invalid():
    with pytest.raises(OutOfRange):
        gauss_2f1_poly(-2, 1, -1)
    with pytest.raises(OutOfRange):
        gauss_2f1_poly(1, 1, 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 7), st.fractions(-10, 10, max_denominator=6),
       st.fractions(F(1, 6), 12, max_denominator=6))
def test_gauss_matches_sympy(w, b, c):
    ours = gauss_2f1_poly(-w, b, c)
    ref = sympy.Poly(sympy.hyperexpand(sympy.hyper([-w, sympy.Rational(b.numerator, b.denominator)],
                                                    [sympy.Rational(c.numerator, c.denominator)], y)), y)
    ref_coeffs = [F(int(r.p), int(r.q)) for r in reversed(ref.all_coeffs())]
    assert list(ours) == ref_coeffs[: len(ours)] and all(x == 0 for x in ref_coeffs[len(ours):])
    if all(b + k != 0 for k in range(w)):
        assert len(ours) - 1 == w
