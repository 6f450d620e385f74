import random
from fractions import Fraction as F

import mpmath
import numpy as np
import pytest
import sympy
from scipy.special import roots_jacobi

from mvop.families import build_family, build_family_top, build_scalar_family, construct_P, grid_families
from mvop.numeric import MatPoly, Matrix, PiRational
from mvop.spectra import EigKey
from mvop.verification import (
    check_irreducibility_heuristic,
    check_positivity,
    check_reduction3,
    check_symmetry,
    check_weight_real,
    float_inner_product,
    gauss_jacobi,
    gram_sequence,
    inner_product,
    moment,
    poly_matrix,
    random_vector_poly,
    run_suite,
    scalar_orthogonality,
)

y = sympy.Symbol("y")


def e(i, m=2, shift=0):
    v = Matrix.column([int(j == i) for j in range(m)])
    return MatPoly.constant(v).shift(shift)


def test_moment_examples():
    assert moment(0, 4) == PiRational(F(1, 6), 0)
    assert moment(0, 3) == PiRational(F(1, 8), 1)


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
def test_moments_against_quadrature(n):
    mpmath.mp.dps = 30
    a = mpmath.mpf(n) / 2 - 1
    for k in (0, 1, 2, 5, 9):
        ref = mpmath.quad(lambda t: t ** k * (t * (1 - t)) ** a, [0, 1])
        m = moment(k, n)
        ours = mpmath.mpf(m.coeff.numerator) / m.coeff.denominator * mpmath.pi ** m.pi_power
        assert abs(ours - ref) < mpmath.mpf(10) ** -25


@pytest.mark.parametrize("n", range(3, 10))
def test_moment_parity_and_odd_symmetry(n):
    for k in range(41):
        assert moment(k, n).pi_power == n % 2
    # int (2y-1) (y(1-y))^a = 2 mu_1 - mu_0 = 0
    assert 2 * moment(1, n).coeff - moment(0, n).coeff == 0


def test_inner_product_examples():
    f = build_family(4, 1)
    assert inner_product(f, e(0), e(1)).is_zero()
    assert inner_product(f, e(0), e(0)).entry(0, 0) == PiRational(F(8, 5), -1)
    ref = 3 / sympy.pi * sympy.integrate(((2 * y - 1) ** 2 + 3) * y * (1 - y), (y, 0, 1))
    assert sympy.simplify(ref - sympy.Rational(8, 5) / sympy.pi) == 0
    P10 = construct_P(f, EigKey(1, 0)).P
    P00 = construct_P(f, EigKey(0, 0)).P
    assert inner_product(f, P10, P00).is_zero()


def test_inner_product_shape_check():
    with pytest.raises(ValueError):
        inner_product(build_family(4, 1), e(0, 3), e(0, 3))


def test_gram_examples():
    rep = gram_sequence(build_family(4, 1), 0)
    assert rep.status == {(0, 0): "diagonal"}
    assert rep.passed
    rep = gram_sequence(build_family(5, 1), 3)
    assert rep.passed and all(rep.status[(w, v)] == "zero" for w in range(4) for v in range(4) if w != v)
    rep = gram_sequence(build_family_top(1), 2)
    assert rep.passed
    assert rep.to_json()["blocks"][0]["pi"] == 1


def test_gram_diagonal_positive_times_pi_grade():
    for fam in grid_families(range(3, 8)):
        rep = gram_sequence(fam, 3)
        for w in range(4):
            G = rep.blocks[(w, w)]
            # norm (pi^-1 for even n) times moments (pi for odd n)
            assert G.pi_power == (-1 if fam.n % 2 == 0 else 1)
            assert all(G.coeffs[i, i] > 0 for i in range(G.shape[0]))


def test_perturbed_sequence_is_not_orthogonal():
    f = build_family(4, 1)
    P0, P1 = poly_matrix(f, 0), poly_matrix(f, 1)
    assert not inner_product(f, P1 + P0, P0).is_zero()


def test_float_gram_agrees_with_exact():
    f = build_family(5, 1)
    A, B = poly_matrix(f, 3), poly_matrix(f, 3)
    exact = inner_product(f, A, B)
    approx = float_inner_product(f, A, B)
    ref = np.array([[float(exact.entry(i, j)) for j in range(2)] for i in range(2)])
    assert np.allclose(approx, ref, rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("num, a", [(3, 0.5), (6, 1.0), (9, 1.5), (12, 3.5)])
def test_gauss_jacobi_matches_scipy(num, a):
    x, w = gauss_jacobi(num, a, a)
    xr, wr = roots_jacobi(num, a, a)
    assert np.allclose(x, xr, atol=1e-13)
    assert np.allclose(w, wr, rtol=1e-11)


def test_symmetry_examples():
    f = build_family(4, 1)
    A = random_vector_poly(random.Random(3), 2, 4)
    assert check_symmetry(f, A, A).is_zero()
    assert check_symmetry(f, e(0), e(1, shift=1)).is_zero()


@pytest.mark.parametrize("fam", grid_families(range(3, 7)), ids=lambda f: f.family_id)
def test_symmetry_random_pairs(fam):
    rng = random.Random(17)
    for _ in range(8):
        A = random_vector_poly(rng, fam.size, rng.randint(0, 6))
        B = random_vector_poly(rng, fam.size, rng.randint(0, 6))
        assert check_symmetry(fam, A, B).is_zero()


def test_symmetry_fails_for_wrong_weight():
    """Sanity: the check is not vacuous. Swapping the dims breaks symmetry."""
    import dataclasses
    f = build_family(6, 1)
    bad = dataclasses.replace(f, p=2)
    rng = random.Random(1)
    A = random_vector_poly(rng, 2, 3)
    B = random_vector_poly(rng, 2, 3)
    assert not check_symmetry(bad, A, B).is_zero()


def test_positivity_examples():
    f = build_family(4, 1)
    assert check_positivity(f, [F(1, 2), F(1, 4)]) == [True, True]
    assert check_positivity(build_family_top(1), [F(1, 10), F(1, 2), F(9, 10)]) == [True] * 3
    with pytest.raises(ValueError):
        check_positivity(f, [F(0)])


def test_reduction_examples():
    assert check_reduction3(1, [F(1, 3)]) == 0
    assert check_reduction3(2, [F(1, 2)]) == 0
    for ell in range(1, 5):
        assert check_reduction3(ell, [F(1)]) == 0


def test_reduction_oracle_with_sqrt2():
    f = build_family_top(2)
    from mvop.families import weight_poly
    part = weight_poly(f).part
    M = sympy.Matrix([[1, 0, 1], [0, sympy.sqrt(2), 0], [-1, 0, 1]])
    for yv in (F(1, 7), F(2, 3)):
        W = sympy.Matrix(part(yv).tolist()).applyfunc(sympy.Rational)
        R = sympy.simplify(M * W * M.T)
        assert [R[0, 2], R[2, 0], R[1, 2], R[2, 1]] == [0, 0, 0, 0]


def test_irreducibility_examples():
    assert check_irreducibility_heuristic(build_family(4, 1))
    assert check_irreducibility_heuristic(build_family(5, 1))
    with pytest.raises(ValueError):
        check_irreducibility_heuristic(build_family_top(1))


def test_weight_real():
    for ell in range(1, 5):
        assert check_weight_real(build_family_top(ell))


def test_scalar_orthogonality():
    for ell in (2, 3):
        for d in range(4):
            f = build_scalar_family(ell, d)
            for w in range(d, 9):
                for v in range(d, 9):
                    val = scalar_orthogonality(f, w, v).coeff
                    assert (val == 0) if w != v else (val > 0)


@pytest.mark.parametrize(
    "fam, w_max",
    [(build_family(4, 1), 8), (build_family_top(1), 6), (build_scalar_family(2, 1), 8)],
    ids=["n4-p1", "top-l1", "scalar-l2-d1"],
)
def test_run_suite_examples(fam, w_max):
    rep = run_suite(fam, w_max, 1e-9)
    assert rep.passed, rep.failures
    doc = rep.to_json()
    assert doc["passed"] and doc["failures"] == []
    assert {"name", "status", "residual", "elapsed_ms"} <= set(doc["checks"][0])


def test_run_suite_float_tolerance_semantics():
    rep = run_suite(build_family(4, 1), 6, 1e-15, mode="float")
    assert not rep.passed
    assert set(rep.failures) <= {"gram", "conjugation"}
    assert run_suite(build_family(4, 1), 6, 1e-9, mode="float").passed


def test_run_suite_records_seed():
    rep = run_suite(build_family(5, 1), 2, seed=42)
    sym = next(c for c in rep.checks if c.name == "symmetry")
    assert "seed=42" in sym.detail
