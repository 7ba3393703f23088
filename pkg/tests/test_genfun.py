from fractions import Fraction

import pytest
from mpmath import mp

from src.analysis import (
    ParametrizationEvaluator,
    build_parametrization,
    f0_series,
    fhat_series,
    lagrange_coefficients,
    slice_series,
    solve_functional_equation,
    solve_Yhat,
)
from src.series import Backend
from src.weights import equivalent


def test_first_coefficients(poly_101):
    F, F0 = solve_functional_equation(poly_101, 6, 6)
    assert F.coefficient(1, 0) == 0
    assert F.coefficient(1, 1) == 1
    assert F.coefficient(2, 0) == 1
    assert F.coefficient(2, 1) == 0
    assert F.coefficient(2, 2) == 1
    assert list(F0.coeffs) == [F.coefficient(n, 0) for n in range(7)]


def test_coefficients_are_nonnegative(poly_111):
    F, _ = solve_functional_equation(poly_111, 10, 10)
    assert all(c >= 0 for _, _, c in F.rows())


def test_bad_truncation(poly_101):
    with pytest.raises(ValueError):
        solve_functional_equation(poly_101, 0, 4)


def test_xhat_and_its_inverse(poly_101):
    bundle = build_parametrization(poly_101, 7)
    assert list(bundle.xhat.coeffs[:6]) == [0, 1, 0, -5, 0, 21]
    assert list(bundle.Yhat.coeffs[:6]) == [0, 1, 0, 5, 0, 54]


def test_lagrange_matches_reversion(poly_111):
    bundle = build_parametrization(poly_111, 15)
    assert lagrange_coefficients(bundle, 15)[1:] == list(bundle.Yhat.coeffs[1:16])


def test_newton_yhat_matches_reversion(poly_111):
    bundle = build_parametrization(poly_111, 20)
    assert solve_Yhat(poly_111, 20).coeffs == bundle.Yhat.coeffs


@pytest.mark.parametrize("name", ["poly_101", "poly_111", "half_zero_half"])
def test_f0_matches_functional_equation(name, request):
    ws = request.getfixturevalue(name)
    _, F0 = solve_functional_equation(ws, 12, 4)
    assert f0_series(ws, 12).coeffs == F0.coeffs


def test_slices_match_functional_equation(poly_111):
    F, _ = solve_functional_equation(poly_111, 8, 3)
    slices = slice_series(poly_111, 8, [0, 1, 3])
    for p, s in slices.items():
        assert list(s.coeffs) == [F.coefficient(n, p) for n in range(9)]


def test_fhat_constant_term_is_f0hat(half_zero_half):
    Fhat = fhat_series(half_zero_half, 6, 2)
    bundle = build_parametrization(half_zero_half, 6, invert=False)
    assert Fhat.slices[0].coeffs == bundle.F0hat.coeffs


def test_geometric_critical_point_is_exact(geometric_half):
    ev = ParametrizationEvaluator(geometric_half)
    Y = Fraction(1, 2)
    assert ev.B_values(Y, 2) == [Fraction(2, 3), Fraction(4, 9), Fraction(16, 27)]
    assert ev.D(Y) == Fraction(8, 9)
    assert ev.xhat_numerator(Y) == 0
    assert ev.xhat_prime(Y) == 0
    assert ev.xhat(Y) == Fraction(27, 64)


def test_q_on_the_diagonal_is_phi_prime(poly_101):
    ev = ParametrizationEvaluator(poly_101)
    with mp.workprec(128):
        Y = mp.mpf("0.2")
        near = ev.q(Y, Y + mp.mpf(10) ** -8)
        assert abs(near - ev.q(Y, Y)) < mp.mpf(10) ** -6


def test_fhat_point_value_matches_series(poly_101):
    ev = ParametrizationEvaluator(poly_101)
    backend = Backend.big_float(128)
    Fhat = fhat_series(poly_101, 30, 4, backend)
    with mp.workprec(128):
        Y, y = mp.mpf("0.1"), mp.mpf("0.01")
        value = sum(Fhat.slices[p].evaluate(Y) * y**p for p in range(5))
        # truncation in y leaves an O(y^5) remainder
        assert abs(ev.Fhat(Y, y) - value) < mp.mpf("1e-6")


def test_f0hat_point_value_matches_series(poly_101):
    ev = ParametrizationEvaluator(poly_101)
    bundle = build_parametrization(poly_101, 60, invert=False)
    exact = ev.F0hat(Fraction(1, 10))
    assert isinstance(exact, Fraction)
    with mp.workprec(128):
        Y = mp.mpf(1) / 10
        assert abs(ev.F0hat(Y) - mp.mpf(exact.numerator) / exact.denominator) < mp.mpf(10) ** -30
        assert abs(ev.F0hat(Y) - bundle.F0hat.evaluate(Y)) < mp.mpf(10) ** -30


def test_equivalent_weights_rescale_coefficients(poly_111):
    lam, r = Fraction(3), Fraction(1, 2)
    F, _ = solve_functional_equation(poly_111, 8, 8)
    G, _ = solve_functional_equation(equivalent(poly_111, lam, r), 8, 8)
    for n in range(9):
        for p in range(9):
            assert G.coefficient(n, p) == lam**n * r ** (n + p) * F.coefficient(n, p)


@pytest.mark.parametrize("name, d", [("poly_111", 2), ("poly_1001", 3)])
def test_overflow_is_bounded_by_surplus_cars(name, d, request):
    # at most d cars per vertex, so p = cars - n <= (d - 1) n
    F, _ = solve_functional_equation(request.getfixturevalue(name), 6, 16)
    for n in range(1, 7):
        assert all(F.coefficient(n, p) == 0 for p in range((d - 1) * n + 1, 17))
        assert F.coefficient(n, (d - 1) * n) > 0


def test_q_is_one_at_the_origin(poly_111):
    ev = ParametrizationEvaluator(poly_111)
    for y in (Fraction(1, 7), Fraction(1, 3), Fraction(2, 5)):
        assert ev.q(0, y) == 1
    bundle = build_parametrization(poly_111, 20, invert=False)
    q = bundle.q_series([20] * 11)
    assert q.coefficient(0, 0) == 1
    assert all(q.coefficient(k, 0) == 0 for k in range(1, 11))
