import random
from fractions import Fraction

import pytest
from mpmath import mp

from src.errors import BackendMismatchError, SeriesError
from src.series import (
    Backend,
    BivariateSeries,
    UnivariateSeries,
    arith,
    compose,
    divide_out_square,
    multiply_square,
    reverse,
)


def series(*coeffs, order=None, backend=Backend.exact()):
    order = len(coeffs) - 1 if order is None else order
    return UnivariateSeries.from_coeffs([Fraction(c) for c in coeffs], order, backend)


def test_reciprocal_of_one_minus_t():
    inv = series(1, -1, order=8).reciprocal()
    assert inv.coeffs == tuple(Fraction(1) for _ in range(9))


def test_sqrt_of_square_is_exact():
    root = series(1, 2, 1, order=10).sqrt()
    assert root.coeffs[:2] == (1, 1)
    assert not any(root.coeffs[2:])


def test_sqrt_needs_rational_square_on_exact_backend():
    with pytest.raises(SeriesError):
        series(2, 1, order=3).sqrt()


def test_reverse_gives_catalan_numbers():
    g = reverse(series(0, 1, -1, order=9))
    assert list(g.coeffs[1:]) == [1, 1, 2, 5, 14, 42, 132, 429, 1430]
    back = compose(series(0, 1, -1, order=9), g)
    assert back.coeffs == series(0, 1, order=9).coeffs


def _random_series(rng, order, head=()):
    tail = [Fraction(rng.randint(-6, 6), rng.randint(1, 5)) for _ in range(order + 1 - len(head))]
    coeffs = list(head) + tail
    return series(*coeffs, order=order)


@pytest.mark.parametrize("seed", range(5))
def test_ring_axioms(seed):
    rng = random.Random(seed)
    a, b, c = (_random_series(rng, 10) for _ in range(3))
    assert (a + b).coeffs == (b + a).coeffs
    assert (a * b).coeffs == (b * a).coeffs
    assert ((a * b) * c).coeffs == (a * (b * c)).coeffs
    assert (a * (b + c)).coeffs == (a * b + a * c).coeffs
    assert ((a - b) + b).coeffs == a.coeffs
    assert (a * series(1, order=10)).coeffs == a.coeffs


def test_reverse_is_an_involution():
    rng = random.Random(2024)
    for _ in range(50):
        unit = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 4))
        f = _random_series(rng, 12, head=(0, unit))
        assert reverse(reverse(f)).coeffs == f.coeffs


def test_compose_geometric_with_quadratic():
    geometric = series(*([1] * 11), order=10)
    fib = compose(geometric, series(0, 1, 1, order=10))
    assert list(fib.coeffs) == [1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89]


def test_reverse_rejects_nonzero_constant():
    with pytest.raises(SeriesError):
        reverse(series(1, 1, order=4))


def test_shift_down_needs_divisibility():
    with pytest.raises(SeriesError):
        series(1, 1, order=3).shift_down(1)
    assert series(0, 0, 3, order=3).shift_down(2).coeffs == (3, 0)


def test_mixing_backends_raises():
    exact = series(1, 1, order=3)
    floats = UnivariateSeries.constant(1, 3, Backend.big_float(64))
    with pytest.raises(BackendMismatchError):
        exact + floats
    with pytest.raises(BackendMismatchError):
        Backend.exact().coerce(mp.mpf("0.5"))


def test_arith_dispatch():
    a = series(1, 2, 3)
    b = series(1, 1, 1)
    assert arith(a, b, "add").coeffs == (2, 3, 4)
    assert arith(a, None, "derivative").coeffs == (2, 6)
    assert arith(a, 2, "scale").coeffs == (2, 4, 6)
    with pytest.raises(ValueError):
        arith(a, b, "pow")


def test_truncation_is_the_smaller_order():
    product = series(1, 1, order=5) * series(1, 1, order=3)
    assert product.trunc_order == 3
    assert product.coeffs == (1, 2, 1, 0)


def test_big_float_reciprocal_matches_exact():
    floats = Backend.big_float(128)
    inv = UnivariateSeries.from_coeffs([3, 1], 6, floats).reciprocal()
    exact = series(3, 1, order=6).reciprocal()
    with mp.workprec(128):
        for a, b in zip(inv.coeffs, exact.coeffs):
            assert abs(a - mp.mpf(b.numerator) / b.denominator) < mp.mpf(2) ** -120


def test_divide_out_the_diagonal_square():
    # (v - u)^2 with u outer: slices v^2, -2v, 1
    Q = BivariateSeries.from_slices([series(0, 0, 1, order=6), series(0, -2, order=6), series(1, order=6)])
    q, diagonal = divide_out_square(Q, diagonal=True)
    assert q.slices[0].coeffs == series(1, order=4).coeffs
    assert all(s.is_zero() for s in q.slices[1:])
    assert diagonal[0] == 1


def test_multiply_square_undoes_division():
    q = BivariateSeries.from_slices([series(1, 2, 3, order=8), series(4, 5, order=8)])
    Q = multiply_square(q)
    recovered = divide_out_square(Q)
    for k in range(2):
        order = recovered.slices[k].trunc_order
        assert recovered.slices[k].coeffs == q.slices[k].truncate(order).coeffs


def test_divide_out_square_reports_remainder():
    Q = BivariateSeries.from_slices([series(0, 1, order=4)])
    with pytest.raises(SeriesError):
        divide_out_square(Q)


def test_bivariate_transpose_and_diagonal():
    F = BivariateSeries.from_slices([series(1, 2, order=2), series(3, 4, order=2)])
    T = F.transpose()
    assert T.coefficient(1, 0) == 2
    assert T.coefficient(0, 1) == 3
    assert F.coefficient(1, 1) == 4
