from fractions import Fraction

import pytest

from src.analysis import solve_functional_equation
from src.errors import BudgetExceededError, OutOfScopeError
from src.parking import (
    catalan,
    count_fully_packed,
    dyck_words,
    enumerate_Fnp,
    enumeration_cost,
    forest_convolution_table,
    plane_trees,
)
from src.series import Backend

N_MAX = 7


@pytest.mark.parametrize("m", range(7))
def test_dyck_words_are_catalan_many(m):
    words = list(dyck_words(m))
    assert len(words) == catalan(m)
    assert len(set(words)) == len(words)
    assert words == sorted(words)


def test_dyck_word_order():
    words = list(dyck_words(3))
    assert words[0] == "((()))"
    assert words[-1] == "()()()"


def test_plane_trees_of_size_three():
    assert sorted(plane_trees(3)) == [(1, 1, 0), (2, 0, 0)]


def test_single_vertex_row(poly_101):
    table = enumerate_Fnp(poly_101, 1)
    assert table.values[1] == {1: Fraction(1)}
    assert table.probability(1, 1) == Fraction(1, 2)


@pytest.mark.parametrize("name", ["poly_101", "poly_111", "poly_1001", "half_zero_half"])
def test_enumeration_matches_functional_equation(name, request):
    ws = request.getfixturevalue(name)
    table = enumerate_Fnp(ws, N_MAX)
    P = N_MAX * (ws.degree - 1) + 1
    F, _ = solve_functional_equation(ws, N_MAX, P, Backend.exact())
    for n in range(1, N_MAX + 1):
        for p in range(P + 1):
            assert table.get(n, p) == F.coefficient(n, p), (n, p)


@pytest.mark.parametrize("name", ["poly_111", "poly_1001"])
def test_forest_counter_matches_enumeration(name, request):
    ws = request.getfixturevalue(name)
    table = enumerate_Fnp(ws, 6)
    forest = forest_convolution_table(ws, 6)
    for n in range(1, 7):
        assert forest.values[n] == table.values[n]


def test_count_fully_packed():
    assert count_fully_packed(1, 1) == 1
    assert count_fully_packed(1, 2) == 2
    assert count_fully_packed(2, 1) == 1
    # labels 0..2 on a path of two: child 1 or 2, root with total >= 1
    assert count_fully_packed(2, 2) == 5


def test_budget_returns_partial_table(poly_111):
    assert enumeration_cost(poly_111, 4) == 5 * 3**4
    with pytest.raises(BudgetExceededError) as info:
        enumerate_Fnp(poly_111, 6, budget=100)
    partial = info.value.partial
    assert partial.n_max == 3
    assert sorted(partial.values) == [1, 2, 3]
    assert partial.iterations == 3 + 9 + 54


def test_enumeration_needs_finite_exact_weights(geometric_half):
    with pytest.raises(OutOfScopeError):
        enumerate_Fnp(geometric_half, 3)
