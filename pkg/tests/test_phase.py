from fractions import Fraction

import pytest
from mpmath import mp

from src.analysis import (
    DENSE,
    DENSE_OUT_OF_SCOPE,
    DILUTE,
    DILUTE_MINUS,
    GENERIC,
    GENERIC_PLUS,
    classify,
    count_sign_changes,
    find_Yc_xc,
    probabilistic_criterion,
    tune_to_dilute,
)
from src.errors import AssumptionError
from src.series import to_mpf
from src.weights import Geometric, Mixture, Polylog, Polynomial, equivalent, mixture_path


def test_poly_101_critical_point(poly_101):
    report = classify(poly_101)
    assert report.phase == GENERIC
    assert report.refinement == GENERIC_PLUS
    assert report.alpha == 3
    assert report.rho is None
    with mp.workprec(256):
        Y_c = mp.sqrt(2 / mp.sqrt(3) - 1)
        x_c = Y_c * (1 + Y_c**2) / (1 + 3 * Y_c**2) ** 2
        assert abs(report.Y_c - Y_c) < mp.mpf(10) ** -18
        assert abs(report.x_c - x_c) < mp.mpf(10) ** -18
    assert float(report.Y_c) == pytest.approx(0.393319, abs=1e-6)


def test_geometric_critical_point(geometric_half):
    Y_c, x_c = find_Yc_xc(geometric_half)
    assert abs(Y_c - mp.mpf(1) / 2) < mp.mpf(10) ** -18
    assert abs(x_c - mp.mpf(27) / 64) < mp.mpf(10) ** -18


def test_poly_111_is_generic(poly_111):
    report = classify(poly_111)
    assert report.refinement == GENERIC_PLUS
    assert float(report.Y_c) == pytest.approx(0.357, abs=1e-3)
    assert float(report.x_c) == pytest.approx(0.1206, abs=1e-4)


def test_dense_mixture(dense_mixture):
    report = classify(dense_mixture)
    assert report.phase == DENSE
    assert report.refinement == DENSE_OUT_OF_SCOPE
    assert report.alpha is None
    assert not report.in_scope
    assert float(report.Y_c) == 1.0


def test_tuned_polylog_is_dilute(polylog_dilute):
    report = classify(polylog_dilute)
    assert report.phase == DILUTE
    assert report.refinement == DILUTE_MINUS
    assert report.alpha == Fraction(5, 2)
    assert report.marginal


@pytest.mark.parametrize("name", ["poly_111", "geometric_half"])
@pytest.mark.parametrize("lam, r", [(Fraction(2), Fraction(1, 2)), (Fraction(1, 3), Fraction(5, 4))])
def test_classification_is_invariant_under_equivalence(name, lam, r, request):
    ws = request.getfixturevalue(name)
    base = classify(ws)
    scaled = classify(equivalent(ws, lam, r))
    assert (scaled.phase, scaled.refinement, scaled.alpha) == (base.phase, base.refinement, base.alpha)
    with mp.workprec(256):
        # x̂ of the equivalent sequence is x̂(rY) / (lambda r)
        assert abs(to_mpf(scaled.Y_c) - to_mpf(base.Y_c) / to_mpf(r)) < mp.mpf(10) ** -18
        assert abs(to_mpf(scaled.x_c) - to_mpf(base.x_c) / to_mpf(lam * r)) < mp.mpf(10) ** -18


def test_invalid_weights_are_rejected():
    with pytest.raises(AssumptionError):
        classify(Polynomial.of(0, 1, 1))


@pytest.mark.parametrize(
    "name, value",
    [("half_zero_half", 3), ("geometric_half", 5)],
)
def test_criterion_value(name, value, request):
    result = probabilistic_criterion(request.getfixturevalue(name))
    assert result.value == value
    assert result.decisive
    assert result.predicted_phase == GENERIC


def test_criterion_agrees_with_dense_classification(dense_mixture):
    result = probabilistic_criterion(dense_mixture)
    assert result.decisive
    assert result.value < 1
    assert result.predicted_phase == classify(dense_mixture).phase == DENSE


def _probability_weights(kind, *params):
    if kind == "polylog":
        beta, b0 = params
        return Polylog.probability(Fraction(beta), Fraction(b0))
    if kind == "mixture":
        # point masses at 0 and 1 plus a normalized l^(-7/2) tail
        w0, w1, wp = (Fraction(w) for w in params)
        return Mixture.of(
            (w0, Polynomial.of(1)),
            (w1, Polynomial.of(0, 1)),
            (wp, Polylog.probability(Fraction(7, 2))),
        )
    if kind == "geometric":
        (p,) = params
        return Geometric(1 - Fraction(p), Fraction(p))
    return Polynomial.of(*(Fraction(c) for c in params))


@pytest.mark.parametrize(
    "kind, params, expected",
    [
        ("polylog", ("7/2", "1/10"), GENERIC),
        ("polylog", ("7/2", "3/10"), GENERIC),
        ("polylog", ("7/2", "1/2"), GENERIC),
        ("polylog", ("7/2", "4/5"), DENSE),
        ("polylog", ("7/2", "7/8"), DENSE),
        ("polylog", ("7/2", "19/20"), DENSE),
        ("polylog", ("9/2", "1/10"), GENERIC),
        ("polylog", ("9/2", "1/4"), GENERIC),
        ("polylog", ("9/2", "1/2"), DENSE),
        ("polylog", ("9/2", "7/10"), DENSE),
        ("polylog", ("9/2", "9/10"), DENSE),
        ("mixture", ("1/10", "4/5", "1/10"), GENERIC),
        ("mixture", ("1/5", "7/10", "1/10"), GENERIC),
        ("mixture", ("21/100", "39/50", "1/100"), DENSE),
        ("mixture", ("3/5", "3/10", "1/10"), DENSE),
        ("geometric", ("1/3",), GENERIC),
        ("geometric", ("1/2",), GENERIC),
        ("polynomial", ("1/4", "1/4", "1/2"), GENERIC),
        ("polynomial", ("1/2", "0", "1/2"), GENERIC),
    ],
)
def test_phase_routes_agree(kind, params, expected):
    with mp.workprec(256):
        ws = _probability_weights(kind, *params)
        criterion = probabilistic_criterion(ws)
        report = classify(ws)
    assert criterion.decisive
    assert criterion.predicted_phase == report.phase == expected


def test_phase_routes_on_config_weights(dense_mixture, polylog_dilute):
    with mp.workprec(256):
        assert probabilistic_criterion(dense_mixture).predicted_phase == DENSE
        # c = 1 with a tuned b_0 has total mass B(1) != 1
        criterion = probabilistic_criterion(polylog_dilute)
    assert not criterion.decisive
    assert criterion.predicted_phase is None
    assert criterion.reason == "not a probability distribution"
    assert classify(polylog_dilute).phase == DILUTE


def test_criterion_needs_probability(poly_101):
    result = probabilistic_criterion(poly_101)
    assert not result.decisive
    # m = 2, sigma^2 = 0
    assert result.value == 4


def test_single_sign_change(poly_101, poly_111):
    assert count_sign_changes(poly_101, 1, points=10_000) == 1
    assert count_sign_changes(poly_111, 1, points=10_000) == 1


@pytest.mark.slow
def test_tuning_reaches_dilute_boundary(half_zero_half, dense_mixture):
    result = tune_to_dilute(half_zero_half, dense_mixture, tolerance=1e-12)
    assert result.upper - result.lower <= 1e-12
    step = Fraction(1, 1000)
    assert 0 < result.p_c < 1
    assert classify(mixture_path(half_zero_half, dense_mixture, result.p_c - step)).phase == GENERIC
    assert classify(mixture_path(half_zero_half, dense_mixture, result.p_c + step)).phase == DENSE


def test_tuning_needs_generic_start(dense_mixture, poly_101):
    with pytest.raises(AssumptionError):
        tune_to_dilute(dense_mixture, poly_101)
