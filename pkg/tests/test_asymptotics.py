from fractions import Fraction

import pytest
from mpmath import mp

from src.analysis import (
    Fp_at_xc,
    G_series,
    ParametrizationEvaluator,
    classify,
    constants,
    predict_and_compare,
    universal_exponents,
    xderiv_series,
)
from src.errors import OutOfScopeError
from src.series import to_mpf


def test_exponents_at_three():
    e = universal_exponents(3)
    assert e.as_tuple() == (
        Fraction(3, 2),
        Fraction(-1, 2),
        Fraction(3, 2),
        Fraction(-3, 2),
        Fraction(1, 2),
    )


@pytest.mark.parametrize(
    "alpha", [Fraction(21, 10), Fraction(5, 2), Fraction(11, 4), Fraction(29, 10), Fraction(3)]
)
def test_exponent_relations(alpha):
    e = universal_exponents(alpha)
    assert e.gamma0 + e.gamma1 == 1
    assert e.beta1 == -e.gamma0
    assert e.beta0 == (e.gamma0 - e.beta1) * e.theta
    assert e.theta * (alpha - 1) == 1


def test_generic_constants(poly_111):
    report = classify(poly_111)
    consts = constants(poly_111, report)
    assert consts.mu > 0
    assert consts.C_q > 0
    with mp.workprec(256):
        assert abs(consts.C_F - mp.sqrt(consts.C_q) / 2) < mp.mpf(10) ** -50
    assert "xhat_second_numeric" in consts.diagnostics


def test_geometric_mu(geometric_half):
    consts = constants(geometric_half, classify(geometric_half))
    # x̂''(1/2) from the closed form at the exact critical point
    ev = ParametrizationEvaluator(geometric_half)
    x2 = ev.xhat_second_at_critical(Fraction(1, 2))
    expected = -(Fraction(1, 4) / 2) * x2 / Fraction(27, 64)
    assert float(consts.mu) == pytest.approx(float(expected), rel=1e-12)


def test_dilute_constants(polylog_dilute):
    report = classify(polylog_dilute)
    consts = constants(polylog_dilute, report)
    assert consts.alpha == Fraction(5, 2)
    assert consts.mu > 0
    assert consts.exponents.beta0 == Fraction(5, 3)


def test_dense_is_out_of_scope(dense_mixture):
    report = classify(dense_mixture)
    with pytest.raises(OutOfScopeError, match="out of scope: dense phase"):
        constants(dense_mixture, report)


def test_root_series_starts_at_f0hat(poly_111):
    report = classify(poly_111)
    consts = constants(poly_111, report)
    series = Fp_at_xc(poly_111, consts, 10)
    ev = ParametrizationEvaluator(poly_111)
    with mp.workprec(256):
        assert abs(series[0] - ev.F0hat(consts.Y_c)) < mp.mpf(10) ** -40
    assert series.error < 1e-40
    assert all(c > 0 for c in series.coefficients)


def test_xderiv_series_is_positive(poly_111):
    consts = constants(poly_111, classify(poly_111))
    series = xderiv_series(poly_111, consts, 20)
    assert len(series) == 21
    assert all(c > 0 for c in series.coefficients[1:])


def _G_closed_form(ws, consts, y):
    # G(y) = prefactor * D'(Y_c)/2 * ((y + phi_c)/sqrt(Q(Y_c, y)) - 1)/y
    phi, x_c, Y_c, mu = (to_mpf(v) for v in (consts.phi_c, consts.x_c, consts.Y_c, consts.mu))
    beta0 = to_mpf(consts.exponents.beta0)
    B = to_mpf(ParametrizationEvaluator(ws).B_values(y, 0)[0])
    root = mp.sqrt((y + phi) ** 2 - 4 * x_c * y * B)
    prefactor = Y_c * mu * x_c / (beta0 * mp.power(mu, beta0))
    return prefactor * to_mpf(consts.D_prime_c) / 2 * ((y + phi) / root - 1) / y


def test_G_series_sums_to_closed_form(poly_111):
    consts = constants(poly_111, classify(poly_111))
    series = G_series(poly_111, consts, 200)
    with mp.workprec(256):
        y = to_mpf(consts.Y_c) / 2
        total = mp.fsum(to_mpf(c) * mp.power(y, p) for p, c in enumerate(series.coefficients))
        expected = _G_closed_form(poly_111, consts, y)
        assert abs(total / expected - 1) < mp.mpf(10) ** -30


def test_G_amplitude_near_critical_point(poly_111):
    consts = constants(poly_111, classify(poly_111))
    e = consts.exponents
    with mp.workprec(256):
        t = mp.mpf(10) ** -3
        value = _G_closed_form(poly_111, consts, to_mpf(consts.Y_c) * (1 - t))
        amplitude = (to_mpf(consts.alpha) - 1) / (2 * mp.power(consts.mu, to_mpf(e.beta0))) * consts.C_F
        ratio = value / (amplitude * mp.power(t, to_mpf(e.beta1)))
    assert float(ratio) == pytest.approx(1, abs=0.05)


def test_unknown_regime(poly_111):
    with pytest.raises(ValueError):
        predict_and_compare(poly_111, "diagonal", classify(poly_111))


@pytest.mark.slow
@pytest.mark.parametrize(
    "regime, kwargs, tolerance",
    [
        ("yfixed", {"p_range": [64, 96, 128, 192, 256]}, 0.1),
        ("x", {"n_range": [200, 250, 300, 350, 400], "p_range": [0]}, 0.05),
    ],
)
def test_log_log_slopes(poly_111, regime, kwargs, tolerance):
    report = classify(poly_111)
    result = predict_and_compare(poly_111, regime, report, **kwargs)
    for slope in result.slopes.values():
        assert slope == pytest.approx(result.expected_slope, abs=tolerance)
    assert result.final_ratio == pytest.approx(1, abs=0.15)
    assert result.ratios_monotone_toward_one()


@pytest.mark.slow
def test_bivariate_ratios(poly_111):
    report = classify(poly_111)
    result = predict_and_compare(poly_111, "bivariate", report, p_range=[8, 10, 12, 14], v=1)
    assert result.expected_slope is None
    assert result.final_ratio == pytest.approx(1, abs=0.25)
    assert result.ratios_monotone_toward_one()


@pytest.mark.slow
@pytest.mark.parametrize("regime", ["xderiv", "gseries"])
def test_derivative_series_slopes(poly_111, regime):
    report = classify(poly_111)
    result = predict_and_compare(poly_111, regime, report, p_range=[64, 96, 128, 192, 256])
    assert result.slopes["p"] == pytest.approx(result.expected_slope, abs=0.15)
