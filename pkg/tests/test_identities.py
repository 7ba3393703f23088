import pytest

from src.analysis import (
    IdentityCheck,
    IdentityReport,
    build_parametrization,
    consistency_compose,
    identity_suite,
    lagrange_check,
    require_identities,
)
from src.errors import InconsistencyError
from src.series import UnivariateSeries, compose


@pytest.mark.parametrize("name", ["poly_101", "half_zero_half"])
def test_identity_suite_vanishes(name, request):
    report = identity_suite(request.getfixturevalue(name), order=40)
    assert report.checks
    assert report.all_passed, report.failures


def test_identity_suite_for_geometric(geometric_half):
    report = identity_suite(geometric_half, order=20)
    assert report.all_passed, report.failures


def test_identity_suite_needs_exact_weights(dense_mixture):
    with pytest.raises(ValueError):
        identity_suite(dense_mixture, order=10)


def test_round_trip_is_exact(poly_111):
    report = consistency_compose(poly_111, 15, 15)
    assert report.exact_match
    assert report.to_dict()["discrepancy"] == "0"


@pytest.mark.slow
@pytest.mark.parametrize("name", ["poly_101", "half_zero_half"])
def test_round_trip_at_order_25(name, request):
    report = consistency_compose(request.getfixturevalue(name), 25, 25)
    assert report.exact_match


def test_xhat_of_yhat_is_x_to_order_64(poly_111):
    bundle = build_parametrization(poly_111, 64)
    identity = compose(bundle.xhat, bundle.Yhat)
    assert identity.coeffs == UnivariateSeries.variable(64).coeffs


def test_lagrange_check(poly_1001):
    check = lagrange_check(poly_1001, 20)
    assert check.passed
    assert check.residual == "0"


def test_require_identities_raises_on_failure():
    report = IdentityReport(
        family="polynomial",
        order=10,
        checks=[IdentityCheck("x̂ diagonal", True, 10), IdentityCheck("q diagonal", False, 10, "1/3")],
    )
    assert report.failures == ["q diagonal"]
    with pytest.raises(InconsistencyError):
        require_identities(report)
