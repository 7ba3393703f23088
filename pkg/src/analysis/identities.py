"""
Executable identities of the parametrization.

All checks run on the exact backend and compare series for exact equality.
Bivariate series in (Y, y) use y as the outer index and are truncated by
total degree, so their diagonals Y = y are known to a fixed order.
"""

import logging
from dataclasses import dataclass, field

from ..errors import InconsistencyError
from ..series import (
    Backend,
    BivariateSeries,
    UnivariateSeries,
    compose,
    divide_out_square,
    format_scalar,
    multiply_square,
)
from ..weights import WeightSequence
from .genfun import (
    build_parametrization,
    fhat_series,
    lagrange_coefficients,
    solve_functional_equation,
)

logger = logging.getLogger(__name__)


@dataclass
class IdentityCheck:
    """
    Result of one series identity.

    Attributes:
        name: Identity name.
        passed: Whether the residual vanished.
        order: Order to which the residual was checked.
        residual: Largest absolute residual coefficient (as a string).
    """

    name: str
    passed: bool
    order: int
    residual: str = "0"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "order": self.order,
            "residual": self.residual,
        }


@dataclass
class IdentityReport:
    """Collection of identity checks for one weight sequence."""

    family: str
    order: int
    checks: list[IdentityCheck] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "order": self.order,
            "all_passed": self.all_passed,
            "checks": [c.to_dict() for c in self.checks],
        }


def _residual(value) -> str:
    """Residual as a string; exact and float zeros both read "0"."""
    return format_scalar(value) if value else "0"


def _univariate_check(name: str, residual: UnivariateSeries, order: int) -> IdentityCheck:
    order = min(order, residual.trunc_order)
    coeffs = residual.coeffs[: order + 1]
    worst = max((abs(c) for c in coeffs), default=0)
    return IdentityCheck(name, not any(coeffs), order, _residual(worst))


def _bivariate_check(name: str, residual: BivariateSeries, order: int) -> IdentityCheck:
    """Vanishing of every coefficient of total degree <= order."""
    worst = 0
    checked = 0
    for k, s in enumerate(residual.slices):
        for j, c in enumerate(s.coeffs):
            if k + j > order:
                break
            checked = max(checked, k + j)
            if c and abs(c) > worst:
                worst = abs(c)
    return IdentityCheck(name, worst == 0, checked, _residual(worst))


def identity_suite(ws: WeightSequence, order: int = 40) -> IdentityReport:
    """
    Check the diagonal identities of x̂, φ, Q and q as exact series.

    Args:
        ws: Weight sequence with rational weights.
        order: Order to which each identity is checked.

    Returns:
        IdentityReport with one entry per identity.
    """
    if not ws.is_exact:
        raise ValueError("The identity suite needs rational weights (exact backend)")
    backend = Backend.exact()
    E = order + 4
    bundle = build_parametrization(ws, E, backend, invert=False)
    orders = [E - k for k in range(E + 1)]

    def Yfun(s: UnivariateSeries) -> BivariateSeries:
        # derivatives lose one order; clip the slices to what s determines
        top = min(E, s.trunc_order)
        return BivariateSeries.inner_only(s.truncate(top), [min(o, top) for o in orders])

    def yfun(s: UnivariateSeries) -> BivariateSeries:
        return BivariateSeries.outer_only(s.truncate(E), orders)

    Yvar = UnivariateSeries.variable(E, backend)
    phi, D, xhat = bundle.phi, bundle.D, bundle.xhat
    phi_prime = phi.derivative()
    xhat_prime = xhat.derivative()

    report = IdentityReport(family=ws.family, order=order)
    checks = report.checks

    checks.append(
        _univariate_check("phi' = (B + Y B') xhat'", phi_prime - D * xhat_prime, order)
    )

    Q = bundle.Q_series(orders)
    y_var = yfun(Yvar)
    B_y = yfun(ws.b_series(E, backend))
    Phi = Yfun(phi)
    Dv = Yfun(D)

    # x-derivative at fixed y through the parametrization: ∂̸_x = ∂_Y / x̂'
    dxQ = (Phi + y_var) * Dv * 2 - y_var * B_y * 4
    inv_D = D.reciprocal()
    dU1_prefactor = Yfun((Yvar * Yvar * bundle.B * inv_D * inv_D).scale(-2))
    dU1Q = dU1_prefactor * ((Phi + y_var) * 2 - y_var * B_y * Yfun(inv_D) * 4)

    checks.append(_univariate_check("Q(Y,Y) = 0", Q.diagonal(), order))
    checks.append(_univariate_check("dU1 Q(Y,Y) = 0", dU1Q.diagonal(), order))
    checks.append(_univariate_check("dx Q(Y,Y) = 0", dxQ.diagonal(), order))
    checks.append(_univariate_check("dY Q(Y,Y) = 0", Q.derivative_inner().diagonal(), order))
    checks.append(_univariate_check("dy Q(Y,Y) = 0", Q.derivative_outer().diagonal(), order))
    checks.append(
        _univariate_check(
            "dY dx Q(Y,Y) = 2D", dxQ.derivative_inner().diagonal() - D.scale(2), order
        )
    )
    checks.append(
        _univariate_check(
            "dy dx Q(Y,Y) = -2D", dxQ.derivative_outer().diagonal() + D.scale(2), order
        )
    )
    checks.append(
        _univariate_check(
            "dY^2 Q(Y,Y) = 2 phi'",
            Q.derivative_inner().derivative_inner().diagonal() - phi_prime.scale(2),
            order,
        )
    )
    checks.append(
        _univariate_check(
            "dy dY Q(Y,Y) = -2 phi'",
            Q.derivative_inner().derivative_outer().diagonal() + phi_prime.scale(2),
            order,
        )
    )

    q, q_diag = divide_out_square(Q, diagonal=True)
    checks.append(_univariate_check("q(Y,Y) = phi'", q_diag - phi_prime, order))
    checks.append(_bivariate_check("(Y-y)^2 q = Q", multiply_square(q) - Q, order))

    dYQ = Q.derivative_inner()
    dyQ = Q.derivative_outer()
    gap = Yfun(Yvar) - y_var
    tY = q * 2 + gap * q.derivative_inner()
    ty = q * 2 - gap * q.derivative_outer()
    checks.append(
        _bivariate_check("(dY Q)^2 = (Y-y)^2 (2q + (Y-y) dY q)^2", dYQ * dYQ - gap * gap * tY * tY, order)
    )
    checks.append(
        _bivariate_check("(dy Q)^2 = (Y-y)^2 (2q - (Y-y) dy q)^2", dyQ * dyQ - gap * gap * ty * ty, order)
    )
    checks.append(_bivariate_check("dx Q * xhat' = dY Q", dxQ * Yfun(xhat_prime) - dYQ, order))

    for check in checks:
        level = logging.DEBUG if check.passed else logging.ERROR
        logger.log(level, f"identity {check.name}: {'ok' if check.passed else 'FAILED'}")
    logger.info(
        f"Identity suite ({ws.family}, order {order}): "
        f"{sum(c.passed for c in checks)}/{len(checks)} passed"
    )
    return report


def require_identities(report: IdentityReport) -> None:
    """Abort downstream work when any identity failed."""
    if not report.all_passed:
        raise InconsistencyError(f"Identity suite failed: {', '.join(report.failures)}")


@dataclass
class ConsistencyReport:
    """
    Agreement between the functional equation and the parametrization.

    Attributes:
        N: x-order compared.
        P: y-order compared.
        discrepancy: Largest |F̂(Ŷ(x), y) - F| coefficient.
        F0_discrepancy: Largest disagreement among the three forms of F̂(Y, 0).
        inverse_discrepancy: Largest coefficient of x̂(Ŷ(x)) - x.
    """

    N: int
    P: int
    discrepancy: object
    F0_discrepancy: object
    inverse_discrepancy: object

    @property
    def exact_match(self) -> bool:
        return not self.discrepancy and not self.F0_discrepancy and not self.inverse_discrepancy

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "P": self.P,
            "discrepancy": _residual(self.discrepancy),
            "F0_discrepancy": _residual(self.F0_discrepancy),
            "inverse_discrepancy": _residual(self.inverse_discrepancy),
        }


def _max_abs(values, zero):
    worst = zero
    for v in values:
        if abs(v) > worst:
            worst = abs(v)
    return worst


def consistency_compose(
    ws: WeightSequence, N: int, P: int, backend: Backend | None = None
) -> ConsistencyReport:
    """
    Compare F̂(Ŷ(x), y) with F from the functional equation.

    Args:
        ws: Weight sequence.
        N: x-order.
        P: y-order.
        backend: Coefficient backend (exact for rational weights by default).
    """
    F, _ = solve_functional_equation(ws, N, P, backend)
    backend = F.backend
    Fhat = fhat_series(ws, N, P, backend)
    bundle = build_parametrization(ws, N, backend)
    composed = Fhat.compose_inner(bundle.Yhat)
    expected = F.transpose()

    zero = backend.zero()
    diffs = []
    for p in range(P + 1):
        diff = composed.slices[p] - expected.slices[p]
        diffs.extend(diff.coeffs)
    discrepancy = _max_abs(diffs, zero)

    x_over_phi = bundle.xhat.shift_down(1) / bundle.phi.shift_down(1)
    with backend.context():
        via_phi = 1 - x_over_phi.scale(bundle.b0)
    f0_diffs = list((Fhat.slices[0] - bundle.F0hat).coeffs) + list(
        (via_phi.truncate(N - 1) - bundle.F0hat.truncate(N - 1)).coeffs
    )
    F0_discrepancy = _max_abs(f0_diffs, zero)

    identity = compose(bundle.xhat, bundle.Yhat) - UnivariateSeries.variable(N, backend)
    inverse_discrepancy = _max_abs(identity.coeffs, zero)

    report = ConsistencyReport(N, P, discrepancy, F0_discrepancy, inverse_discrepancy)
    logger.info(
        f"Parametrization round trip ({ws.family}, N={N}, P={P}): "
        f"discrepancy {format_scalar(discrepancy)}"
    )
    return report


def lagrange_check(ws: WeightSequence, n_max: int = 20, backend: Backend | None = None) -> IdentityCheck:
    """[x^n]Ŷ from reversion against (1/n)[Y^{n-1}]W^n for n <= n_max."""
    bundle = build_parametrization(ws, n_max, backend)
    lagrange = lagrange_coefficients(bundle, n_max)
    diffs = [bundle.Yhat[n] - lagrange[n] for n in range(1, n_max + 1)]
    worst = _max_abs(diffs, bundle.backend.zero())
    return IdentityCheck("Lagrange inversion", not worst, n_max, _residual(worst))
