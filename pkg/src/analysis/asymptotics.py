"""
Coefficient asymptotics in the generic+ and dilute- phases.

Non-universal constants mu, C_q, C_F come from the behaviour of x̂ at Y_c;
the universal exponents depend on alpha only. Along the critical line
Y = Y_c every quantity needed at x = x_c is a power series in y:

    R(y) = (Y_c - y) sqrt(q(Y_c, y)) = sqrt(Q(Y_c, y)),   R(0) = φ(Y_c) > 0,
    F(x_c, y)            = 1/2 + (R(y) - φ_c) / (2y),
    ∂_x F(x_c, y)        = (((φ_c + y) D_c - 2y B(y)) / R(y) - D_c) / (2y),
    ∂_Y ∂̸_x F̂(Y_c, y)  = D'_c ((φ_c + y) / R(y) - 1) / (2y),

with D = B + YB', D' = 2B' + YB'' at Y_c.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import pandas as pd
from mpmath import mp

from ..errors import InconsistencyError, OutOfScopeError
from ..series import Backend, Scalar, UnivariateSeries, format_scalar, to_mpf
from ..weights import WeightSequence
from .genfun import ParametrizationEvaluator, f0_series, slice_series
from .phase import DILUTE_MINUS, GENERIC_PLUS, PhaseReport
from .scaling import ScalingFunctionEvaluator

logger = logging.getLogger(__name__)

REGIMES = ("yfixed", "xderiv", "gseries", "x", "bivariate")

# Extra bits used to estimate the rounding error of y-series coefficients.
GUARD_BITS = 64

# Relative agreement required between closed-form and numeric x̂''(Y_c).
NUMERIC_CHECK_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Exponents:
    """
    Universal exponents of the coefficient asymptotics.

    Attributes:
        alpha: Singular exponent.
        gamma0: alpha/2.
        gamma1: 1 - alpha/2.
        beta0: alpha/(alpha-1).
        beta1: -alpha/2.
        theta: 1/(alpha-1).
    """

    alpha: Scalar
    gamma0: Scalar
    gamma1: Scalar
    beta0: Scalar
    beta1: Scalar
    theta: Scalar

    def as_tuple(self) -> tuple:
        return (self.gamma0, self.gamma1, self.beta0, self.beta1, self.theta)

    def to_dict(self) -> dict:
        return {
            "alpha": format_scalar(self.alpha),
            "gamma0": format_scalar(self.gamma0),
            "gamma1": format_scalar(self.gamma1),
            "beta0": format_scalar(self.beta0),
            "beta1": format_scalar(self.beta1),
            "theta": format_scalar(self.theta),
        }


def universal_exponents(alpha) -> Exponents:
    """Exponent tuple for alpha; exact when alpha is rational."""
    if isinstance(alpha, (int, str, float)):
        alpha = Fraction(str(alpha))
    half = Fraction(1, 2) if isinstance(alpha, Fraction) else mp.mpf(1) / 2
    return Exponents(
        alpha=alpha,
        gamma0=alpha * half,
        gamma1=1 - alpha * half,
        beta0=alpha / (alpha - 1),
        beta1=-alpha * half,
        theta=1 / (alpha - 1),
    )


@dataclass
class AsymptoticConstants:
    """
    Non-universal constants at the critical point.

    Attributes:
        refinement: GenericPlus or DiluteMinus.
        alpha: Singular exponent.
        exponents: Universal exponents for alpha.
        Y_c: Critical point of x̂.
        x_c: x̂(Y_c).
        mu: 1 - x̂(Y)/x_c ~ mu S^(alpha-1), S = 1 - Y/Y_c.
        C_q: q(Y, y) ~ C_q H_alpha(S, t).
        C_F: sqrt(C_q)/2.
        phi_c: φ(Y_c).
        D_c: B + Y B' at Y_c.
        D_prime_c: 2B' + Y B'' at Y_c.
        psi_c: Y B'/B at Y_c.
        diagnostics: Cross-check values.
    """

    refinement: str
    alpha: Scalar
    exponents: Exponents
    Y_c: Scalar
    x_c: Scalar
    mu: Scalar
    C_q: Scalar
    C_F: Scalar
    phi_c: Scalar
    D_c: Scalar
    D_prime_c: Scalar
    psi_c: Scalar
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "refinement": self.refinement,
            "alpha": format_scalar(self.alpha),
            "exponents": self.exponents.to_dict(),
            "Y_c": format_scalar(self.Y_c),
            "x_c": format_scalar(self.x_c),
            "mu": format_scalar(self.mu),
            "C_q": format_scalar(self.C_q),
            "C_F": format_scalar(self.C_F),
            "diagnostics": self.diagnostics,
        }


def _relative_gap(a, b) -> Scalar:
    a, b = to_mpf(a), to_mpf(b)
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale else mp.mpf(0)


def constants(
    ws: WeightSequence, report: PhaseReport, precision_bits: int = 256
) -> AsymptoticConstants:
    """
    Compute mu, C_q and C_F.

    Args:
        ws: Weight sequence.
        report: Its phase report.
        precision_bits: Working precision.

    Returns:
        AsymptoticConstants.
    """
    if report.refinement not in (GENERIC_PLUS, DILUTE_MINUS):
        raise OutOfScopeError("out of scope: dense phase")
    if report.alpha is None:
        raise OutOfScopeError("No singular exponent available for this dilute sequence")

    ev = ParametrizationEvaluator(ws)
    diagnostics: dict = {}
    with mp.workprec(precision_bits):
        Y = to_mpf(report.Y_c)
        x_c = to_mpf(report.x_c)
        alpha = report.alpha
        a = to_mpf(alpha)
        B, Bp, Bpp = (to_mpf(v) for v in ev.B_values(Y, 2))
        D = B + Y * Bp
        D_prime = 2 * Bp + Y * Bpp
        phi = Y * (B - Y * Bp) / D
        psi = Y * Bp / B
        check_tol = mp.mpf(2) ** (-(precision_bits // 2))

        if report.refinement == GENERIC_PLUS:
            x2 = to_mpf(ev.xhat_second_at_critical(Y))
            mu = -(Y * Y / 2) * x2 / x_c
            diagnostics["xhat_second"] = mp.nstr(x2, 30)
            if report.rho is None or Y < to_mpf(report.rho):
                numeric = ev.xhat_second(Y)
                diagnostics["xhat_second_numeric"] = mp.nstr(numeric, 30)
                if _relative_gap(numeric, x2) > NUMERIC_CHECK_TOLERANCE:
                    raise InconsistencyError(
                        f"x̂''(Y_c) closed form {mp.nstr(x2, 15)} disagrees with "
                        f"numeric differentiation {mp.nstr(numeric, 15)}"
                    )
        else:
            data = ws.singular_data()
            alpha_tilde, C_B = to_mpf(data.alpha_tilde), to_mpf(data.C_B)
            # ∂̸_{U1} x̂(Y_c) = -2 Y_c x̂(Y_c) / D_c
            d_U1_xhat = -2 * Y * x_c / D
            mu = (alpha_tilde * C_B / Y) * d_U1_xhat / x_c
            diagnostics["C_B"] = mp.nstr(C_B, 30)
            diagnostics["mu_opposite_sign_form"] = mp.nstr(2 * alpha_tilde * C_B / D, 30)
            logger.info("dilute- mu taken with the sign that makes it positive")

        if not mu > 0:
            raise InconsistencyError(f"sign convention violated: mu = {mp.nstr(mu, 15)} <= 0")

        C_q = 2 * D * mu * x_c / (a * Y)
        C_F = mp.sqrt(C_q) / 2
        C_F_direct = mp.sqrt(2 * mu / (a * (1 + psi))) / 2
        diagnostics["C_F_direct"] = mp.nstr(C_F_direct, 30)
        if _relative_gap(C_F, C_F_direct) > check_tol:
            raise InconsistencyError(
                f"C_F forms disagree: {mp.nstr(C_F, 15)} vs {mp.nstr(C_F_direct, 15)}"
            )

    result = AsymptoticConstants(
        refinement=report.refinement,
        alpha=alpha,
        exponents=universal_exponents(alpha),
        Y_c=Y,
        x_c=x_c,
        mu=mu,
        C_q=C_q,
        C_F=C_F,
        phi_c=phi,
        D_c=D,
        D_prime_c=D_prime,
        psi_c=psi,
        diagnostics=diagnostics,
    )
    logger.info(
        f"Constants ({report.refinement}): mu = {mp.nstr(mu, 15)}, C_F = {mp.nstr(C_F, 15)}"
    )
    return result


# -------------------------------------------------------------------
# Series along the critical line Y = Y_c
# -------------------------------------------------------------------


@dataclass
class YSeriesResult:
    """
    Coefficients of a y-series at Y = Y_c.

    Attributes:
        name: What the series represents.
        coefficients: Coefficients 0..P.
        error: Largest relative change of a coefficient when the working
            precision is raised by GUARD_BITS.
    """

    name: str
    coefficients: list
    error: Scalar

    def __getitem__(self, p: int) -> Scalar:
        return self.coefficients[p]

    def __len__(self) -> int:
        return len(self.coefficients)


def _critical_line(ws: WeightSequence, consts: AsymptoticConstants, order: int, bits: int):
    """(R, B, y, backend) as series in y to the given order."""
    backend = Backend.big_float(bits)
    with backend.context():
        Y, x_c, phi = to_mpf(consts.Y_c), to_mpf(consts.x_c), to_mpf(consts.phi_c)
        B_y = ws.b_series(order + 1, backend)
        coeffs = []
        for k in range(order + 1):
            b_prev = to_mpf(B_y[k - 1]) if k >= 1 else mp.mpf(0)
            value = -4 * b_prev * x_c
            if k == 0:
                value = phi * phi
            elif k == 1:
                value += 2 * phi
            elif k == 2:
                value += 1
            coeffs.append(value)
        Q = UnivariateSeries(tuple(coeffs), backend)
        # q(Y_c, 0) = φ_c^2 / Y_c^2
        if not Q[0] > 0:
            raise InconsistencyError("q(Y_c, y) has a vanishing constant term")
        R = Q.sqrt()
        y = UnivariateSeries.variable(order, backend)
    return R, B_y.truncate(order), y, backend


def _check_removable(series: UnivariateSeries, what: str) -> None:
    head = abs(to_mpf(series[0]))
    if head > mp.mpf(2) ** (-(mp.prec // 2)):
        raise InconsistencyError(f"{what}: constant term {mp.nstr(head, 5)} does not cancel")


def _Fp_coefficients(ws, consts, P, bits) -> list:
    R, _, _, backend = _critical_line(ws, consts, P + 1, bits)
    with backend.context():
        out = [to_mpf(R[p + 1]) / 2 for p in range(P + 1)]
        out[0] += mp.mpf(1) / 2
    return out


def _xderiv_coefficients(ws, consts, P, bits) -> list:
    R, B_y, y, backend = _critical_line(ws, consts, P + 1, bits)
    with backend.context():
        D, phi = to_mpf(consts.D_c), to_mpf(consts.phi_c)
        numerator = (y + phi).scale(D) - (y * B_y).scale(2)
        K = numerator / R - D
        _check_removable(K, "∂_x F(x_c, y)")
        series = K.shift_down(1).scale(mp.mpf(1) / 2)
        return [to_mpf(c) for c in series.coeffs[: P + 1]]


def _G_coefficients(ws, consts, P, bits) -> list:
    R, _, y, backend = _critical_line(ws, consts, P + 1, bits)
    with backend.context():
        phi = to_mpf(consts.phi_c)
        mu, x_c, Y = to_mpf(consts.mu), to_mpf(consts.x_c), to_mpf(consts.Y_c)
        beta0 = to_mpf(consts.exponents.beta0)
        T = (y + phi) / R - 1
        _check_removable(T, "∂_Y ∂̸_x F̂(Y_c, y)")
        inner = T.shift_down(1).scale(to_mpf(consts.D_prime_c) / 2)
        prefactor = Y * mu * x_c / (beta0 * mp.power(mu, beta0))
        return [prefactor * to_mpf(c) for c in inner.coeffs[: P + 1]]


def _with_error_estimate(name, fn, ws, consts, P, bits) -> YSeriesResult:
    with mp.workprec(bits):
        values = fn(ws, consts, P, bits)
    with mp.workprec(bits + GUARD_BITS):
        reference = fn(ws, consts, P, bits + GUARD_BITS)
        error = max((_relative_gap(a, b) for a, b in zip(values, reference)), default=mp.mpf(0))
    logger.debug(f"{name}: {P + 1} coefficients, relative error estimate {mp.nstr(error, 3)}")
    return YSeriesResult(name, values, error)


def Fp_at_xc(
    ws: WeightSequence, consts: AsymptoticConstants, P: int, precision_bits: int = 256
) -> YSeriesResult:
    """F_p(x_c) = [y^p] F̂(Y_c, y) for p = 0..P."""
    return _with_error_estimate("F_p(x_c)", _Fp_coefficients, ws, consts, P, precision_bits)


def xderiv_series(
    ws: WeightSequence, consts: AsymptoticConstants, P: int, precision_bits: int = 256
) -> YSeriesResult:
    """∂_x F_p(x_c) for p = 0..P."""
    return _with_error_estimate("∂_x F_p(x_c)", _xderiv_coefficients, ws, consts, P, precision_bits)


def G_series(
    ws: WeightSequence, consts: AsymptoticConstants, P: int, precision_bits: int = 256
) -> YSeriesResult:
    """
    G_p = [y^p] G(y), G(y) = Y_c mu x_c / (beta0 mu^beta0) * ∂_Y ∂̸_x F̂(Y_c, y).

    The factor Y_c turns ∂_Y into the derivative in S = 1 - Y/Y_c up to sign,
    matching the normalisation of G_p ~ (alpha-1)/(2 mu^beta0) C_F / Γ(-beta1) Y_c^-p p^(-beta1-1).
    """
    return _with_error_estimate("G_p", _G_coefficients, ws, consts, P, precision_bits)


# -------------------------------------------------------------------
# Predictions
# -------------------------------------------------------------------


def predict_yfixed(consts: AsymptoticConstants, p: int) -> Scalar:
    e = consts.exponents
    g0 = to_mpf(e.gamma0)
    return consts.C_F * mp.rgamma(-g0) * mp.power(consts.Y_c, -p) * mp.power(p, -g0 - 1)


def predict_xderiv(consts: AsymptoticConstants, p: int) -> Scalar:
    e = consts.exponents
    a, g1 = to_mpf(consts.alpha), to_mpf(e.gamma1)
    amplitude = a / (2 * consts.mu * consts.x_c) * consts.C_F * mp.rgamma(-g1)
    return amplitude * mp.power(consts.Y_c, -p) * mp.power(p, -g1 - 1)


def predict_gseries(consts: AsymptoticConstants, p: int) -> Scalar:
    e = consts.exponents
    a, b0, b1 = to_mpf(consts.alpha), to_mpf(e.beta0), to_mpf(e.beta1)
    amplitude = (a - 1) / (2 * mp.power(consts.mu, b0)) * consts.C_F * mp.rgamma(-b1)
    return amplitude * mp.power(consts.Y_c, -p) * mp.power(p, -b1 - 1)


def predict_x(consts: AsymptoticConstants, G_p, n: int) -> Scalar:
    b0 = to_mpf(consts.exponents.beta0)
    return G_p * mp.rgamma(-b0) * mp.power(consts.x_c, -n) * mp.power(n, -b0 - 1)


def predict_bivariate(consts: AsymptoticConstants, I_value, n: int, p: int) -> Scalar:
    e = consts.exponents
    g0, theta = to_mpf(e.gamma0), to_mpf(e.theta)
    return (
        consts.mu
        * consts.C_F
        * I_value
        * mp.power(consts.x_c, -n)
        * mp.power(consts.Y_c, -p)
        * mp.power(p, -(g0 + 1 + 1 / theta))
    )


@dataclass
class ComparisonResult:
    """
    Exact coefficients against their asymptotic predictions.

    Attributes:
        regime: One of REGIMES.
        table: One row per (n, p) with exact, predicted, ratio, scaled.
        slopes: Fitted log-log slopes of the scaled values (keyed by p for
            the x regime, "p" otherwise).
        expected_slope: Slope predicted by the exponents (None for bivariate).
    """

    regime: str
    table: pd.DataFrame
    slopes: dict = field(default_factory=dict)
    expected_slope: float | None = None

    @property
    def final_ratio(self) -> float:
        return float(self.table["ratio"].iloc[-1])

    def ratios_monotone_toward_one(self) -> bool:
        gaps = [abs(r - 1) for r in self.table["ratio"]]
        return all(b <= a for a, b in zip(gaps, gaps[1:]))

    def to_dict(self) -> dict:
        return {
            "regime": self.regime,
            "slopes": {str(k): v for k, v in self.slopes.items()},
            "expected_slope": self.expected_slope,
            "final_ratio": self.final_ratio,
            "rows": len(self.table),
        }


def _fit_slope(indices, logs) -> float:
    slope, _ = np.polyfit(np.log(np.asarray(indices, dtype=float)), np.asarray(logs, dtype=float), 1)
    return float(slope)


def _row(regime, n, p, exact, predicted, log_scaled, v=None) -> dict:
    exact, predicted = to_mpf(exact), to_mpf(predicted)
    return {
        "regime": regime,
        "n": n,
        "p": p,
        "v": v,
        "exact": mp.nstr(exact, 20),
        "predicted": mp.nstr(predicted, 20),
        "ratio": float(exact / predicted) if predicted else math.nan,
        "log_scaled": float(log_scaled),
    }


def predict_and_compare(
    ws: WeightSequence,
    regime: str,
    report: PhaseReport,
    consts: AsymptoticConstants | None = None,
    n_range: list[int] | None = None,
    p_range: list[int] | None = None,
    v: float | None = None,
    precision_bits: int = 256,
    ialpha: ScalingFunctionEvaluator | None = None,
) -> ComparisonResult:
    """
    Compare exact coefficients with the asymptotic formulas.

    Args:
        ws: Weight sequence.
        regime: "yfixed" (F_p(x_c)), "xderiv" (∂_x F_p(x_c)), "gseries" (G_p),
            "x" (F_{n,p}, n -> inf, p fixed) or "bivariate" (n ~ v p^(1/theta)).
        report: Phase report of ws.
        consts: Precomputed constants.
        n_range: Values of n (x regime).
        p_range: Values of p.
        v: Ratio n / p^(1/theta) (bivariate regime).
        precision_bits: Working precision.
        ialpha: Evaluator of the scaling function (bivariate regime).

    Returns:
        ComparisonResult.
    """
    if regime not in REGIMES:
        raise ValueError(f"Unknown regime {regime!r}; expected one of {REGIMES}")
    if regime == "bivariate" and v is None:
        raise ValueError("The bivariate regime needs v")
    consts = consts or constants(ws, report, precision_bits)
    e = consts.exponents
    p_range = list(p_range or [0])
    rows = []
    slopes: dict = {}

    with mp.workprec(precision_bits):
        Y_c, x_c = consts.Y_c, consts.x_c
        if regime in ("yfixed", "xderiv", "gseries"):
            P = max(p_range)
            if regime == "yfixed":
                series = Fp_at_xc(ws, consts, P, precision_bits)
                predict, expected = predict_yfixed, -(e.gamma0 + 1)
            elif regime == "xderiv":
                series = xderiv_series(ws, consts, P, precision_bits)
                predict, expected = predict_xderiv, -(e.gamma1 + 1)
            else:
                series = G_series(ws, consts, P, precision_bits)
                predict, expected = predict_gseries, -(e.beta1 + 1)
            for p in p_range:
                exact = series[p]
                log_scaled = mp.log(abs(exact) * mp.power(Y_c, p)) if exact else -mp.inf
                rows.append(_row(regime, None, p, exact, predict(consts, p), log_scaled))
            slopes["p"] = _fit_slope(p_range, [r["log_scaled"] for r in rows])

        elif regime == "x":
            n_range = list(n_range or [])
            if not n_range:
                raise ValueError("The x regime needs n_range")
            N = max(n_range)
            backend = Backend.big_float(precision_bits)
            if p_range == [0]:
                slices = {0: f0_series(ws, N, backend)}
            else:
                slices = slice_series(ws, N, p_range, backend)
            G = G_series(ws, consts, max(p_range), precision_bits)
            expected = -(e.beta0 + 1)
            for p in p_range:
                p_rows = []
                for n in n_range:
                    exact = to_mpf(slices[p][n])
                    log_scaled = mp.log(abs(exact) * mp.power(x_c, n)) if exact else -mp.inf
                    p_rows.append(_row(regime, n, p, exact, predict_x(consts, G[p], n), log_scaled))
                slopes[p] = _fit_slope(n_range, [r["log_scaled"] for r in p_rows])
                rows.extend(p_rows)

        else:
            theta = to_mpf(e.theta)
            pairs = [(int(mp.ceil(to_mpf(v) * mp.power(p, 1 / theta))), p) for p in p_range]
            N = max(n for n, _ in pairs)
            slices = slice_series(ws, N, p_range, Backend.big_float(precision_bits))
            ialpha = ialpha or ScalingFunctionEvaluator(consts.alpha, precision_bits=precision_bits)
            expected = None
            for n, p in pairs:
                v_eff = mp.mpf(n) / mp.power(p, 1 / theta)
                I_value = ialpha(consts.mu * v_eff)
                exact = to_mpf(slices[p][n])
                scaled = abs(exact) * mp.power(x_c, n) * mp.power(Y_c, p)
                log_scaled = mp.log(scaled) if exact else -mp.inf
                predicted = predict_bivariate(consts, I_value, n, p)
                rows.append(_row(regime, n, p, exact, predicted, log_scaled, float(v_eff)))

    table = pd.DataFrame(rows)
    result = ComparisonResult(
        regime=regime,
        table=table,
        slopes=slopes,
        expected_slope=None if expected is None else float(expected),
    )
    logger.info(
        f"Regime {regime}: {len(table)} rows, final ratio {result.final_ratio:.6f}, slopes {slopes}"
    )
    return result
