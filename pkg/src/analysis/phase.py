"""
Phase classification of weight sequences.

The phase is read off the sign of x̂'(rho):

- generic if rho is infinite, B''(rho) is infinite or x̂'(rho) < 0,
- non-generic dilute if x̂'(rho) = 0,
- non-generic dense if x̂'(rho) > 0.

x̂'(Y) has the sign of N(Y) = (B - YB')^2 - 2Y^2 B B'', which is evaluated
exactly whenever the weights and rho are rational.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from mpmath import mp

from ..errors import AssumptionError, InconsistencyError, ParkedTreesError
from ..series import Scalar, format_scalar, to_mpf
from ..weights import (
    Polylog,
    WeightSequence,
    check_assumptions,
    mixture_path,
    moments,
)
from ..weights.base import is_exact_number
from .genfun import ParametrizationEvaluator

logger = logging.getLogger(__name__)

GENERIC = "Generic"
DILUTE = "NonGenericDilute"
DENSE = "NonGenericDense"

GENERIC_PLUS = "GenericPlus"
DILUTE_MINUS = "DiluteMinus"
DENSE_OUT_OF_SCOPE = "DenseOutOfScope"

DEFAULT_PRECISION = 256
DEFAULT_ROOT_TOLERANCE = 1e-20
DEFAULT_MARGINAL_TOLERANCE = 1e-20

# Doublings tried when bracketing the critical point for entire B.
MAX_BRACKET_STEPS = 400


@dataclass
class PhaseReport:
    """
    Phase of a weight sequence and its critical point.

    Attributes:
        phase: Generic, NonGenericDilute or NonGenericDense.
        refinement: GenericPlus, DiluteMinus or DenseOutOfScope.
        Y_c: Critical point of x̂ (rho in the non-generic phases).
        x_c: x̂(Y_c), the radius of convergence of F in x.
        alpha: Singular exponent, 3 in the generic+ phase, alpha_tilde in
            the dilute- phase, None in the dense phase.
        rho: Radius of convergence of B (None when infinite).
        marginal: The dilute label was decided within the marginal
            tolerance rather than by an exact zero.
        diagnostics: x̂'(rho), B''(rho) and the moment criterion when known.
    """

    phase: str
    refinement: str
    Y_c: Scalar
    x_c: Scalar
    alpha: Scalar | None
    rho: Scalar | None = None
    marginal: bool = False
    diagnostics: dict = field(default_factory=dict)

    @property
    def in_scope(self) -> bool:
        return self.refinement in (GENERIC_PLUS, DILUTE_MINUS)

    def to_dict(self) -> dict:
        return {
            "phase": self.phase,
            "refinement": self.refinement,
            "Y_c": format_scalar(self.Y_c),
            "x_c": format_scalar(self.x_c),
            "alpha": None if self.alpha is None else format_scalar(self.alpha),
            "rho": None if self.rho is None else format_scalar(self.rho),
            "marginal": self.marginal,
            "diagnostics": self.diagnostics,
        }


def _sign(value, tolerance: float) -> tuple[int, bool]:
    """(sign, marginal) of value; inexact values inside the tolerance count as 0."""
    if is_exact_number(value):
        return (value > 0) - (value < 0), False
    value = to_mpf(value)
    if abs(value) < tolerance:
        return 0, True
    return (value > 0) - (value < 0), False


def _bisect(f, lo, hi, tolerance) -> Scalar:
    """Bisection for a sign change of f on [lo, hi] with f(lo) > 0 > f(hi)."""
    lo, hi = to_mpf(lo), to_mpf(hi)
    eps = mp.mpf(2) ** (-(mp.prec - 8))
    while hi - lo > eps * hi:
        mid = (lo + hi) / 2
        value = f(mid)
        if value > 0:
            lo = mid
        elif value < 0:
            hi = mid
        else:
            return mid
    return (lo + hi) / 2


def _critical_point(ws: WeightSequence, ev: ParametrizationEvaluator, tolerance: float) -> Scalar:
    """Smallest root of x̂' in (0, rho) for a generic sequence."""
    rho = ws.rho
    N = ev.xhat_numerator

    if rho.is_finite:
        rho_f = to_mpf(rho.value)
        hi = None
        for k in range(1, mp.prec):
            candidate = rho_f * (1 - mp.mpf(2) ** (-k))
            if N(candidate) < 0:
                hi = candidate
                break
        if hi is None:
            raise InconsistencyError("Generic phase but x̂' has no sign change below rho")
    else:
        hi = mp.mpf(1)
        for _ in range(MAX_BRACKET_STEPS):
            if N(hi) < 0:
                break
            hi *= 2
        else:
            raise InconsistencyError("Generic phase but x̂' stays positive on the search range")

    # x̂'(0) = 1/b_0 > 0, so [0, hi] brackets the first sign change only if N
    # has a single root; walk down to the first negative value on a coarse grid.
    grid = 64
    lo = mp.mpf(0)
    for i in range(1, grid + 1):
        point = hi * i / grid
        if N(point) < 0:
            lo, hi = hi * (i - 1) / grid, point
            break

    try:
        root = mp.findroot(N, (lo, hi), solver="anderson", verify=False)
        if not (lo <= root <= hi) or abs(ev.xhat_prime(root)) > tolerance:
            raise ValueError("root outside bracket")
    except (ValueError, ZeroDivisionError):
        logger.debug("findroot did not converge in the bracket; falling back to bisection")
        root = _bisect(N, lo, hi, tolerance)

    residual = abs(to_mpf(ev.xhat_prime(root)))
    if residual > tolerance:
        raise InconsistencyError(f"|x̂'(Y_c)| = {mp.nstr(residual, 5)} above tolerance {tolerance}")
    curvature = ev.xhat_second_at_critical(root)
    if not curvature < 0:
        raise InconsistencyError(f"x̂''(Y_c) = {mp.nstr(curvature, 5)} is not negative")
    return root


def classify(
    ws: WeightSequence,
    precision_bits: int = DEFAULT_PRECISION,
    root_tolerance: float = DEFAULT_ROOT_TOLERANCE,
    marginal_tolerance: float = DEFAULT_MARGINAL_TOLERANCE,
) -> PhaseReport:
    """
    Classify ws into generic / dilute / dense and locate (Y_c, x_c).

    Args:
        ws: Weight sequence satisfying the standing assumptions.
        precision_bits: Working precision of big-float steps.
        root_tolerance: Required |x̂'(Y_c)| in the generic phase.
        marginal_tolerance: |x̂'(rho)| below which an inexact value is
            treated as zero.

    Returns:
        PhaseReport.
    """
    check_assumptions(ws)
    ev = ParametrizationEvaluator(ws)
    with mp.workprec(precision_bits):
        rho = ws.rho
        diagnostics: dict = {}
        marginal = False
        if ws.degree is not None:
            diagnostics["finite_support"] = True
            logger.warning(
                f"B has finite support (degree {ws.degree}); asymptotic statements "
                "assume infinite support"
            )

        if rho.is_infinite:
            phase, reason = GENERIC, "rho=inf"
            rho_value = None
        else:
            rho_value = rho.value
            Bpp = ws.derivative_at(rho_value, 2)
            diagnostics["Bpp_at_rho"] = Bpp.to_json()
            if Bpp.is_infinite:
                phase, reason = GENERIC, "B''(rho)=inf"
            else:
                slope = ev.xhat_prime(rho_value)
                diagnostics["xhat_prime_at_rho"] = format_scalar(slope)
                sign, marginal = _sign(slope, marginal_tolerance)
                phase = {-1: GENERIC, 0: DILUTE, 1: DENSE}[sign]
                reason = "x̂'(rho) sign"
                if marginal:
                    logger.warning(
                        f"|x̂'(rho)| = {mp.nstr(to_mpf(slope), 5)} within the marginal "
                        f"tolerance; reporting {DILUTE}"
                    )

        if phase == GENERIC:
            Y_c = _critical_point(ws, ev, root_tolerance)
            x_c = ev.xhat(Y_c)
            refinement, alpha = GENERIC_PLUS, Fraction(3)
        else:
            Y_c = ev.point(rho_value)
            x_c = ev.xhat(Y_c)
            refinement, alpha = _refine(ws, phase, rho_value)

        try:
            criterion = probabilistic_criterion(ws)
            if criterion.value is not None:
                diagnostics["criterion_2s2m2"] = criterion.to_dict()["value"]
        except ParkedTreesError as e:
            logger.debug(f"Moment criterion unavailable: {e}")

    report = PhaseReport(
        phase=phase,
        refinement=refinement,
        Y_c=Y_c,
        x_c=x_c,
        alpha=alpha,
        rho=rho_value,
        marginal=marginal,
        diagnostics=diagnostics,
    )
    logger.info(
        f"Phase of {ws.family} weights: {phase} ({refinement}, {reason}), "
        f"Y_c = {format_scalar(Y_c, 20)}, x_c = {format_scalar(x_c, 20)}"
    )
    return report


def _refine(ws: WeightSequence, phase: str, rho_value) -> tuple[str, Scalar | None]:
    if phase == DENSE:
        return DENSE_OUT_OF_SCOPE, None
    if ws.derivative_at(rho_value, 3).is_finite:
        return GENERIC_PLUS, Fraction(3)
    data = ws.singular_data()
    if data is None or data.alpha_tilde is None:
        logger.warning("Dilute phase with infinite B'''(rho) but no singular expansion")
        return DILUTE_MINUS, None
    if not 2 < data.alpha_tilde < 3:
        raise AssumptionError(
            "beta>3", f"singular exponent {data.alpha_tilde} outside (2, 3) in the dilute phase"
        )
    return DILUTE_MINUS, data.alpha_tilde


def find_Yc_xc(ws: WeightSequence, precision_bits: int = DEFAULT_PRECISION) -> tuple[Scalar, Scalar]:
    """(Y_c, x_c): the critical point in the generic phase, (rho, x̂(rho)) otherwise."""
    report = classify(ws, precision_bits)
    return report.Y_c, report.x_c


def count_sign_changes(ws: WeightSequence, upper, points: int = 10_000) -> int:
    """Sign changes of x̂' on a uniform grid of (0, upper]."""
    ev = ParametrizationEvaluator(ws)
    upper = to_mpf(upper)
    changes = 0
    previous = 1
    for i in range(1, points + 1):
        value = ev.xhat_numerator(upper * i / points)
        sign = (value > 0) - (value < 0)
        if sign and sign != previous:
            changes += 1
            previous = sign
    return changes


# -------------------------------------------------------------------
# Moment criterion
# -------------------------------------------------------------------


@dataclass
class CriterionResult:
    """
    The moment criterion 2 sigma^2 + m^2 compared with 1.

    Attributes:
        value: 2 sigma^2 + m^2 (None when infinite or undefined).
        predicted_phase: Phase implied by the criterion, None if not decisive.
        decisive: Whether the criterion determines the phase for this ws.
        reason: Short explanation.
    """

    value: Scalar | None
    predicted_phase: str | None
    decisive: bool
    reason: str

    def to_dict(self) -> dict:
        return {
            "value": None if self.value is None else format_scalar(self.value),
            "predicted_phase": self.predicted_phase,
            "decisive": self.decisive,
            "reason": self.reason,
        }


def probabilistic_criterion(
    ws: WeightSequence, marginal_tolerance: float = DEFAULT_MARGINAL_TOLERANCE
) -> CriterionResult:
    """
    Predict the phase from the mean m and variance sigma^2 of b.

    For a probability distribution with B(1) = 1,
    2 sigma^2 + m^2 - 1 = -N(1), so the criterion decides the phase exactly
    when rho = 1; for rho > 1 a value above 1 still proves the generic phase.

    Args:
        ws: Weight sequence, normally a probability distribution.
        marginal_tolerance: Band around 1 reported as dilute for inexact values.
    """
    rho = ws.rho
    if rho.is_finite and not rho.value >= 1:
        return CriterionResult(None, None, False, "rho<1: B(1) diverges")

    m, sigma2, is_probability = moments(ws)
    if not is_probability:
        value = None
        if m.is_finite and sigma2.is_finite:
            value = 2 * sigma2.value + m.value * m.value
        return CriterionResult(value, None, False, "not a probability distribution")

    if not sigma2.is_finite:
        return CriterionResult(None, GENERIC, True, "infinite second moment")

    value = 2 * sigma2.value + m.value * m.value
    sign, _ = _sign(value - 1, marginal_tolerance)
    at_one = rho.is_finite and (rho.value == 1 if is_exact_number(rho.value) else to_mpf(rho.value) == 1)
    predicted = {1: GENERIC, 0: DILUTE, -1: DENSE}[sign]
    if at_one:
        result = CriterionResult(value, predicted, True, "rho=1")
    elif sign > 0:
        result = CriterionResult(value, GENERIC, True, "rho>1 and criterion above 1")
    else:
        result = CriterionResult(value, None, False, "rho>1: criterion not decisive")
    logger.debug(f"Moment criterion for {ws.family}: {format_scalar(value, 15)} ({result.reason})")
    return result


# -------------------------------------------------------------------
# Tuning to criticality
# -------------------------------------------------------------------


@dataclass
class TuningResult:
    """
    Outcome of tuning a one-parameter family to the dilute boundary.

    Attributes:
        p_c: Parameter value on the boundary.
        lower: Largest parameter known to be generic.
        upper: Smallest parameter known to be dense.
        criterion: -N(rho) at p_c (zero on the boundary).
        iterations: Bisection steps taken.
        weights: ws(p_c).
    """

    p_c: Scalar
    lower: Scalar
    upper: Scalar
    criterion: Scalar
    iterations: int
    weights: WeightSequence

    def to_dict(self) -> dict:
        return {
            "p_c": format_scalar(self.p_c),
            "lower": format_scalar(self.lower),
            "upper": format_scalar(self.upper),
            "criterion": format_scalar(self.criterion),
            "iterations": self.iterations,
        }


def tune_to_dilute(
    start: WeightSequence,
    end: WeightSequence,
    tolerance: float = 1e-12,
    precision_bits: int = DEFAULT_PRECISION,
) -> TuningResult:
    """
    Find p_c with (1 - p_c) start + p_c end on the dilute boundary.

    Args:
        start: Generic endpoint.
        end: Dense endpoint.
        tolerance: Width of the final bracket.
        precision_bits: Working precision.

    Returns:
        TuningResult.
    """
    start_phase = classify(start, precision_bits).phase
    end_phase = classify(end, precision_bits).phase
    if start_phase != GENERIC or end_phase != DENSE:
        raise AssumptionError(
            "endpoint phases",
            f"tuning needs a generic start and a dense end, got {start_phase} and {end_phase}",
        )

    def criterion(p) -> Scalar:
        ws = mixture_path(start, end, p)
        rho = ws.rho
        if rho.is_infinite:
            return Fraction(1)
        if ws.derivative_at(rho.value, 2).is_infinite:
            return Fraction(1)
        return -ParametrizationEvaluator(ws).xhat_numerator(rho.value)

    with mp.workprec(precision_bits):
        lo, hi = Fraction(0), Fraction(1)
        iterations = 0
        while hi - lo > tolerance:
            mid = (lo + hi) / 2
            value = criterion(mid)
            if value > 0:
                lo = mid
            elif value < 0:
                hi = mid
            else:
                lo = hi = mid
                break
            iterations += 1
        p_c = (lo + hi) / 2
        value = criterion(p_c)

    result = TuningResult(
        p_c=p_c,
        lower=lo,
        upper=hi,
        criterion=value,
        iterations=iterations,
        weights=mixture_path(start, end, p_c),
    )
    logger.info(f"Tuned mixture to the dilute boundary: p_c = {float(p_c):.15g} after {iterations} steps")
    return result


def tune_b0_to_dilute(ws: Polylog, precision_bits: int = DEFAULT_PRECISION) -> Polylog:
    """
    The b_0 that puts a polylog family exactly on the dilute boundary.

    With u = B(rho) and A_k the k-th derivative of B - b_0 at rho, x̂'(rho) = 0
    reads (u - rho A_1)^2 = 2 rho^2 u A_2, a quadratic in u; the larger root
    separates the generic range of b_0 from the dense one.
    """
    with mp.workprec(precision_bits):
        base = ws.with_b0(Fraction(0))
        rho = to_mpf(base.rho.value)
        A0 = base.derivative_at(base.rho.value, 0)
        A1 = base.derivative_at(base.rho.value, 1)
        A2 = base.derivative_at(base.rho.value, 2)
        if A2.is_infinite or A1.is_infinite:
            raise AssumptionError("beta>3", "B''(rho) must be finite to tune b_0 to the dilute boundary")
        A0, A1, A2 = to_mpf(A0.value), to_mpf(A1.value), to_mpf(A2.value)
        center = rho * A1 + rho * rho * A2
        u = center + mp.sqrt(center * center - rho * rho * A1 * A1)
        b0 = u - A0
        if b0 <= 0:
            raise AssumptionError("b_0>0", "no positive b_0 reaches the dilute boundary")
    tuned = ws.with_b0(b0)
    logger.info(f"Tuned {ws.family} b_0 = {mp.nstr(b0, 15)} for the dilute boundary")
    return tuned

