"""
Base classes for car-arrival weight sequences.

A weight sequence b = (b_l) has generating function B(y) = Σ b_l y^l with
radius of convergence rho. Families implement coefficient access, evaluation
of B and its first derivatives on [0, rho] (left limits at rho), and the
rescaling b_l -> lambda * r^l * b_l.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp

from ..errors import AssumptionError, DomainError
from ..series import Backend, Scalar, UnivariateSeries, format_scalar, to_mpf

logger = logging.getLogger(__name__)

FINITE = "finite"
INFINITE = "infinite"
UNKNOWN = "unknown"

# Coefficients scanned when looking for some b_l > 0 with l >= 2.
SUPPORT_SCAN = 64


@dataclass(frozen=True)
class Extended:
    """
    A value that may be finite, +infinity, or not computed.

    Attributes:
        state: One of "finite", "infinite", "unknown".
        value: The number when state is "finite".
    """

    state: str
    value: Scalar | None = None

    @classmethod
    def finite(cls, value: Scalar) -> "Extended":
        return cls(FINITE, value)

    @classmethod
    def infinite(cls) -> "Extended":
        return cls(INFINITE, None)

    @classmethod
    def unknown(cls) -> "Extended":
        return cls(UNKNOWN, None)

    @property
    def is_finite(self) -> bool:
        return self.state == FINITE

    @property
    def is_infinite(self) -> bool:
        return self.state == INFINITE

    def require(self, what: str = "value") -> Scalar:
        """The finite value, or DomainError."""
        if not self.is_finite:
            raise DomainError(f"{what} is {self.state}")
        return self.value

    def to_json(self) -> str | None:
        if self.is_finite:
            return format_scalar(self.value)
        if self.is_infinite:
            return "inf"
        return None

    def __str__(self) -> str:
        return self.to_json() or "unknown"


@dataclass(frozen=True)
class SingularData:
    """
    Behaviour of B at its radius of convergence.

    Attributes:
        rho: Radius of convergence.
        alpha_tilde: Exponent of the singular part (1-y/rho)^alpha_tilde,
            None when B has no singular expansion of that form.
        C_B: Constant of the singular part.
        B_at_rho: B(rho).
        Bp_at_rho: B'(rho).
        Bpp_at_rho: B''(rho).
        Bppp_at_rho: B'''(rho).
    """

    rho: Scalar
    alpha_tilde: Scalar | None
    C_B: Scalar | None
    B_at_rho: Extended
    Bp_at_rho: Extended
    Bpp_at_rho: Extended
    Bppp_at_rho: Extended

    def to_dict(self) -> dict:
        return {
            "rho": format_scalar(self.rho),
            "alpha_tilde": None if self.alpha_tilde is None else format_scalar(self.alpha_tilde),
            "C_B": None if self.C_B is None else format_scalar(self.C_B),
            "B_at_rho": self.B_at_rho.to_json(),
            "Bp_at_rho": self.Bp_at_rho.to_json(),
            "Bpp_at_rho": self.Bpp_at_rho.to_json(),
            "Bppp_at_rho": self.Bppp_at_rho.to_json(),
        }


def is_exact_number(value) -> bool:
    return isinstance(value, (int, Fraction))


def less_equal(a, b) -> bool:
    """a <= b across Fraction and mpf."""
    if is_exact_number(a) and is_exact_number(b):
        return a <= b
    return to_mpf(a) <= to_mpf(b)


class WeightSequence(ABC):
    """
    Abstract car-arrival weight sequence.

    Subclasses are immutable dataclasses.
    """

    family: str = "abstract"

    @abstractmethod
    def coefficient(self, l: int) -> Scalar:
        """b_l."""

    @property
    @abstractmethod
    def rho(self) -> Extended:
        """Radius of convergence of B (finite or infinite)."""

    @abstractmethod
    def derivative_at(self, y, k: int) -> Extended:
        """B^{(k)}(y) for 0 <= y <= rho; the left limit at y = rho."""

    @abstractmethod
    def equivalent(self, lam, r) -> "WeightSequence":
        """The sequence lambda * r^l * b_l."""

    @abstractmethod
    def to_dict(self) -> dict:
        """Config-file form."""

    @property
    def is_exact(self) -> bool:
        """True when every coefficient is rational."""
        return True

    @property
    def degree(self) -> int | None:
        """Degree of B for finite support, else None."""
        return None

    def singular_data(self) -> SingularData | None:
        """Singular expansion data at rho, None when rho is infinite."""
        return None

    def b_series(self, N: int, backend: Backend) -> UnivariateSeries:
        """The series B(Y) to order N."""
        with backend.context():
            values = [backend.coerce(self.coefficient(l)) for l in range(N + 1)]
        return UnivariateSeries(tuple(values), backend)

    def values_at(self, y, upto: int = 2) -> list[Scalar]:
        """[B(y), B'(y), ...] up to the given derivative; all must be finite."""
        out = []
        for k in range(upto + 1):
            out.append(eval_B(self, y, k).require(f"B^({k})({y})"))
        return out


# -------------------------------------------------------------------
# Module-level operations
# -------------------------------------------------------------------


def b_series(ws: WeightSequence, N: int, backend: Backend) -> UnivariateSeries:
    """Coefficients b_0..b_N as a series."""
    if N < 0:
        raise ValueError("Series order must be nonnegative")
    return ws.b_series(N, backend)


def eval_B(ws: WeightSequence, y, deriv_order: int = 0) -> Extended:
    """
    B^{(k)}(y) for y in [0, rho].

    Args:
        ws: Weight sequence.
        y: Evaluation point; rationals give exact results where possible.
        deriv_order: Derivative order 0..3.

    Returns:
        Extended value; at y = rho this is the left limit, possibly infinite.
    """
    if not 0 <= deriv_order <= 3:
        raise ValueError(f"Derivative order must be in 0..3, got {deriv_order}")
    if not less_equal(0, y):
        raise DomainError(f"B evaluated at negative point {y}")
    rho = ws.rho
    if rho.is_finite and not less_equal(y, rho.value):
        raise DomainError(f"B evaluated at {y} beyond its radius {rho.value}")
    return ws.derivative_at(y, deriv_order)


def moments(ws: WeightSequence) -> tuple[Extended, Extended, bool]:
    """
    Mean and variance of b read off B at 1.

    Returns:
        (m, sigma2, is_probability) with m = B'(1) and
        sigma2 = B''(1) + B'(1) - B'(1)^2.
    """
    B1 = eval_B(ws, 1, 0)
    if not B1.is_finite:
        raise DomainError("B(1) is infinite; moments are undefined")
    m = eval_B(ws, 1, 1)
    B2 = eval_B(ws, 1, 2)
    is_probability = _equals_one(B1.value)
    if not m.is_finite:
        return m, Extended.infinite(), is_probability
    if not B2.is_finite:
        return m, Extended.infinite(), is_probability
    sigma2 = B2.value + m.value - m.value * m.value
    return m, Extended.finite(sigma2), is_probability


def _equals_one(value: Scalar) -> bool:
    if is_exact_number(value):
        return value == 1
    return abs(to_mpf(value) - 1) <= mp.mpf(2) ** (-(mp.prec - 16))


def equivalent(ws: WeightSequence, lam, r) -> WeightSequence:
    """The equivalent sequence b~_l = lambda * r^l * b_l."""
    if not (less_equal(0, lam) and lam != 0 and less_equal(0, r) and r != 0):
        raise ValueError("Equivalence needs lambda > 0 and r > 0")
    return ws.equivalent(lam, r)


def violated_assumptions(ws: WeightSequence) -> list[str]:
    """Names of the standing assumptions ws violates."""
    violated = []
    scan = ws.degree if ws.degree is not None else SUPPORT_SCAN
    coeffs = [ws.coefficient(l) for l in range(scan + 1)]
    if any(not less_equal(0, c) for c in coeffs):
        violated.append("b_l>=0")
    if not (coeffs and coeffs[0] and less_equal(0, coeffs[0])):
        violated.append("b_0>0")
    if not any(c and less_equal(0, c) for c in coeffs[2:]):
        violated.append("b_l>0 for some l>=2")
    rho = ws.rho
    if rho.is_finite and not (rho.value and less_equal(0, rho.value)):
        violated.append("rho>0")
    return violated


def check_assumptions(ws: WeightSequence) -> None:
    """Raise AssumptionError naming the first violated standing assumption."""
    violated = violated_assumptions(ws)
    if violated:
        for name in violated:
            logger.error(f"Standing assumption violated: {name}")
        raise AssumptionError(violated[0], f"standing assumptions violated: {', '.join(violated)}")
