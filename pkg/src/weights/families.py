"""
Concrete weight-sequence families.

- Polynomial: finite support, exact.
- Geometric: b_l = c p^l, a simple pole at rho = 1/p.
- Polylog: b_0 given, b_l = c l^{-beta} r^l, B(y) = b_0 + c Li_beta(r y).
- Mixture: convex (or any nonnegative) combination of the above.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp

from ..errors import ConfigError
from ..series import Scalar, to_mpf
from .base import Extended, SingularData, WeightSequence, is_exact_number, less_equal

logger = logging.getLogger(__name__)


def _falling_factorial_coeffs(k: int) -> list[int]:
    """Coefficients s_j with l(l-1)...(l-k+1) = Σ_j s_j l^j."""
    poly = [1]
    for i in range(k):
        shifted = [0] + poly
        for j, c in enumerate(poly):
            shifted[j] -= i * c
        poly = shifted
    return poly


def _to_working(value, exact: bool):
    return value if exact else to_mpf(value)


def _product(a, b):
    """a * b, exact when both factors are rational."""
    if is_exact_number(a) and is_exact_number(b):
        return a * b
    return to_mpf(a) * to_mpf(b)


def _same_point(a, b) -> bool:
    if is_exact_number(a) and is_exact_number(b):
        return a == b
    return to_mpf(a) == to_mpf(b)


@dataclass(frozen=True)
class Polynomial(WeightSequence):
    """
    Finite weight sequence b_0, ..., b_d.

    Attributes:
        coeffs: Exact coefficients b_0..b_d.
    """

    coeffs: tuple

    family = "polynomial"

    def __post_init__(self):
        if not self.coeffs:
            raise ConfigError("Polynomial weights need at least one coefficient")

    @classmethod
    def of(cls, *values) -> "Polynomial":
        return cls(tuple(Fraction(v) for v in values))

    def coefficient(self, l: int) -> Scalar:
        return self.coeffs[l] if l < len(self.coeffs) else Fraction(0)

    @property
    def degree(self) -> int:
        d = len(self.coeffs) - 1
        while d > 0 and not self.coeffs[d]:
            d -= 1
        return d

    @property
    def rho(self) -> Extended:
        return Extended.infinite()

    @property
    def support(self) -> list[int]:
        return [l for l, b in enumerate(self.coeffs) if b]

    def derivative_at(self, y, k: int) -> Extended:
        exact = is_exact_number(y)
        y = _to_working(y, exact)
        acc = Fraction(0) if exact else mp.mpf(0)
        for l in range(len(self.coeffs) - 1, k - 1, -1):
            falling = math.perm(l, k)
            acc = acc * y + falling * _to_working(self.coeffs[l], exact)
        return Extended.finite(acc)

    def equivalent(self, lam, r) -> "Polynomial":
        return Polynomial(tuple(lam * r**l * b for l, b in enumerate(self.coeffs)))

    def to_dict(self) -> dict:
        return {"family": self.family, "coeffs": [str(c) for c in self.coeffs]}


@dataclass(frozen=True)
class Geometric(WeightSequence):
    """
    b_l = c p^l, B(y) = c / (1 - p y).

    Attributes:
        c: Overall weight.
        p: Ratio, 0 < p < 1 for a probability-like family.
    """

    c: Fraction
    p: Fraction

    family = "geometric"

    def __post_init__(self):
        if not (self.c > 0 and self.p > 0):
            raise ConfigError("Geometric weights need c > 0 and p > 0")

    def coefficient(self, l: int) -> Scalar:
        return self.c * self.p**l

    @property
    def rho(self) -> Extended:
        return Extended.finite(1 / self.p)

    def derivative_at(self, y, k: int) -> Extended:
        exact = is_exact_number(y)
        gap = 1 - _to_working(self.p, exact) * y
        if not gap:
            return Extended.infinite()
        c = _to_working(self.c, exact)
        p = _to_working(self.p, exact)
        return Extended.finite(c * math.factorial(k) * p**k / gap ** (k + 1))

    def equivalent(self, lam, r) -> "Geometric":
        return Geometric(lam * self.c, self.p * r)

    def to_dict(self) -> dict:
        return {"family": self.family, "c": str(self.c), "p": str(self.p)}


@dataclass(frozen=True)
class Polylog(WeightSequence):
    """
    b_0 = b0, b_l = c l^{-beta} r^l for l >= 1.

    B(y) = b0 + c Li_beta(r y), radius 1/r, with singular part
    c Γ(1-beta) (1 - r y)^{beta-1} at y = 1/r.

    Attributes:
        c: Weight of the power-law part (rational or big float).
        r: Exponential rate; rho = 1/r.
        beta: Power-law exponent, beta > 1.
        b0: Weight of label 0.
    """

    c: Scalar
    r: Fraction
    beta: Fraction
    b0: Scalar

    family = "polylog"

    def __post_init__(self):
        if not self.r > 0:
            raise ConfigError("Polylog weights need r > 0")
        if not self.beta > 1:
            raise ConfigError("Polylog weights need beta > 1 for a finite B(rho)")
        if not less_equal(0, self.c) or not less_equal(0, self.b0):
            raise ConfigError("Polylog weights need c >= 0 and b0 >= 0")

    @classmethod
    def probability(cls, beta, b0=Fraction(0)) -> "Polylog":
        """Distribution with r = 1 and total mass 1, at the current precision."""
        beta = Fraction(beta)
        c = (1 - to_mpf(b0)) / mp.zeta(to_mpf(beta))
        return cls(c, Fraction(1), beta, Fraction(b0))

    @property
    def is_exact(self) -> bool:
        return False

    def coefficient(self, l: int) -> Scalar:
        if l == 0:
            return self.b0
        return to_mpf(self.c) * mp.power(l, -to_mpf(self.beta)) * to_mpf(self.r) ** l

    @property
    def rho(self) -> Extended:
        return Extended.finite(1 / self.r)

    def derivative_at(self, y, k: int) -> Extended:
        beta = to_mpf(self.beta)
        if not y:
            return Extended.finite(math.factorial(k) * to_mpf(self.coefficient(k)))
        z = to_mpf(self.r) * to_mpf(y)
        at_rho = _same_point(y, self.rho.value)
        if at_rho and beta - k <= 1:
            return Extended.infinite()
        weights = _falling_factorial_coeffs(k) if k else [1]
        acc = mp.mpf(0)
        for j, s in enumerate(weights):
            if not s or (k and j == 0):
                continue
            order = beta - j
            li = mp.zeta(order) if at_rho else mp.polylog(order, z)
            acc += s * li
        value = to_mpf(self.c) * acc / to_mpf(y) ** k
        if k == 0:
            value += to_mpf(self.b0)
        return Extended.finite(value)

    def singular_data(self) -> SingularData:
        rho = self.rho.value
        beta = self.beta
        if beta.denominator == 1:
            alpha_tilde, C_B = None, None
        else:
            alpha_tilde = beta - 1
            C_B = to_mpf(self.c) * mp.gamma(1 - to_mpf(beta))
        return SingularData(
            rho=rho,
            alpha_tilde=alpha_tilde,
            C_B=C_B,
            B_at_rho=self.derivative_at(rho, 0),
            Bp_at_rho=self.derivative_at(rho, 1),
            Bpp_at_rho=self.derivative_at(rho, 2),
            Bppp_at_rho=self.derivative_at(rho, 3),
        )

    def with_b0(self, b0) -> "Polylog":
        return Polylog(self.c, self.r, self.beta, b0)

    def equivalent(self, lam, r) -> "Polylog":
        return Polylog(_product(lam, self.c), self.r * r, self.beta, _product(lam, self.b0))

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "c": str(self.c),
            "r": str(self.r),
            "beta": str(self.beta),
            "b0": str(self.b0),
        }


@dataclass(frozen=True)
class Mixture(WeightSequence):
    """
    Σ_i w_i b^{(i)} for nonnegative weights w_i.

    Attributes:
        components: Pairs (weight, WeightSequence).
    """

    components: tuple

    family = "mixture"

    def __post_init__(self):
        if not self.components:
            raise ConfigError("A mixture needs at least one component")
        for w, _ in self.components:
            if not less_equal(0, w):
                raise ConfigError("Mixture weights must be nonnegative")

    @classmethod
    def of(cls, *pairs) -> "Mixture":
        return cls(tuple((w, ws) for w, ws in pairs))

    @property
    def is_exact(self) -> bool:
        return all(ws.is_exact and is_exact_number(w) for w, ws in self.components)

    @property
    def degree(self) -> int | None:
        degrees = [ws.degree for w, ws in self.components if w]
        if any(d is None for d in degrees):
            return None
        return max(degrees)

    @property
    def support(self) -> list[int]:
        return [l for l in range(self.degree + 1) if self.coefficient(l)]

    def coefficient(self, l: int) -> Scalar:
        total = Fraction(0) if self.is_exact else mp.mpf(0)
        for w, ws in self.components:
            if not w:
                continue
            total += _product(w, ws.coefficient(l))
        return total

    @property
    def rho(self) -> Extended:
        finite = [ws.rho.value for w, ws in self.components if w and ws.rho.is_finite]
        if not finite:
            return Extended.infinite()
        best = finite[0]
        for value in finite[1:]:
            if less_equal(value, best):
                best = value
        return Extended.finite(best)

    def derivative_at(self, y, k: int) -> Extended:
        exact = is_exact_number(y) and self.is_exact
        total = Fraction(0) if exact else mp.mpf(0)
        for w, ws in self.components:
            if not w:
                continue
            part = ws.derivative_at(y, k)
            if part.is_infinite:
                return part
            value = _product(w, part.value)
            total += value if exact else to_mpf(value)
        return Extended.finite(total)

    def singular_data(self) -> SingularData | None:
        rho = self.rho
        if not rho.is_finite:
            return None
        alpha_tilde, C_B = None, None
        for w, ws in self.components:
            if not w or not ws.rho.is_finite or not _same_point(ws.rho.value, rho.value):
                continue
            data = ws.singular_data()
            if data is None or data.alpha_tilde is None:
                continue
            if alpha_tilde is None or data.alpha_tilde < alpha_tilde:
                alpha_tilde, C_B = data.alpha_tilde, to_mpf(w) * data.C_B
            elif data.alpha_tilde == alpha_tilde:
                C_B += to_mpf(w) * data.C_B
        value = rho.value
        return SingularData(
            rho=value,
            alpha_tilde=alpha_tilde,
            C_B=C_B,
            B_at_rho=self.derivative_at(value, 0),
            Bp_at_rho=self.derivative_at(value, 1),
            Bpp_at_rho=self.derivative_at(value, 2),
            Bppp_at_rho=self.derivative_at(value, 3),
        )

    def equivalent(self, lam, r) -> "Mixture":
        return Mixture(tuple((w, ws.equivalent(lam, r)) for w, ws in self.components))

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "components": [
                {"weight": str(w), "weights": ws.to_dict()} for w, ws in self.components
            ],
        }


def mixture_path(start: WeightSequence, end: WeightSequence, p) -> Mixture:
    """The family (1-p) * start + p * end."""
    return Mixture(((1 - p, start), (p, end)))
