"""
Truncated univariate power series.

A UnivariateSeries of truncation order N knows coefficients 0..N and
nothing beyond; every operation returns a series whose order is the
largest one the inputs determine.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from mpmath import mp

from ..errors import BackendMismatchError, SeriesError
from .base import Backend, Scalar, format_scalar, to_mpf

logger = logging.getLogger(__name__)

EXACT = Backend.exact()


def _convolve(a: Sequence[Scalar], b: Sequence[Scalar], order: int, zero: Scalar) -> list[Scalar]:
    """Coefficients 0..order of a*b, skipping zero terms."""
    out = [zero] * (order + 1)
    b_nonzero = [(j, bj) for j, bj in enumerate(b[: order + 1]) if bj]
    for i, ai in enumerate(a[: order + 1]):
        if not ai:
            continue
        limit = order - i
        for j, bj in b_nonzero:
            if j > limit:
                break
            out[i + j] += ai * bj
    return out


@dataclass(frozen=True)
class UnivariateSeries:
    """
    Truncated power series c_0 + c_1 t + ... + c_N t^N + O(t^{N+1}).

    Attributes:
        coeffs: The N+1 known coefficients.
        backend: Coefficient backend; mixing backends raises.
    """

    coeffs: tuple
    backend: Backend = EXACT

    def __post_init__(self):
        if len(self.coeffs) == 0:
            raise SeriesError("A series needs at least one coefficient")

    # ---------------------------------------------------------------
    # Construction
    # ---------------------------------------------------------------

    @classmethod
    def from_coeffs(
        cls, values: Iterable, order: int, backend: Backend = EXACT
    ) -> "UnivariateSeries":
        """Series of the given order; missing coefficients are zero."""
        values = list(values)[: order + 1]
        with backend.context():
            coeffs = [backend.coerce(v) for v in values]
            coeffs.extend([backend.zero()] * (order + 1 - len(coeffs)))
        return cls(tuple(coeffs), backend)

    @classmethod
    def zero(cls, order: int, backend: Backend = EXACT) -> "UnivariateSeries":
        return cls.from_coeffs([], order, backend)

    @classmethod
    def constant(cls, value, order: int, backend: Backend = EXACT) -> "UnivariateSeries":
        return cls.from_coeffs([value], order, backend)

    @classmethod
    def variable(cls, order: int, backend: Backend = EXACT) -> "UnivariateSeries":
        """The series t."""
        return cls.from_coeffs([0, 1], order, backend)

    # ---------------------------------------------------------------
    # Access
    # ---------------------------------------------------------------

    @property
    def trunc_order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> Scalar:
        return self.coeffs[k]

    def __len__(self) -> int:
        return len(self.coeffs)

    def degree(self) -> int:
        """Index of the highest nonzero known coefficient, -1 for zero."""
        for k in range(self.trunc_order, -1, -1):
            if self.coeffs[k]:
                return k
        return -1

    def valuation(self) -> int:
        """Index of the lowest nonzero coefficient, trunc_order+1 for zero."""
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return self.trunc_order + 1

    def is_zero(self) -> bool:
        return self.degree() < 0

    def truncate(self, order: int) -> "UnivariateSeries":
        if order > self.trunc_order:
            raise SeriesError(
                f"Cannot extend a series of order {self.trunc_order} to order {order}"
            )
        return UnivariateSeries(self.coeffs[: order + 1], self.backend)

    def padded(self, order: int) -> "UnivariateSeries":
        """
        Extend with zero coefficients.

        Only meaningful when the caller knows the unknown coefficients vanish
        (polynomials, Newton iterates).
        """
        if order <= self.trunc_order:
            return self.truncate(order)
        zero = self.backend.zero()
        return UnivariateSeries(
            self.coeffs + (zero,) * (order - self.trunc_order), self.backend
        )

    def to_strings(self) -> list[str]:
        return [format_scalar(c) for c in self.coeffs]

    # ---------------------------------------------------------------
    # Arithmetic
    # ---------------------------------------------------------------

    def _check(self, other: "UnivariateSeries") -> None:
        if self.backend != other.backend:
            raise BackendMismatchError(
                f"Series backends differ: {self.backend} vs {other.backend}"
            )

    def _lift(self, other) -> "UnivariateSeries":
        if isinstance(other, UnivariateSeries):
            self._check(other)
            return other
        return UnivariateSeries.constant(other, self.trunc_order, self.backend)

    def __add__(self, other) -> "UnivariateSeries":
        other = self._lift(other)
        order = min(self.trunc_order, other.trunc_order)
        with self.backend.context():
            coeffs = tuple(self.coeffs[k] + other.coeffs[k] for k in range(order + 1))
        return UnivariateSeries(coeffs, self.backend)

    __radd__ = __add__

    def __neg__(self) -> "UnivariateSeries":
        with self.backend.context():
            return UnivariateSeries(tuple(-c for c in self.coeffs), self.backend)

    def __sub__(self, other) -> "UnivariateSeries":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "UnivariateSeries":
        return self._lift(other) - self

    def scale(self, factor) -> "UnivariateSeries":
        with self.backend.context():
            factor = self.backend.coerce(factor)
            return UnivariateSeries(tuple(factor * c for c in self.coeffs), self.backend)

    def __mul__(self, other) -> "UnivariateSeries":
        if not isinstance(other, UnivariateSeries):
            return self.scale(other)
        self._check(other)
        order = min(self.trunc_order, other.trunc_order)
        with self.backend.context():
            coeffs = _convolve(self.coeffs, other.coeffs, order, self.backend.zero())
        return UnivariateSeries(tuple(coeffs), self.backend)

    def __rmul__(self, other) -> "UnivariateSeries":
        return self.scale(other)

    def reciprocal(self) -> "UnivariateSeries":
        """1/self; requires a nonzero constant term."""
        head = self.coeffs[0]
        if not head:
            raise SeriesError("Division by a series with zero constant term")
        with self.backend.context():
            inv = self.backend.one() / head
            nonzero = [(i, c) for i, c in enumerate(self.coeffs) if i > 0 and c]
            out = [inv]
            for k in range(1, self.trunc_order + 1):
                acc = self.backend.zero()
                for i, c in nonzero:
                    if i > k:
                        break
                    acc += c * out[k - i]
                out.append(-acc * inv)
        return UnivariateSeries(tuple(out), self.backend)

    def div_by_unit(self, other: "UnivariateSeries") -> "UnivariateSeries":
        self._check(other)
        return self * other.reciprocal()

    def __truediv__(self, other) -> "UnivariateSeries":
        if isinstance(other, UnivariateSeries):
            return self.div_by_unit(other)
        with self.backend.context():
            return self.scale(self.backend.one() / self.backend.coerce(other))

    def __pow__(self, n: int) -> "UnivariateSeries":
        if n < 0:
            return self.reciprocal() ** (-n)
        result = UnivariateSeries.constant(1, self.trunc_order, self.backend)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def derivative(self) -> "UnivariateSeries":
        """d/dt; the result is known to order N-1."""
        if self.trunc_order == 0:
            return UnivariateSeries.zero(0, self.backend)
        with self.backend.context():
            coeffs = tuple(k * self.coeffs[k] for k in range(1, self.trunc_order + 1))
        return UnivariateSeries(coeffs, self.backend)

    def integrate(self) -> "UnivariateSeries":
        """Antiderivative with zero constant; known to order N+1."""
        with self.backend.context():
            coeffs = [self.backend.zero()]
            coeffs.extend(c / (k + 1) for k, c in enumerate(self.coeffs))
        return UnivariateSeries(tuple(coeffs), self.backend)

    def shift_up(self, k: int) -> "UnivariateSeries":
        """Multiply by t^k."""
        zero = self.backend.zero()
        return UnivariateSeries((zero,) * k + self.coeffs, self.backend)

    def shift_down(self, k: int) -> "UnivariateSeries":
        """Divide by t^k; exact series must vanish to order k."""
        if k > self.trunc_order:
            raise SeriesError(f"Cannot divide an order-{self.trunc_order} series by t^{k}")
        if self.backend.is_exact and any(self.coeffs[:k]):
            raise SeriesError(f"Series is not divisible by t^{k}")
        return UnivariateSeries(self.coeffs[k:], self.backend)

    def sqrt(self) -> "UnivariateSeries":
        """Square root with the principal branch at the constant term."""
        head = self.coeffs[0]
        if not head:
            raise SeriesError("Square root of a series with zero constant term")
        root = self.backend.sqrt(head)
        with self.backend.context():
            twice = 2 * root
            out = [root]
            for k in range(1, self.trunc_order + 1):
                acc = self.coeffs[k]
                for i in range(1, k):
                    acc -= out[i] * out[k - i]
                out.append(acc / twice)
        return UnivariateSeries(tuple(out), self.backend)

    def powers(self, max_power: int) -> list["UnivariateSeries"]:
        """[1, self, self^2, ..., self^max_power]."""
        table = [UnivariateSeries.constant(1, self.trunc_order, self.backend)]
        for _ in range(max_power):
            table.append(table[-1] * self)
        return table

    def evaluate(self, point) -> Scalar:
        """Horner evaluation of the known coefficients at a scalar."""
        exact_point = isinstance(point, (int, Fraction))
        if self.backend.is_exact and exact_point:
            acc = Fraction(0)
            for c in reversed(self.coeffs):
                acc = acc * point + c
            return acc
        acc = mp.mpf(0)
        point = to_mpf(point)
        for c in reversed(self.coeffs):
            acc = acc * point + to_mpf(c)
        return acc


# -------------------------------------------------------------------
# Composition and reversion
# -------------------------------------------------------------------


def compose(outer: UnivariateSeries, inner: UnivariateSeries) -> UnivariateSeries:
    """
    outer(inner(t)) by Horner's rule.

    Args:
        outer: Series being substituted into.
        inner: Series with zero constant term.

    Returns:
        Composition truncated to the smaller of the two orders.
    """
    outer._check(inner)
    if inner.coeffs[0]:
        raise SeriesError("Inner series of a composition must have zero constant term")
    order = min(outer.trunc_order, inner.trunc_order)
    inner_t = inner.truncate(order)
    top = outer.truncate(order).degree()
    if top < 0:
        return UnivariateSeries.zero(order, outer.backend)
    result = UnivariateSeries.constant(outer.coeffs[top], order, outer.backend)
    for k in range(top - 1, -1, -1):
        result = result * inner_t + outer.coeffs[k]
    return result


def compose_with_powers(
    outer: UnivariateSeries, powers: Sequence[UnivariateSeries]
) -> UnivariateSeries:
    """
    outer(g) given a precomputed table powers[j] = g^j.

    Cheaper than compose() when many series are substituted into the same g.
    """
    order = min(outer.trunc_order, powers[0].trunc_order)
    if len(powers) <= min(outer.degree(), order):
        raise SeriesError("Power table too short for composition")
    backend = outer.backend
    with backend.context():
        acc = [backend.zero()] * (order + 1)
        for j in range(order + 1):
            c = outer.coeffs[j]
            if not c:
                continue
            p = powers[j].coeffs
            for k in range(j, order + 1):
                if p[k]:
                    acc[k] += c * p[k]
    return UnivariateSeries(tuple(acc), backend)


def reverse(f: UnivariateSeries) -> UnivariateSeries:
    """
    Compositional inverse g with f(g(t)) = t.

    Newton iteration g <- g - (f(g) - t)/f'(g), doubling the number of
    correct coefficients each step.
    """
    if f.trunc_order < 1:
        raise SeriesError("Reversion needs a series of order at least 1")
    if f.coeffs[0]:
        raise SeriesError("Reversion needs f(0) = 0")
    if not f.coeffs[1]:
        raise SeriesError("Reversion needs a nonzero linear coefficient")

    backend = f.backend
    N = f.trunc_order
    fprime = f.derivative()
    with backend.context():
        g = UnivariateSeries.from_coeffs([0, backend.one() / f.coeffs[1]], 1, backend)

    known = 1
    while known < N:
        target = min(2 * known + 1, N)
        g_t = g.padded(target)
        residual = compose(f.truncate(target), g_t) - UnivariateSeries.variable(target, backend)
        low = target - known - 1
        r = residual.shift_down(known + 1)
        slope = compose(fprime.truncate(low), g_t.truncate(low))
        correction = (r.truncate(low) / slope).shift_up(known + 1)
        g = g_t - correction
        logger.debug(f"reverse: {known} -> {target} coefficients")
        known = target
    return g


def arith(a: UnivariateSeries, b, op: str) -> UnivariateSeries:
    """
    Dispatch a named arithmetic operation.

    Args:
        a: Left operand.
        b: Right operand (series or scalar); ignored for unary operations.
        op: One of add, sub, mul, div_by_unit, derivative, integrate, scale.
    """
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div_by_unit":
        return a.div_by_unit(b)
    if op == "derivative":
        return a.derivative()
    if op == "integrate":
        return a.integrate()
    if op == "scale":
        return a.scale(b)
    raise ValueError(f"Unknown series operation: {op!r}")
