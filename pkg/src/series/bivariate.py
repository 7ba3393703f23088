"""
Truncated bivariate power series as slices of univariate series.

A BivariateSeries in (u, v) stores slices[k] = [u^k] as a series in v.
Slices may carry different truncation orders (triangular truncation by
total degree is the common case), and products keep each slice at the
largest order its factors determine.
"""

import logging
from dataclasses import dataclass
from typing import Iterator, Sequence

from ..errors import BackendMismatchError, SeriesError
from .base import Backend, Scalar
from .univariate import EXACT, UnivariateSeries, compose_with_powers

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BivariateSeries:
    """
    Series Σ_k u^k S_k(v) with S_k truncated individually.

    Attributes:
        slices: slices[k] is the coefficient of u^k.
        backend: Coefficient backend shared by all slices.
    """

    slices: tuple
    backend: Backend = EXACT

    def __post_init__(self):
        if not self.slices:
            raise SeriesError("A bivariate series needs at least one slice")
        for s in self.slices:
            if s.backend != self.backend:
                raise BackendMismatchError(
                    f"Slice backend {s.backend} differs from series backend {self.backend}"
                )

    # ---------------------------------------------------------------
    # Construction
    # ---------------------------------------------------------------

    @classmethod
    def from_slices(cls, slices: Sequence[UnivariateSeries]) -> "BivariateSeries":
        slices = tuple(slices)
        return cls(slices, slices[0].backend)

    @classmethod
    def zero(cls, outer_order: int, inner_order: int, backend: Backend = EXACT) -> "BivariateSeries":
        z = UnivariateSeries.zero(inner_order, backend)
        return cls((z,) * (outer_order + 1), backend)

    @classmethod
    def triangular_zero(cls, order: int, backend: Backend = EXACT) -> "BivariateSeries":
        """Zero series truncated at total degree order."""
        return cls(
            tuple(UnivariateSeries.zero(order - k, backend) for k in range(order + 1)), backend
        )

    @classmethod
    def outer_only(cls, s: UnivariateSeries, inner_orders: Sequence[int]) -> "BivariateSeries":
        """The series s(u), with slice k truncated at inner_orders[k]."""
        slices = [
            UnivariateSeries.constant(s.coeffs[k], inner_orders[k], s.backend)
            for k in range(min(s.trunc_order + 1, len(inner_orders)))
        ]
        return cls(tuple(slices), s.backend)

    @classmethod
    def inner_only(cls, s: UnivariateSeries, inner_orders: Sequence[int]) -> "BivariateSeries":
        """The series s(v), with slice k truncated at inner_orders[k]."""
        slices = [s.truncate(inner_orders[0])]
        slices.extend(UnivariateSeries.zero(o, s.backend) for o in inner_orders[1:])
        return cls(tuple(slices), s.backend)

    # ---------------------------------------------------------------
    # Access
    # ---------------------------------------------------------------

    @property
    def outer_order(self) -> int:
        return len(self.slices) - 1

    @property
    def inner_order(self) -> int:
        return min(s.trunc_order for s in self.slices)

    @property
    def slice_orders(self) -> list[int]:
        return [s.trunc_order for s in self.slices]

    def coefficient(self, k: int, j: int) -> Scalar:
        return self.slices[k].coeffs[j]

    def rectangular(self, outer_order: int, inner_order: int) -> "BivariateSeries":
        if outer_order > self.outer_order:
            raise SeriesError(f"Outer order {self.outer_order} < requested {outer_order}")
        return BivariateSeries(
            tuple(s.truncate(inner_order) for s in self.slices[: outer_order + 1]),
            self.backend,
        )

    def is_zero(self) -> bool:
        return all(s.is_zero() for s in self.slices)

    def rows(self) -> Iterator[tuple[int, int, Scalar]]:
        """(k, j, coefficient) triples in slice order."""
        for k, s in enumerate(self.slices):
            for j, c in enumerate(s.coeffs):
                yield k, j, c

    def transpose(self) -> "BivariateSeries":
        """Swap the roles of u and v (rectangular part only)."""
        inner = self.inner_order
        slices = []
        for j in range(inner + 1):
            slices.append(
                UnivariateSeries(tuple(s.coeffs[j] for s in self.slices), self.backend)
            )
        return BivariateSeries(tuple(slices), self.backend)

    def diagonal(self) -> UnivariateSeries:
        """
        The univariate series S(t, t).

        Coefficient m needs every slice k <= m up to inner index m - k, so
        the result order is min(outer_order, min_k(k + order_k)).
        """
        order = min(
            [self.outer_order] + [k + s.trunc_order for k, s in enumerate(self.slices)]
        )
        with self.backend.context():
            coeffs = []
            for m in range(order + 1):
                acc = self.backend.zero()
                for k in range(m + 1):
                    acc += self.slices[k].coeffs[m - k]
                coeffs.append(acc)
        return UnivariateSeries(tuple(coeffs), self.backend)

    # ---------------------------------------------------------------
    # Arithmetic
    # ---------------------------------------------------------------

    def _check(self, other: "BivariateSeries") -> None:
        if self.backend != other.backend:
            raise BackendMismatchError(
                f"Series backends differ: {self.backend} vs {other.backend}"
            )

    def __add__(self, other: "BivariateSeries") -> "BivariateSeries":
        self._check(other)
        n = min(len(self.slices), len(other.slices))
        return BivariateSeries(
            tuple(self.slices[k] + other.slices[k] for k in range(n)), self.backend
        )

    def __neg__(self) -> "BivariateSeries":
        return BivariateSeries(tuple(-s for s in self.slices), self.backend)

    def __sub__(self, other: "BivariateSeries") -> "BivariateSeries":
        return self + (-other)

    def scale(self, factor) -> "BivariateSeries":
        return BivariateSeries(tuple(s.scale(factor) for s in self.slices), self.backend)

    def __mul__(self, other) -> "BivariateSeries":
        if not isinstance(other, BivariateSeries):
            return self.scale(other)
        self._check(other)
        n = min(len(self.slices), len(other.slices))
        out = []
        for k in range(n):
            order = min(
                min(self.slices[i].trunc_order, other.slices[k - i].trunc_order)
                for i in range(k + 1)
            )
            acc = UnivariateSeries.zero(order, self.backend)
            for i in range(k + 1):
                a, b = self.slices[i], other.slices[k - i]
                if a.is_zero() or b.is_zero():
                    continue
                acc = acc + a.truncate(order) * b.truncate(order)
            out.append(acc)
        return BivariateSeries(tuple(out), self.backend)

    __rmul__ = scale

    def derivative_outer(self) -> "BivariateSeries":
        """d/du."""
        if self.outer_order == 0:
            return BivariateSeries((UnivariateSeries.zero(0, self.backend),), self.backend)
        return BivariateSeries(
            tuple(self.slices[k].scale(k) for k in range(1, len(self.slices))),
            self.backend,
        )

    def derivative_inner(self) -> "BivariateSeries":
        """d/dv."""
        return BivariateSeries(tuple(s.derivative() for s in self.slices), self.backend)

    def shift_outer_down(self, k: int = 1) -> "BivariateSeries":
        """Divide by u^k; exact series must have vanishing leading slices."""
        if self.backend.is_exact and any(not s.is_zero() for s in self.slices[:k]):
            raise SeriesError(f"Series is not divisible by u^{k}")
        return BivariateSeries(self.slices[k:], self.backend)

    def sqrt(self) -> "BivariateSeries":
        """Square root along u; slices[0] must have a nonzero constant term."""
        root0 = self.slices[0].sqrt()
        denom = root0.scale(2).reciprocal()
        out = [root0]
        for k in range(1, len(self.slices)):
            acc = self.slices[k]
            for i in range(1, k):
                acc = acc - out[i] * out[k - i]
            out.append(acc * denom)
        return BivariateSeries(tuple(out), self.backend)

    def compose_inner(self, g: UnivariateSeries) -> "BivariateSeries":
        """Substitute v = g(t) into every slice."""
        order = min(self.inner_order, g.trunc_order)
        powers = g.truncate(order).powers(order)
        return BivariateSeries(
            tuple(compose_with_powers(s.truncate(order), powers) for s in self.slices),
            self.backend,
        )


def divide_out_square(Q: BivariateSeries, diagonal: bool = False):
    """
    Exact quotient q = Q/(v-u)^2.

    Slice recurrence: Q_k = v^2 q_k - 2v q_{k-1} + q_{k-2}, so
    q_k = (Q_k + 2v q_{k-1} - q_{k-2}) / v^2, and each numerator must vanish
    to order 2 in v.

    Args:
        Q: Series vanishing to order 2 on the diagonal u = v.
        diagonal: Also return q(t, t).

    Returns:
        q, or (q, q(t,t)) when diagonal is set.
    """
    backend = Q.backend
    out: list[UnivariateSeries] = []
    for k, Qk in enumerate(Q.slices):
        numer = Qk
        if k >= 1:
            numer = numer + out[k - 1].shift_up(1).scale(2)
        if k >= 2:
            numer = numer - out[k - 2]
        if numer.trunc_order < 2:
            logger.debug(f"divide_out_square: stopping at slice {k}, order exhausted")
            break
        try:
            out.append(numer.shift_down(2))
        except SeriesError as e:
            raise SeriesError(
                f"Nonzero remainder dividing by the diagonal square at slice {k}"
            ) from e
    if not out:
        raise SeriesError("Inner truncation too small to divide by the diagonal square")
    q = BivariateSeries(tuple(out), backend)
    if diagonal:
        return q, q.diagonal()
    return q


def multiply_square(q: BivariateSeries) -> BivariateSeries:
    """(v-u)^2 * q."""
    out = []
    for k, qk in enumerate(q.slices):
        acc = qk.shift_up(2)
        if k >= 1:
            acc = acc - q.slices[k - 1].shift_up(1).scale(2)
        if k >= 2:
            acc = acc + q.slices[k - 2]
        out.append(acc)
    return BivariateSeries(tuple(out), q.backend)
