"""
Coefficient backends shared by univariate and bivariate series.

Two backends exist: exact rationals (fractions.Fraction) and big floats
(mpmath.mpf at a fixed binary precision). Values of one backend are never
silently mixed with the other.
"""

import contextlib
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

import mpmath
from mpmath import mp

from ..errors import BackendMismatchError, SeriesError

Scalar = Union[Fraction, mpmath.mpf]

EXACT_KIND = "exact"
FLOAT_KIND = "float"


@dataclass(frozen=True)
class Backend:
    """
    Coefficient backend tag.

    Attributes:
        kind: "exact" for rationals, "float" for big floats.
        precision_bits: Binary precision for the float backend.
    """

    kind: str = EXACT_KIND
    precision_bits: int | None = None

    @classmethod
    def exact(cls) -> "Backend":
        return cls(EXACT_KIND, None)

    @classmethod
    def big_float(cls, precision_bits: int = 256) -> "Backend":
        return cls(FLOAT_KIND, int(precision_bits))

    @classmethod
    def from_name(cls, name: str, precision_bits: int = 256) -> "Backend":
        """Parse a CLI/config backend name."""
        if name == EXACT_KIND:
            return cls.exact()
        if name == FLOAT_KIND:
            return cls.big_float(precision_bits)
        raise ValueError(f"Unknown backend: {name!r}")

    @property
    def is_exact(self) -> bool:
        return self.kind == EXACT_KIND

    def context(self) -> contextlib.AbstractContextManager:
        """Context in which arithmetic on this backend's values must run."""
        if self.is_exact:
            return contextlib.nullcontext()
        return mp.workprec(self.precision_bits)

    def coerce(self, value) -> Scalar:
        """Convert a number to this backend, refusing lossy exact conversions."""
        if self.is_exact:
            if isinstance(value, Fraction):
                return value
            if isinstance(value, int):
                return Fraction(value)
            raise BackendMismatchError(
                f"Cannot use {type(value).__name__} value {value!r} with the exact backend"
            )
        with self.context():
            return to_mpf(value)

    def zero(self) -> Scalar:
        return Fraction(0) if self.is_exact else self.coerce(0)

    def one(self) -> Scalar:
        return Fraction(1) if self.is_exact else self.coerce(1)

    def sqrt(self, value: Scalar) -> Scalar:
        """Square root; exact backend requires a perfect rational square."""
        if self.is_exact:
            root = exact_sqrt(value)
            if root is None:
                raise SeriesError(f"{value} is not a rational square")
            return root
        with self.context():
            return mp.sqrt(value)

    def __str__(self) -> str:
        if self.is_exact:
            return "exact"
        return f"float({self.precision_bits})"


def to_mpf(value) -> mpmath.mpf:
    """Convert int, Fraction, str or mpf to an mpf at the current precision."""
    if isinstance(value, Fraction):
        return mp.mpf(value.numerator) / value.denominator
    if isinstance(value, str) and "/" in value:
        return to_mpf(Fraction(value))
    return mp.mpf(value)


def exact_sqrt(value: Fraction) -> Fraction | None:
    """Rational square root of a nonnegative rational, or None."""
    if value < 0:
        return None
    num = math.isqrt(value.numerator)
    den = math.isqrt(value.denominator)
    if num * num == value.numerator and den * den == value.denominator:
        return Fraction(num, den)
    return None


def format_scalar(value: Scalar, digits: int = 30) -> str:
    """Lossless "num/den" for rationals; fixed-digit decimal for floats."""
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return mp.nstr(value, digits)


def split_scalar(value: Scalar) -> tuple[str, str]:
    """(numerator, denominator) strings for CSV output."""
    if isinstance(value, Fraction):
        return str(value.numerator), str(value.denominator)
    return format_scalar(value), "1"


def nonzero_terms(coeffs: tuple[Scalar, ...], limit: int) -> Iterator[tuple[int, Scalar]]:
    """(index, value) pairs of the nonzero coefficients up to limit."""
    for i, c in enumerate(coeffs[: limit + 1]):
        if c:
            yield i, c
