"""
Truncated formal power series over exact rationals or big floats.
"""

from .base import Backend, Scalar, format_scalar, split_scalar, to_mpf
from .bivariate import BivariateSeries, divide_out_square, multiply_square
from .univariate import UnivariateSeries, arith, compose, compose_with_powers, reverse

__all__ = [
    "Backend",
    "Scalar",
    "format_scalar",
    "split_scalar",
    "to_mpf",
    "UnivariateSeries",
    "BivariateSeries",
    "arith",
    "compose",
    "compose_with_powers",
    "reverse",
    "divide_out_square",
    "multiply_square",
]
