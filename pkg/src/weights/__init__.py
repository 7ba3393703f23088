"""
Car-arrival weight sequences and their generating functions.
"""

from .base import (
    Extended,
    SingularData,
    WeightSequence,
    b_series,
    check_assumptions,
    equivalent,
    eval_B,
    moments,
    violated_assumptions,
)
from .families import Geometric, Mixture, Polylog, Polynomial, mixture_path
from .loader import load_weights, parse_scalar, weights_from_dict

__all__ = [
    "Extended",
    "SingularData",
    "WeightSequence",
    "Polynomial",
    "Geometric",
    "Polylog",
    "Mixture",
    "mixture_path",
    "b_series",
    "eval_B",
    "moments",
    "equivalent",
    "violated_assumptions",
    "check_assumptions",
    "load_weights",
    "parse_scalar",
    "weights_from_dict",
]
