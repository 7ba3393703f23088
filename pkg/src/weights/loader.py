"""
Load weight sequences from YAML (or JSON) config files.

Example (config/weights/polylog_dilute.yaml):

    family: polylog
    c: 1
    r: 1
    beta: "7/2"
    b0: tuned
"""

import logging
from fractions import Fraction
from pathlib import Path

import yaml
from mpmath import mp

from ..errors import ConfigError
from .base import WeightSequence
from .families import Geometric, Mixture, Polylog, Polynomial

logger = logging.getLogger(__name__)


def parse_scalar(value) -> Fraction:
    """Parse an int, decimal string, "num/den" string or float to a Fraction."""
    if isinstance(value, bool):
        raise ConfigError(f"Expected a number, got {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(str(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError as e:
            raise ConfigError(f"Cannot parse scalar {value!r}") from e
    raise ConfigError(f"Expected a number, got {value!r}")


def weights_from_dict(data: dict, precision_bits: int = 256) -> WeightSequence:
    """
    Build a WeightSequence from its config dictionary.

    Args:
        data: Mapping with a "family" key and family parameters.
        precision_bits: Precision for derived big-float parameters
            (normalized and tuned polylog constants).

    Returns:
        The weight sequence; standing assumptions are not checked here.
    """
    if not isinstance(data, dict) or "family" not in data:
        raise ConfigError("Weight config must be a mapping with a 'family' key")

    family = str(data["family"]).lower()
    try:
        if family == "polynomial":
            coeffs = data["coeffs"]
            if not coeffs:
                raise ConfigError("Polynomial weights need coefficients")
            return Polynomial(tuple(parse_scalar(c) for c in coeffs))

        if family == "geometric":
            return Geometric(parse_scalar(data["c"]), parse_scalar(data["p"]))

        if family == "polylog":
            return _polylog_from_dict(data, precision_bits)

        if family == "mixture":
            components = []
            for item in data["components"]:
                weight = parse_scalar(item["weight"])
                components.append((weight, weights_from_dict(item["weights"], precision_bits)))
            return Mixture(tuple(components))
    except KeyError as e:
        raise ConfigError(f"Missing parameter {e} for family {family!r}") from e

    raise ConfigError(f"Unknown weight family: {family!r}")


def _polylog_from_dict(data: dict, precision_bits: int) -> Polylog:
    beta = parse_scalar(data["beta"])
    r = parse_scalar(data.get("r", 1))
    b0_raw = data.get("b0", 0)
    with mp.workprec(precision_bits):
        if data.get("normalize"):
            if r != 1:
                raise ConfigError("normalize: true requires r = 1")
            return Polylog.probability(beta, parse_scalar(b0_raw))
        base = Polylog(parse_scalar(data["c"]), r, beta, Fraction(0))
        if b0_raw == "tuned":
            # Imported here: the phase module depends on weights.
            from ..analysis.phase import tune_b0_to_dilute

            return tune_b0_to_dilute(base)
        return base.with_b0(parse_scalar(b0_raw))


def load_weights(path: str | Path, precision_bits: int = 256) -> WeightSequence:
    """
    Load a weight sequence from a YAML or JSON file.

    Args:
        path: Config file path.
        precision_bits: Precision for derived big-float parameters.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Weights config not found: {path}")

    with open(path, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f)

    if isinstance(data, dict) and "weights" in data and "family" not in data:
        data = data["weights"]
    ws = weights_from_dict(data, precision_bits)
    logger.info(f"Loaded {ws.family} weights from {path}")
    return ws
