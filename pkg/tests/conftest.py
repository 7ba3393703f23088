"""Shared fixtures: the weight sequences used throughout the suite."""

import sys
from fractions import Fraction
from pathlib import Path

import pytest
from mpmath import mp

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.config import Settings
from src.weights import Geometric, Polynomial, load_weights

PROJECT_ROOT = Path(__file__).parent.parent
WEIGHTS_DIR = PROJECT_ROOT / "config" / "weights"


@pytest.fixture(autouse=True)
def restore_precision():
    # the CLI sets the global mpmath precision
    prec = mp.prec
    yield
    mp.prec = prec


@pytest.fixture
def weights_dir() -> Path:
    return WEIGHTS_DIR


@pytest.fixture
def settings() -> Settings:
    return Settings.load(PROJECT_ROOT / "config" / "settings.yaml")


@pytest.fixture
def poly_101():
    return Polynomial.of(1, 0, 1)


@pytest.fixture
def poly_111():
    return Polynomial.of(1, 1, 1)


@pytest.fixture
def poly_1001():
    return Polynomial.of(1, 0, 0, 1)


@pytest.fixture
def half_zero_half():
    return Polynomial.of(Fraction(1, 2), 0, Fraction(1, 2))


@pytest.fixture
def geometric_half():
    return Geometric(Fraction(1, 2), Fraction(1, 2))


@pytest.fixture(scope="session")
def dense_mixture():
    return load_weights(WEIGHTS_DIR / "dense_mixture.yaml")


@pytest.fixture(scope="session")
def polylog_dilute():
    return load_weights(WEIGHTS_DIR / "polylog_dilute.yaml")
