import math
from fractions import Fraction

import pytest
from mpmath import mp

from src.analysis import H_alpha, ScalingFunctionEvaluator, universal_exponents
from src.errors import DomainError

ALPHAS = [Fraction(5, 2), Fraction(3)]
LAMBDAS = [0.5, 1, 2, 5]


@pytest.mark.parametrize("alpha", ALPHAS)
@pytest.mark.parametrize("lam", LAMBDAS)
def test_two_series_agree(alpha, lam):
    evaluator = ScalingFunctionEvaluator(alpha, precision_bits=128)
    explicit = evaluator.explicit(lam)
    sigma = evaluator.sigma_series(lam)
    assert abs(explicit - sigma) <= 1e-8 * abs(explicit)


def _tail_ratio(evaluator, lam) -> float:
    beta0 = universal_exponents(evaluator.alpha).beta0
    scaled = evaluator(lam) * mp.power(lam, float(beta0) + 1)
    return float(scaled / evaluator.tail_constant())


@pytest.mark.parametrize("alpha", [Fraction(5, 2), Fraction(11, 4), Fraction(3)])
def test_tail_behaviour(alpha):
    evaluator = ScalingFunctionEvaluator(alpha, precision_bits=128)
    assert _tail_ratio(evaluator, 1000) == pytest.approx(1, abs=0.02)


def test_tail_gap_shrinks_like_one_over_lambda():
    evaluator = ScalingFunctionEvaluator(Fraction(5, 2), precision_bits=128)
    gaps = [1 - _tail_ratio(evaluator, lam) for lam in (50, 200, 1000)]
    # 0.037 at lambda = 50: too far out for a 2% band
    assert gaps[0] > 0.02
    assert gaps[0] > gaps[1] > gaps[2] > 0
    assert gaps[0] / gaps[1] == pytest.approx(4, rel=0.2)


def test_sigma_expansion_starts_with_binomial_terms():
    evaluator = ScalingFunctionEvaluator(Fraction(5, 2))
    coeffs = evaluator.sigma_expansion(2)
    # sqrt(1 + u) = 1 + u/2 - u^2/8 + ..., u = -alpha x^(alpha-1) + (alpha-1) x^alpha
    assert coeffs[Fraction(0)] == 1
    assert coeffs[Fraction(3, 2)] == Fraction(-5, 4)
    assert coeffs[Fraction(5, 2)] == Fraction(3, 4)
    assert coeffs[Fraction(3)] == Fraction(-25, 32)


@pytest.mark.parametrize("alpha", [2, Fraction(7, 2), "1"])
def test_alpha_outside_range(alpha):
    with pytest.raises(DomainError):
        ScalingFunctionEvaluator(alpha)


@pytest.mark.parametrize("lam", [0, -1])
def test_lambda_must_be_positive(lam):
    with pytest.raises(DomainError):
        ScalingFunctionEvaluator(Fraction(3)).explicit(lam)


def test_H3_is_linear():
    for S, t in [(0.3, 0.7), (1.2, 0.1), (0.5, 0.5), (0, 2)]:
        assert float(H_alpha(S, t, 3)) == pytest.approx(t + 2 * S, rel=1e-12)


@pytest.mark.parametrize("alpha", [Fraction(9, 4), Fraction(5, 2), Fraction(11, 4), Fraction(3)])
def test_H_alpha_homogeneous_and_bounded(alpha):
    a = float(alpha)
    diagonal = math.sqrt(0.5)
    step = math.pi / 2 / 1000
    # k = 500 is the diagonal, taken exactly below
    points = [(math.cos(step * k), math.sin(step * k)) for k in range(1001) if k != 500]
    with mp.workprec(128):
        for S, t in points + [(diagonal, diagonal)]:
            value = float(H_alpha(S, t, alpha))
            # unit vectors: |(S, t)|^(alpha - 2) = 1
            assert 0.1 <= value <= 10
            scaled = float(H_alpha(3 * S, 3 * t, alpha))
            assert scaled == pytest.approx(3 ** (a - 2) * value, rel=1e-10)
