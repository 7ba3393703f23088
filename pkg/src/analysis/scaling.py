"""
Universal scaling function I_alpha and the homogeneous function H_alpha.

I_alpha is evaluated by two independent absolutely convergent series:

- the explicit double sum over (p, q), q >= 1,
- the sum over exponents sigma of sqrt(1 - alpha x^(alpha-1) + (alpha-1) x^alpha)
  = Σ c_sigma x^sigma, each term weighted by 1/(Γ(sigma - alpha/2) Γ(-theta sigma)).

Both use reciprocal Gamma, so terms sitting on a Gamma pole are exactly zero.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from mpmath import mp

from ..errors import BudgetExceededError, DomainError
from ..series import Scalar, to_mpf

logger = logging.getLogger(__name__)

# Shells in a row that must fall below the tolerance before stopping.
QUIET_SHELLS = 3
MIN_SHELLS = 6


@dataclass
class ScalingFunctionEvaluator:
    """
    Evaluator of I_alpha(lambda) for lambda > 0.

    Attributes:
        alpha: Singular exponent in (2, 3].
        term_budget: Maximum number of series terms per evaluation.
        tolerance: Relative size of a shell at which summation stops.
        precision_bits: Working precision.
    """

    alpha: Fraction
    term_budget: int = 20000
    tolerance: float = 1e-15
    precision_bits: int = 256

    def __post_init__(self):
        if isinstance(self.alpha, (int, float, str)):
            self.alpha = Fraction(str(self.alpha))
        if not 2 < self.alpha <= 3:
            raise DomainError(f"alpha must lie in (2, 3], got {self.alpha}")

    @property
    def theta(self) -> Fraction:
        return 1 / (self.alpha - 1)

    def __call__(self, lam) -> Scalar:
        return self.explicit(lam)

    def _check_lambda(self, lam) -> None:
        if not to_mpf(lam) > 0:
            raise DomainError(f"I_alpha needs lambda > 0, got {lam}")

    def _sum_shells(self, shells, what: str):
        """Sum an iterator of shells (lists of terms) until it settles."""
        total = mp.mpf(0)
        quiet = 0
        terms = 0
        for index, shell in enumerate(shells):
            shell_sum = mp.fsum(shell)
            total += shell_sum
            terms += len(shell)
            size = max((abs(t) for t in shell), default=mp.mpf(0))
            if index >= MIN_SHELLS and size <= self.tolerance * abs(total):
                quiet += 1
                if quiet >= QUIET_SHELLS:
                    logger.debug(f"{what}: {terms} terms, {index + 1} shells")
                    return total
            else:
                quiet = 0
            if terms > self.term_budget:
                raise BudgetExceededError(
                    f"{what} did not settle within {self.term_budget} terms",
                    partial=total,
                    bound=size,
                )
        return total

    def explicit(self, lam) -> Scalar:
        """I_alpha(lambda) from the explicit (p, q) double sum."""
        self._check_lambda(lam)
        with mp.workprec(self.precision_bits):
            alpha = self.alpha
            a = to_mpf(alpha)
            ratio = alpha / (alpha - 1)
            lam = to_mpf(lam)
            log_lam = mp.log(lam)
            prefactor = 1 / (2 * mp.sqrt(mp.pi))

            def shells():
                m = 1
                while True:
                    shell = []
                    for q in range(1, m + 1):
                        p = m - q
                        exponent = p + ratio * q
                        shifted = (alpha - 1) * p + alpha * (q - Fraction(1, 2))
                        term = (
                            (-1) ** (q + 1)
                            * prefactor
                            * mp.gamma(p + q - mp.mpf(1) / 2)
                            * mp.rgamma(to_mpf(shifted))
                            * mp.rgamma(-to_mpf(exponent))
                            * mp.power(a, p)
                            * mp.power(a - 1, q)
                            / (mp.factorial(p) * mp.factorial(q))
                            * mp.exp(-(to_mpf(exponent) + 1) * log_lam)
                        )
                        shell.append(term)
                    yield shell
                    m += 1

            return +self._sum_shells(shells(), "I_alpha (double sum)")

    def sigma_expansion(self, max_order: int) -> dict[Fraction, Fraction]:
        """
        Exponents and coefficients {sigma: c_sigma} of
        sqrt(1 + u), u = -alpha x^(alpha-1) + (alpha-1) x^alpha,
        from the binomial series truncated at u^max_order.
        """
        alpha = self.alpha
        coeffs: dict[Fraction, Fraction] = {}
        binom = Fraction(1)
        for k in range(max_order + 1):
            if k:
                binom *= (Fraction(1, 2) - (k - 1)) / k
            for j in range(k + 1):
                sigma = (alpha - 1) * (k - j) + alpha * j
                c = binom * comb(k, j) * (-alpha) ** (k - j) * (alpha - 1) ** j
                coeffs[sigma] = coeffs.get(sigma, Fraction(0)) + c
        return coeffs

    def sigma_series(self, lam) -> Scalar:
        """I_alpha(lambda) from Σ c_sigma λ^(-θσ-1) / (Γ(σ-α/2) Γ(-θσ))."""
        self._check_lambda(lam)
        theta = self.theta
        gamma0 = self.alpha / 2
        with mp.workprec(self.precision_bits):
            lam = to_mpf(lam)
            log_lam = mp.log(lam)

            def shells():
                seen: set[Fraction] = set()
                order = 0
                while True:
                    order += 1
                    expansion = self.sigma_expansion(order)
                    fresh = sorted(
                        s for s in expansion if s not in seen and _degree_done(s, self.alpha, order)
                    )
                    shell = []
                    for sigma in fresh:
                        seen.add(sigma)
                        c = expansion[sigma]
                        if not c:
                            continue
                        scaled = theta * sigma
                        term = (
                            to_mpf(c)
                            * mp.rgamma(to_mpf(sigma - gamma0))
                            * mp.rgamma(-to_mpf(scaled))
                            * mp.exp(-(to_mpf(scaled) + 1) * log_lam)
                        )
                        shell.append(term)
                    yield shell

            return +self._sum_shells(shells(), "I_alpha (sigma series)")

    def tail_constant(self) -> Scalar:
        """lim λ^(β0+1) I_alpha(λ) = (α-1) / (2 Γ(-β0) Γ(-β1))."""
        with mp.workprec(self.precision_bits):
            a = to_mpf(self.alpha)
            beta0 = a / (a - 1)
            beta1 = -a / 2
            return (a - 1) * mp.rgamma(-beta0) * mp.rgamma(-beta1) / 2


def _degree_done(sigma: Fraction, alpha: Fraction, order: int) -> bool:
    """
    True when every (a, b) with (alpha-1) a + alpha b = sigma has a + b <= order,
    so the coefficient of x^sigma is final once u^order is included.
    """
    return sigma <= (alpha - 1) * order


def H_alpha(S, t, alpha) -> Scalar:
    """
    H_alpha(S, t) = (t^α - S^α - α S^(α-1) (t - S)) / (t - S)^2,
    with the value α(α-1)/2 S^(α-2) on the diagonal t = S.
    """
    a = to_mpf(alpha)
    S, t = to_mpf(S), to_mpf(t)
    if t == S:
        return a * (a - 1) / 2 * mp.power(S, a - 2)
    gap = t - S
    return (mp.power(t, a) - mp.power(S, a) - a * mp.power(S, a - 1) * gap) / (gap * gap)
