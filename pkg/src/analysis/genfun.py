"""
Generating function of fully parked trees.

F(x, y) = Σ w_b(t, ℓ) x^{|V(t)|} y^{s(t, ℓ)} over fully packed labeled trees
solves the catalytic equation

    F = (x/y) * (B(y)/(1 - F) - b_0/(1 - F(x, 0))),

and is parametrized by Y = Ŷ(x), the compositional inverse of

    x̂(Y) = Y B(Y) / (B(Y) + Y B'(Y))^2,

through F(x, y) = F̂(Ŷ(x), y) with
F̂(Y, y) = 1/2 + ((Y - y) sqrt(q(Y, y)) - φ(Y)) / (2y),
q = Q/(Y - y)^2 and Q(Y, y) = (φ(Y) + y)^2 - 4 y B(y) x̂(Y).

Bivariate objects in (Y, y) are stored with the y-power as the outer index
and Y as the inner series variable; F from the functional equation is stored
with x outer and y inner.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp

from ..errors import DomainError, InconsistencyError
from ..series import (
    Backend,
    BivariateSeries,
    Scalar,
    UnivariateSeries,
    compose,
    compose_with_powers,
    divide_out_square,
    reverse,
    to_mpf,
)
from ..weights import WeightSequence, eval_B

logger = logging.getLogger(__name__)


def default_backend(ws: WeightSequence, precision_bits: int = 256) -> Backend:
    """Exact rationals when every weight is rational, big floats otherwise."""
    return Backend.exact() if ws.is_exact else Backend.big_float(precision_bits)


# -------------------------------------------------------------------
# Functional equation
# -------------------------------------------------------------------


def solve_functional_equation(
    ws: WeightSequence, N: int, P: int, backend: Backend | None = None
) -> tuple[BivariateSeries, UnivariateSeries]:
    """
    Solve the catalytic equation order by order in x.

    With A = 1/(1 - F) = Σ_m A_m(y) x^m, slice n of F is
    (B(y) A_{n-1}(y) - b_0 A_{n-1}(0)) / y. Slice n is carried to y-order
    P + N - n so that every later slice still reaches order P.

    Args:
        ws: Weight sequence.
        N: Largest power of x.
        P: Largest power of y.
        backend: Coefficient backend (defaults to exact for rational weights).

    Returns:
        (F, F0): F with slices F_0..F_N (x outer, y inner, order P) and
        F0(x) = F(x, 0).
    """
    if N < 1 or P < 1:
        raise ValueError("N and P must be at least 1")
    backend = backend or default_backend(ws)

    def width(n: int) -> int:
        return P + N - n

    B = ws.b_series(P + N + 1, backend)
    b0 = B[0]
    slices = [UnivariateSeries.zero(width(0), backend)]
    inverse = [UnivariateSeries.constant(1, width(0), backend)]

    for n in range(1, N + 1):
        w = width(n - 1)
        product = B.truncate(w) * inverse[n - 1].truncate(w)
        with backend.context():
            numerator = product - b0 * inverse[n - 1][0]
        slices.append(numerator.shift_down(1))

        acc = UnivariateSeries.zero(width(n), backend)
        for k in range(1, n + 1):
            acc = acc + slices[k].truncate(width(n)) * inverse[n - k].truncate(width(n))
        inverse.append(acc)
        logger.debug(f"functional equation: slice {n} done")

    F = BivariateSeries(tuple(s.truncate(P) for s in slices), backend)
    F0 = UnivariateSeries(tuple(s[0] for s in F.slices), backend)
    logger.info(f"Solved functional equation to x^{N}, y^{P} ({backend})")
    return F, F0


# -------------------------------------------------------------------
# Parametrization
# -------------------------------------------------------------------


@dataclass(frozen=True)
class ParametrizationBundle:
    """
    Series objects of the parametrization, all in the variable Y.

    Attributes:
        ws: Weight sequence.
        order: Truncation order N of every series.
        backend: Coefficient backend.
        B: B(Y).
        D: B(Y) + Y B'(Y).
        psi: Y B'(Y) / B(Y).
        phi: Y (B - Y B') / (B + Y B').
        xhat: Y B / (B + Y B')^2.
        F0hat: 1 - b_0 / (B (1 - psi^2)).
        W: Lagrange kernel B (1 + psi)^2 = D^2/B, so that Y = x W(Y).
        Yhat: Compositional inverse of xhat (None if not requested).
    """

    ws: WeightSequence
    order: int
    backend: Backend
    B: UnivariateSeries
    D: UnivariateSeries
    psi: UnivariateSeries
    phi: UnivariateSeries
    xhat: UnivariateSeries
    F0hat: UnivariateSeries
    W: UnivariateSeries
    Yhat: UnivariateSeries | None = None

    @property
    def b0(self) -> Scalar:
        return self.B[0]

    def Q_series(self, inner_orders: list[int]) -> BivariateSeries:
        """
        Q(Y, y) with y outer and Y inner.

        Slice k is [y^k]Q: φ², 2φ - 4b_0 x̂, 1 - 4b_1 x̂, then -4b_{k-1} x̂.
        """
        backend = self.backend
        slices = []
        for k, order in enumerate(inner_orders):
            if order > self.order:
                raise ValueError(f"Bundle order {self.order} too small for inner order {order}")
            phi = self.phi.truncate(order)
            xhat = self.xhat.truncate(order)
            with backend.context():
                b_prev = backend.coerce(self.ws.coefficient(k - 1) if k >= 1 else 0)
            if k == 0:
                s = phi * phi
            elif k == 1:
                s = phi.scale(2) - xhat.scale(4 * b_prev)
            elif k == 2:
                s = 1 - xhat.scale(4 * b_prev)
            else:
                s = -xhat.scale(4 * b_prev)
            slices.append(s)
        return BivariateSeries(tuple(slices), backend)

    def q_series(self, inner_orders: list[int]) -> BivariateSeries:
        """q = Q/(Y - y)^2 with y outer; slice k loses 2 + k inner orders."""
        return divide_out_square(self.Q_series(inner_orders))


def _kernel_series(ws: WeightSequence, N: int, backend: Backend) -> dict:
    B_full = ws.b_series(N + 1, backend)
    Bp = B_full.derivative()
    B = B_full.truncate(N)
    YBp = Bp.shift_up(1).truncate(N)
    D = B + YBp
    inv_D = D.reciprocal()
    psi = YBp / B
    phi = ((B - YBp) * inv_D).shift_up(1).truncate(N)
    xhat = (B * inv_D * inv_D).shift_up(1).truncate(N)
    with backend.context():
        b0 = B[0]
    F0hat = 1 - (B * (1 - psi * psi)).reciprocal().scale(b0)
    W = D * D / B
    return {"B": B, "D": D, "psi": psi, "phi": phi, "xhat": xhat, "F0hat": F0hat, "W": W}


def build_parametrization(
    ws: WeightSequence, N: int, backend: Backend | None = None, invert: bool = True
) -> ParametrizationBundle:
    """
    Build x̂, φ, ψ, F̂_0 and Ŷ = reverse(x̂) to order N.

    Args:
        ws: Weight sequence.
        N: Truncation order.
        backend: Coefficient backend.
        invert: Compute Ŷ (the expensive step).
    """
    backend = backend or default_backend(ws)
    parts = _kernel_series(ws, N, backend)
    Yhat = reverse(parts["xhat"]) if invert else None
    bundle = ParametrizationBundle(ws=ws, order=N, backend=backend, Yhat=Yhat, **parts)

    if Yhat is not None and backend.is_exact:
        negative = [n for n, c in enumerate(Yhat.coeffs) if c < 0]
        if negative:
            raise InconsistencyError(f"Ŷ has negative coefficients at orders {negative[:5]}")
    logger.info(f"Built parametrization to order {N} ({backend})")
    return bundle


def lagrange_coefficients(bundle: ParametrizationBundle, n_max: int) -> list[Scalar]:
    """
    [x^n]Ŷ = (1/n) [Y^{n-1}] W(Y)^n for n = 1..n_max (index 0 is 0).
    """
    if n_max > bundle.order + 1:
        raise ValueError(f"Bundle order {bundle.order} too small for n_max {n_max}")
    backend = bundle.backend
    W = bundle.W.truncate(max(n_max - 1, 0))
    out = [backend.zero()]
    power = UnivariateSeries.constant(1, W.trunc_order, backend)
    for n in range(1, n_max + 1):
        power = power * W
        with backend.context():
            out.append(power[n - 1] / n)
    return out


def fhat_series(
    ws: WeightSequence, N: int, P: int, backend: Backend | None = None
) -> BivariateSeries:
    """
    F̂(Y, y) with y outer (orders 0..P) and Y inner (order N).

    Slice p equals [p=0]/2 + (Y s_{p+1}(Y) - s_p(Y))/2 with s = sqrt(q),
    the branch with s(0, 0) = 1.
    """
    backend = backend or default_backend(ws)
    M = N + P + 3
    bundle = build_parametrization(ws, M, backend, invert=False)
    q = bundle.q_series([M] * (P + 2)).rectangular(P + 1, N)
    s = q.sqrt()
    slices = []
    with backend.context():
        half = backend.one() / 2
    for p in range(P + 1):
        shifted = s.slices[p + 1].shift_up(1).truncate(N)
        slice_p = (shifted - s.slices[p]).scale(half)
        if p == 0:
            slice_p = slice_p + half
        slices.append(slice_p)
    return BivariateSeries(tuple(slices), backend)


# -------------------------------------------------------------------
# Large-order helpers (big-float runs)
# -------------------------------------------------------------------


def solve_Yhat(ws: WeightSequence, N: int, backend: Backend | None = None) -> UnivariateSeries:
    """
    Ŷ(x) to order N by Newton iteration on h(Y) = Y B(Y) - x D(Y)^2.

    Only B, B', B'' are composed with the iterate, so polynomial B costs
    O(deg B * N^2) per step instead of a dense composition.
    """
    backend = backend or default_backend(ws)
    B = ws.b_series(N + 2, backend)
    Bp = B.derivative()
    Bpp = Bp.derivative()
    with backend.context():
        g = UnivariateSeries.from_coeffs([0, B[0]], 1, backend)

    known = 1
    while known < N:
        target = min(2 * known + 1, N)
        low = target - known - 1
        g_t = g.padded(target)
        x = UnivariateSeries.variable(target, backend)
        Bg = compose(B.truncate(target), g_t)
        Bpg = compose(Bp.truncate(target), g_t)
        Dg = Bg + g_t * Bpg
        h = g_t * Bg - x * Dg * Dg

        g_l = g_t.truncate(low)
        Bppg = compose(Bpp.truncate(low), g_l)
        Dg_l, Bg_l, Bpg_l = Dg.truncate(low), Bg.truncate(low), Bpg.truncate(low)
        x_l = UnivariateSeries.variable(low, backend) if low >= 1 else UnivariateSeries.zero(0, backend)
        slope = Bg_l + g_l * Bpg_l - (x_l * Dg_l * (Bpg_l.scale(2) + g_l * Bppg)).scale(2)

        correction = (h.shift_down(known + 1).truncate(low) / slope).shift_up(known + 1)
        g = g_t - correction
        known = target
    logger.debug(f"solve_Yhat: order {N} reached")
    return g


def f0_series(ws: WeightSequence, N: int, backend: Backend | None = None) -> UnivariateSeries:
    """
    F(x, 0) to order N as 1 - b_0 x/φ(Ŷ(x)).

    With Ŷ = x u(x): x/φ(Ŷ) = D(Ŷ) / (u (B(Ŷ) - Ŷ B'(Ŷ))).
    """
    backend = backend or default_backend(ws)
    Yhat = solve_Yhat(ws, N + 1, backend)
    u = Yhat.shift_down(1)
    g = Yhat.truncate(N)
    B = ws.b_series(N + 1, backend)
    Bp = B.derivative()
    Bg = compose(B.truncate(N), g)
    Bpg = compose(Bp.truncate(N), g)
    D = Bg + g * Bpg
    ratio = D / (u * (Bg - g * Bpg))
    with backend.context():
        b0 = B[0]
    return 1 - ratio.scale(b0)


def slice_series(
    ws: WeightSequence, N: int, p_values: list[int], backend: Backend | None = None
) -> dict[int, UnivariateSeries]:
    """
    F_p(x) = [y^p] F(x, y) to order N for each p, via F̂_p(Ŷ(x)).
    """
    backend = backend or default_backend(ws)
    P = max(p_values)
    Fhat = fhat_series(ws, N, P, backend)
    Yhat = solve_Yhat(ws, N, backend)
    powers = Yhat.powers(N)
    out = {p: compose_with_powers(Fhat.slices[p], powers) for p in p_values}
    logger.info(f"Computed slices p={p_values} to x^{N}")
    return out


# -------------------------------------------------------------------
# Numeric evaluation
# -------------------------------------------------------------------


class ParametrizationEvaluator:
    """
    Point evaluation of x̂, φ, ψ, Q, q at Y in [0, rho].

    Rational points give exact values for rational weights; otherwise values
    are mpf at the ambient mpmath precision.
    """

    def __init__(self, ws: WeightSequence):
        self.ws = ws

    def point(self, value) -> Scalar:
        """Rational for rational weights at rational points, mpf otherwise."""
        if self.ws.is_exact and isinstance(value, (int, Fraction)):
            return Fraction(value)
        return to_mpf(value)

    def B_values(self, Y, upto: int = 2) -> list[Scalar]:
        """[B(Y), B'(Y), ...]; raises DomainError on infinite values."""
        Y = self.point(Y)
        return [self.point(v) for v in self.ws.values_at(Y, upto)]

    def D(self, Y) -> Scalar:
        Y = self.point(Y)
        B, Bp = self.B_values(Y, 1)
        return B + Y * Bp

    def D_prime(self, Y) -> Scalar:
        Y = self.point(Y)
        _, Bp, Bpp = self.B_values(Y, 2)
        return 2 * Bp + Y * Bpp

    def xhat(self, Y) -> Scalar:
        Y = self.point(Y)
        B, Bp = self.B_values(Y, 1)
        D = B + Y * Bp
        return Y * B / (D * D)

    def xhat_numerator(self, Y) -> Scalar:
        """(B - YB')^2 - 2Y^2 B B''; same sign as x̂'(Y)."""
        Y = self.point(Y)
        B, Bp, Bpp = self.B_values(Y, 2)
        gap = B - Y * Bp
        return gap * gap - 2 * Y * Y * B * Bpp

    def xhat_prime(self, Y) -> Scalar:
        Y = self.point(Y)
        B, Bp, Bpp = self.B_values(Y, 2)
        D = B + Y * Bp
        gap = B - Y * Bp
        return (gap * gap - 2 * Y * Y * B * Bpp) / (D * D * D)

    def xhat_second_at_critical(self, Y) -> Scalar:
        """x̂''(Y) at a point where x̂'(Y) = 0."""
        Y = self.point(Y)
        B, Bp, Bpp, Bppp = self.B_values(Y, 3)
        D = B + Y * Bp
        gap = B - Y * Bp
        return -(3 * gap * gap + 2 * Y**3 * B * Bppp) / (Y * D**3)

    def xhat_second(self, Y) -> Scalar:
        """x̂''(Y) by numeric differentiation (Y strictly inside (0, rho))."""
        return mp.diff(lambda t: to_mpf(self.xhat(t)), to_mpf(Y), 2)

    def psi(self, Y) -> Scalar:
        Y = self.point(Y)
        B, Bp = self.B_values(Y, 1)
        return Y * Bp / B

    def phi(self, Y) -> Scalar:
        Y = self.point(Y)
        B, Bp = self.B_values(Y, 1)
        return Y * (B - Y * Bp) / (B + Y * Bp)

    def phi_prime(self, Y) -> Scalar:
        return self.D(Y) * self.xhat_prime(Y)

    def Q(self, Y, y) -> Scalar:
        Y, y = self.point(Y), self.point(y)
        B_y = self.point(eval_B(self.ws, y, 0).require("B(y)"))
        shifted = self.phi(Y) + y
        return shifted * shifted - 4 * y * B_y * self.xhat(Y)

    def q(self, Y, y) -> Scalar:
        """Q/(Y-y)^2, with the removable value φ'(Y) on the diagonal."""
        Y, y = self.point(Y), self.point(y)
        if Y == y:
            return self.phi_prime(Y)
        gap = Y - y
        return self.Q(Y, y) / (gap * gap)

    def Fhat(self, Y, y) -> Scalar:
        """F̂(Y, y) for y != 0 on the principal branch."""
        if not y:
            raise DomainError("Use F0hat for y = 0")
        root = mp.sqrt(to_mpf(self.q(Y, y)))
        return mp.mpf(1) / 2 + ((to_mpf(Y) - to_mpf(y)) * root - to_mpf(self.phi(Y))) / (2 * to_mpf(y))

    def F0hat(self, Y) -> Scalar:
        B = self.B_values(Y, 0)[0]
        psi = self.psi(Y)
        b0 = self.ws.coefficient(0)
        b0 = Fraction(b0) if isinstance(B, Fraction) else to_mpf(b0)
        return 1 - b0 / (B * (1 - psi * psi))

