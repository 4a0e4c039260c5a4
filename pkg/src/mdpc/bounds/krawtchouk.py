"""Krawtchouk polynomials and the bias of a weight-w parity check against a weight-t error."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ..errors import ParameterError, RegimeError

# above this length the bias is evaluated in floating point (log-gamma terms)
EXACT_BIAS_MAX_N = 10_000


def _kernel(n: int, k: int, x: int) -> int:
    """sum_j (-1)^j C(x, j) C(n - x, k - j), the integer core of P_k^n(x)."""
    return sum(
        (-1) ** j * math.comb(x, j) * math.comb(n - x, k - j)
        for j in range(max(0, k - (n - x)), min(k, x) + 1)
    )


def krawtchouk(n: int, k: int, x: int) -> Fraction:
    """P_k^n(x) = ((-1)^k / 2^k) sum_j (-1)^j C(x, j) C(n - x, k - j), exactly."""
    if not 0 <= k <= n:
        raise ParameterError(f"degree k={k} outside [0, {n}]")
    if not 0 <= x <= n:
        raise ParameterError(f"point x={x} outside [0, {n}]")
    return Fraction((-1) ** k * _kernel(n, k, x), 2**k)


@dataclass(frozen=True)
class Bias:
    """delta = 1 - 2 P(<h, e> = 1) for |h| = w and e uniform of weight t in F_2^n."""

    n: int
    w: int
    t: int
    delta: Fraction | float
    eps_approx: float
    exact: bool

    @property
    def p_odd(self) -> Fraction | float:
        """P(<h, e> = 1) = (1 - delta) / 2."""
        return (1 - self.delta) / 2

    @property
    def relative_error(self) -> float:
        """|delta - eps| / eps."""
        return abs(float(self.delta) - self.eps_approx) / self.eps_approx


def _check_nwt(n: int, w: int, t: int) -> None:
    if n < 1 or not 0 <= w <= n or not 0 <= t <= n:
        raise ParameterError(f"need 0 <= w, t <= n (n={n}, w={w}, t={t})")


def bias_krawtchouk(n: int, w: int, t: int) -> Fraction:
    """delta = (-2)^w P_w^n(t) / C(n, w)."""
    _check_nwt(n, w, t)
    return Fraction((-2) ** w) * krawtchouk(n, w, t) / math.comb(n, w)


def bias_hypergeometric(n: int, w: int, t: int) -> Fraction:
    """delta = 1 - 2 sum_{j odd} C(t, j) C(n - t, w - j) / C(n, w)."""
    _check_nwt(n, w, t)
    odd = sum(math.comb(t, j) * math.comb(n - t, w - j) for j in range(1, min(t, w) + 1, 2))
    return 1 - Fraction(2 * odd, math.comb(n, w))


def bias_float(n: int, w: int, t: int) -> float:
    """Alternating hypergeometric sum in floating point with compensated summation."""
    _check_nwt(n, w, t)
    lg = math.lgamma
    log_total = lg(n + 1) - lg(w + 1) - lg(n - w + 1)
    terms = []
    for j in range(max(0, w - (n - t)), min(t, w) + 1):
        log_term = (
            lg(t + 1) - lg(j + 1) - lg(t - j + 1)
            + lg(n - t + 1) - lg(w - j + 1) - lg(n - t - w + j + 1)
            - log_total
        )
        terms.append((-1) ** j * math.exp(log_term))
    return math.fsum(terms)


def eps(n: int, w: int, t: int) -> float:
    """exp(-2wt/n), the first-order approximation of the bias."""
    if n <= 0:
        raise ParameterError("n must be positive")
    return math.exp(-2.0 * w * t / n)


def exact_bias(n: int, w: int, t: int, exact: bool | None = None) -> Bias:
    """Bias of a weight-w check against a uniform weight-t error.

    With ``exact`` (the default up to n = 10^4) the Krawtchouk and odd-j
    hypergeometric routes are both evaluated as rationals and must agree.
    """
    _check_nwt(n, w, t)
    if exact is None:
        exact = n <= EXACT_BIAS_MAX_N
    if exact:
        delta = bias_krawtchouk(n, w, t)
        other = bias_hypergeometric(n, w, t)
        if delta != other:
            raise ArithmeticError(f"bias routes disagree at n={n}, w={w}, t={t}")
    else:
        delta = bias_float(n, w, t)
    return Bias(n, w, t, delta, eps(n, w, t), exact)


@dataclass(frozen=True)
class RatioCheck:
    n: int
    w: int
    closed_form: float
    residuals: list[float]

    @property
    def max_residual(self) -> float:
        return max(self.residuals)


def ratio_closed_form(n: int, w: int) -> float:
    """(n - 2w + sqrt((n - 2w)^2 - 4w(n - w))) / (2(n - w))."""
    disc = (n - 2 * w) ** 2 - 4 * w * (n - w)
    if disc < 0 or n <= w:
        raise RegimeError(f"closed form undefined at n={n}, w={w}")
    return (n - 2 * w + math.sqrt(disc)) / (2 * (n - w))


def krawtchouk_ratio_check(n: int, w: int, x_max: int, alpha: float = 0.0) -> RatioCheck:
    """Relative gap between P_w(x)/P_w(x-1) and its closed-form limit for x = 1..x_max.

    ``x_max`` must lie in [1, (1 - alpha)(n/2 - sqrt(w(n - w)))].
    """
    limit = (1 - alpha) * (n / 2 - math.sqrt(w * (n - w)))
    if x_max < 1 or x_max > limit:
        raise RegimeError(f"x_max={x_max} outside [1, {limit:.3f}]")
    cf = ratio_closed_form(n, w)
    values = [_kernel(n, w, x) for x in range(x_max + 1)]
    residuals = [
        abs(float(Fraction(values[x], values[x - 1])) - cf) / cf for x in range(1, x_max + 1)
    ]
    return RatioCheck(n, w, cf, residuals)
