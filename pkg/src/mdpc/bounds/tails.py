"""Kullback-Leibler divergence and binomial tails, all in natural-log domain."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.special import gammaln, logsumexp

from ..errors import ParameterError, RegimeError

Side = Literal["upper", "lower"]


def kl(p: float, q: float) -> float:
    """D(B(p) || B(q)) in nats, with 0 ln(0/q) = 0 and p ln(p/0) = +inf."""
    if not (0 <= p <= 1 and 0 <= q <= 1):
        raise ParameterError("p and q must lie in [0, 1]")

    def term(a, b):
        if a == 0:
            return 0.0
        if b == 0:
            return math.inf
        return a * math.log(a / b)

    return term(p, q) + term(1 - p, 1 - q)


def binary_entropy(a: float) -> float:
    """h(a) = -a ln a - (1 - a) ln(1 - a), in nats."""
    return -sum(x * math.log(x) for x in (a, 1 - a) if x > 0)


def kl_half_closed_form(delta: float) -> float:
    """-1/2 ln(1 - 4 delta^2), equal to D(1/2 || 1/2 + delta) for |delta| < 1/2."""
    if not -0.5 < delta < 0.5:
        raise RegimeError("need |delta| < 1/2")
    return -0.5 * math.log1p(-4 * delta * delta)


def kl_alpha_residual(alpha: float, delta: float) -> float:
    """|D(alpha || delta) - (-h(alpha) - alpha ln delta)|, which is O(delta) as delta -> 0+."""
    if not 0 < alpha < 1:
        raise RegimeError("need 0 < alpha < 1")
    if not 0 < delta < 1:
        raise RegimeError("need 0 < delta < 1 (delta -> 0 from above)")
    return abs(kl(alpha, delta) - (-binary_entropy(alpha) - alpha * math.log(delta)))


def kl_small_approx(x: float, y: float) -> float:
    """x ln(x/y) - x + y, the expansion of D(x || y) for 0 < y < x -> 0.

    The second-order term comes from (1 - x) ln((1 - x)/(1 - y)) = -x + y + O(x^2);
    the variant with ``+ x - y`` is off by 2(x - y), which is first order.
    """
    return x * math.log(x / y) - x + y


def kl_small_residual(x: float, y: float) -> float:
    """|D(x || y) - (x ln(x/y) - x + y)|, which is O(x^2) for 0 < y < x -> 0."""
    if not 0 < y < x < 1:
        raise RegimeError("need 0 < y < x < 1")
    return abs(kl(x, y) - kl_small_approx(x, y))


def _log_pmf(v: int, ks: np.ndarray, log_p: float, log_1mp: float) -> np.ndarray:
    log_choose = gammaln(v + 1) - gammaln(ks + 1) - gammaln(v - ks + 1)
    with np.errstate(invalid="ignore"):
        a = np.where(ks > 0, ks * log_p, 0.0)
        b = np.where(ks < v, (v - ks) * log_1mp, 0.0)
    return log_choose + a + b


def log_binom_tail(
    v: int, log_p: float, log_1mp: float, threshold: int, side: Side = "upper"
) -> float:
    """ln P(Bin(v, p) >= threshold) or ln P(Bin(v, p) <= threshold), given ln p and ln(1 - p).

    Taking both logs lets callers pass success probabilities far below the
    smallest double (e.g. 2^-2000) without underflow.
    """
    if v < 0:
        raise ParameterError("v must be >= 0")
    if side == "upper":
        lo, hi = max(threshold, 0), v
    elif side == "lower":
        lo, hi = 0, min(threshold, v)
    else:
        raise ParameterError(f"unknown side {side!r}")
    if lo > hi:
        return -math.inf
    ks = np.arange(lo, hi + 1, dtype=np.float64)
    terms = _log_pmf(v, ks, log_p, log_1mp)
    return float(logsumexp(terms))


def binom_tail_exact(v: int, p: float, threshold: int, side: Side = "upper") -> float:
    """ln of the binomial tail by log-gamma summation (``-inf`` for an empty event)."""
    if not 0 <= p <= 1:
        raise ParameterError("p must lie in [0, 1]")
    log_p = math.log(p) if p > 0 else -math.inf
    log_1mp = math.log1p(-p) if p < 1 else -math.inf
    return log_binom_tail(v, log_p, log_1mp, threshold, side)


@dataclass(frozen=True)
class LargeDeviationTail:
    """Asymptotic tail prefactor * exp(exponent), with exponent = -v D(tau || p)."""

    prefactor: float
    exponent: float

    @property
    def log_prob(self) -> float:
        return math.log(self.prefactor) + self.exponent


def binom_tail_ld(v: int, p: float, tau: float, side: Side = "upper") -> LargeDeviationTail:
    """Large-deviation estimate of P(Bin(v, p) >= tau v) (upper, p < tau < 1)
    or P(Bin(v, p) <= tau v) (lower, 0 < tau < p), without the (1 + o(1)) factor."""
    if v < 1:
        raise ParameterError("v must be >= 1")
    if side == "upper":
        if not 0 < p < tau < 1:
            raise RegimeError(f"upper tail needs p < tau < 1 (p={p}, tau={tau})")
        pre = (1 - p) * math.sqrt(tau) / ((tau - p) * math.sqrt(2 * math.pi * v * (1 - tau)))
    elif side == "lower":
        if not 0 < tau < p < 1:
            raise RegimeError(f"lower tail needs 0 < tau < p (p={p}, tau={tau})")
        pre = p * math.sqrt(1 - tau) / ((p - tau) * math.sqrt(2 * math.pi * v * tau))
    else:
        raise ParameterError(f"unknown side {side!r}")
    return LargeDeviationTail(pre, -v * kl(tau, p))
