"""First-round error model, residual-error tails and the scenario failure bounds.

Under the independence model the counter of a bit is Bin(v, p_b), where p_b
is the probability that one of its checks is unsatisfied given the bit's own
error value b.  A correct bit ends round one in error with probability
q0 = P(Bin(v, p0) > v/2); an erroneous bit survives with
q1 = P(Bin(v, p1) <= v/2).  The residual error count is S = S0 + S1 with
S0 ~ Bin(n - t, q0) and S1 ~ Bin(t, q1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.special import logsumexp

from ..errors import ParameterError, RegimeError
from ..intersect import guaranteed_radius
from .krawtchouk import eps as eps_fn
from .krawtchouk import exact_bias
from .tails import _log_pmf, log_binom_tail

LN2 = math.log(2)
PMode = Literal["exact", "eps"]
QMode = Literal["exact_tail", "asymptotic_bound"]
Scenario = Literal["I", "II", "III", "IV"]
SCENARIO_ALPHA = {"III": 0.5, "IV": 0.75}
DEFAULT_TARGET_BITS = 80


def _log1mexp(x: float) -> float:
    """ln(1 - e^x) for x <= 0."""
    if x == 0:
        return -math.inf
    if x == -math.inf:
        return 0.0
    return math.log(-math.expm1(x)) if x > -LN2 else math.log1p(-math.exp(x))


def _log2(x: float) -> float:
    return x / LN2


@dataclass(frozen=True)
class FlipErrorProbs:
    p0: float
    p1: float
    log_q0: float
    log_q1: float
    v: int
    p_mode: str
    q_mode: str

    @property
    def q0(self) -> float:
        return math.exp(self.log_q0)

    @property
    def q1(self) -> float:
        return math.exp(self.log_q1)

    @property
    def log_1mq0(self) -> float:
        return _log1mexp(self.log_q0)

    @property
    def log_1mq1(self) -> float:
        return _log1mexp(self.log_q1)


def conditional_check_probs(n: int, w: int, t: int, p_mode: PMode = "exact") -> tuple[float, float]:
    """(p0, p1): probability a weight-w check through a bit is unsatisfied, given the bit's error value.

    Exact mode conditions on the bit: the other w - 1 check positions meet the
    other t - b error positions among n - 1, so p0 = (1 - delta(n-1, w-1, t)) / 2
    and p1 = (1 + delta(n-1, w-1, t-1)) / 2.  Eps mode uses (1 -/+ eps) / 2.
    """
    if not (1 <= w <= n and 0 <= t <= n):
        raise ParameterError(f"invalid (n, w, t) = ({n}, {w}, {t})")
    if p_mode == "eps":
        e = eps_fn(n, w, t)
        return (1 - e) / 2, (1 + e) / 2
    if p_mode != "exact":
        raise ParameterError(f"unknown p_mode {p_mode!r}")
    # with t = n there are no correct bits and p0 is never used
    p0 = 0.0 if t == n else (1 - float(exact_bias(n - 1, w - 1, t).delta)) / 2
    if t == 0:
        return p0, 1.0  # no erroneous bits; p1 is never used
    d1 = float(exact_bias(n - 1, w - 1, t - 1).delta)
    return p0, (1 + d1) / 2


def _tail_logs(v: int, p: float):
    log_p = math.log(p) if p > 0 else -math.inf
    log_1mp = math.log1p(-p) if p < 1 else -math.inf
    return log_p, log_1mp


def flip_error_probs(
    n: int, w: int, v: int, t: int, p_mode: PMode = "exact", q_mode: QMode = "exact_tail"
) -> FlipErrorProbs:
    """p_b and q_b for an MDPC code of type (v, w), length n, with t errors.

    ``asymptotic_bound`` replaces the exact binomial tails by the surrogate
    (1 - eps^2)^(v/2) / (sqrt(v) eps) (unit constant) and always uses eps-mode p.
    """
    if v < 1:
        raise ParameterError("v must be >= 1")
    if q_mode == "asymptotic_bound":
        e = eps_fn(n, w, t)
        if e == 0.0:
            raise RegimeError("eps = exp(-2wt/n) underflows to 0")
        p0, p1 = (1 - e) / 2, (1 + e) / 2
        if e == 1.0:
            log_q = -math.inf
        else:
            log_q = 0.5 * v * math.log1p(-e * e) - 0.5 * math.log(v) - math.log(e)
        log_q = min(log_q, 0.0)
        return FlipErrorProbs(p0, p1, log_q, log_q, v, "eps", q_mode)
    if q_mode != "exact_tail":
        raise ParameterError(f"unknown q_mode {q_mode!r}")
    p0, p1 = conditional_check_probs(n, w, t, p_mode)
    half = v // 2
    # correct bit flips iff U > v/2  <=>  U >= floor(v/2) + 1
    log_q0 = log_binom_tail(v, *_tail_logs(v, p0), half + 1, "upper")
    # erroneous bit stays iff U <= v/2  <=>  U <= floor(v/2)
    log_q1 = -math.inf if t == 0 else log_binom_tail(v, *_tail_logs(v, p1), half, "lower")
    return FlipErrorProbs(p0, p1, log_q0, log_q1, v, p_mode, q_mode)


@dataclass(frozen=True)
class DfrBound:
    """log2 of P(S0 >= ceil(t'/2)) + P(S1 >= ceil(t'/2)), an upper bound on P(S >= t')."""

    log2_bound: float
    t_prime: int
    factor_breakdown: dict[str, float]
    assumptions_used: tuple[str, ...]
    inputs: dict = field(default_factory=dict)
    variants: dict[str, float] = field(default_factory=dict)
    flags: tuple[str, ...] = ()
    target_bits: int | None = None

    @property
    def meets_target(self) -> bool | None:
        if self.target_bits is None:
            return None
        return self.log2_bound <= -self.target_bits

    def recombined_log2(self) -> float:
        a = self.factor_breakdown["log2_S0_tail"] * LN2
        b = self.factor_breakdown["log2_S1_tail"] * LN2
        return _log2(float(np.logaddexp(a, b)))

    def to_dict(self) -> dict:
        return {
            "schema": "mdpc.dfr-bound/1",
            "kind": "bound",
            "log2_bound": self.log2_bound,
            "t_prime": self.t_prime,
            "factor_breakdown": self.factor_breakdown,
            "assumptions_used": list(self.assumptions_used),
            "inputs": self.inputs,
            "variants": self.variants,
            "flags": list(self.flags),
            "target_bits": self.target_bits,
            "meets_target": self.meets_target,
        }


def log_residual_pmf_terms(n: int, t: int, probs: FlipErrorProbs):
    """ln P(S0 = k) for k = 0..n-t and ln P(S1 = j) for j = 0..t."""
    k0 = np.arange(n - t + 1, dtype=np.float64)
    k1 = np.arange(t + 1, dtype=np.float64)
    return (
        _log_pmf(n - t, k0, probs.log_q0, probs.log_1mq0),
        _log_pmf(t, k1, probs.log_q1, probs.log_1mq1),
    )


def log_exact_residual_tail(n: int, t: int, t_prime: int, probs: FlipErrorProbs) -> float:
    """ln P(S0 + S1 >= t') for independent S0 ~ Bin(n-t, q0), S1 ~ Bin(t, q1)."""
    if t_prime <= 0:
        return 0.0
    lp0, lp1 = log_residual_pmf_terms(n, t, probs)
    # reverse cumulative log-sums give ln P(S0 >= k)
    log_sf0 = np.logaddexp.accumulate(lp0[::-1])[::-1]
    terms = []
    for j in range(t + 1):
        need = t_prime - j
        tail0 = 0.0 if need <= 0 else (log_sf0[need] if need <= n - t else -math.inf)
        terms.append(lp1[j] + tail0)
    return float(logsumexp(terms))


def tail_of_S(n: int, t: int, t_prime: int, probs: FlipErrorProbs) -> DfrBound:
    """Union bound P(S >= t') <= P(S0 >= ceil(t'/2)) + P(S1 >= ceil(t'/2))."""
    if t_prime < 1:
        raise ParameterError("t' must be >= 1")
    if not 0 <= t <= n:
        raise ParameterError("need 0 <= t <= n")
    k = math.ceil(t_prime / 2)
    a = log_binom_tail(n - t, probs.log_q0, probs.log_1mq0, k, "upper")
    b = log_binom_tail(t, probs.log_q1, probs.log_1mq1, k, "upper")
    total = float(np.logaddexp(a, b))
    return DfrBound(
        log2_bound=_log2(total),
        t_prime=t_prime,
        factor_breakdown={
            "log2_S0_tail": _log2(a),
            "log2_S1_tail": _log2(b),
            "half_threshold": k,
            "log2_exact_S_tail": _log2(log_exact_residual_tail(n, t, t_prime, probs)),
        },
        assumptions_used=("A1",),
        inputs={"n": n, "t": t, "v": probs.v, "p_mode": probs.p_mode, "q_mode": probs.q_mode,
                "p0": probs.p0, "p1": probs.p1,
                "log2_q0": _log2(probs.log_q0), "log2_q1": _log2(probs.log_q1)},
    )


@dataclass(frozen=True)
class TheoremExponent:
    """Dominant terms of the two-iteration bound, in nats.

    ``dominant`` = (t'v/4) ln(1 - eps^2) + (t'/8) ln n; ``prefactor`` = -1/2 ln t';
    ``remainder_magnitude`` = |t' ln(t'/t)| is the size scale of the unresolved
    O(t' ln(t'/t)) term and is never added in.
    """

    dominant: float
    prefactor: float
    remainder_magnitude: float
    eps: float

    @property
    def total(self) -> float:
        return self.dominant + self.prefactor

    @property
    def dominant_bits(self) -> float:
        return _log2(self.dominant)

    @property
    def total_bits(self) -> float:
        return _log2(self.total)

    def to_dict(self) -> dict:
        return {
            "dominant_nats": self.dominant,
            "prefactor_nats": self.prefactor,
            "total_nats": self.total,
            "dominant_bits": self.dominant_bits,
            "total_bits": self.total_bits,
            "remainder_magnitude_nats": self.remainder_magnitude,
            "eps": self.eps,
        }


def theorem_exponent(n: int, v: int, w: int, t: int, t_prime: int) -> TheoremExponent:
    e = eps_fn(n, w, t)
    if t_prime == 0:
        return TheoremExponent(0.0, 0.0, 0.0, e)
    if t_prime < 0:
        raise ParameterError("t' must be >= 0")
    log_1me2 = math.log1p(-e * e) if e < 1 else -math.inf
    dominant = (t_prime * v / 4) * log_1me2 + (t_prime / 8) * math.log(n)
    remainder = abs(t_prime * math.log(t_prime / t)) if t > 0 else math.inf
    return TheoremExponent(dominant, -0.5 * math.log(t_prime), remainder, e)


@dataclass(frozen=True)
class ZeroErrorCertificate:
    """One majority-logic round corrects every error of weight t when floor(v/2s) >= t."""

    scenario: str
    v: int
    s: int | None
    t: int
    radius: int | None
    holds: bool
    reason: str

    def to_dict(self) -> dict:
        return {
            "schema": "mdpc.dfr-bound/1",
            "kind": "certificate",
            "scenario": self.scenario,
            "v": self.v,
            "s": self.s,
            "t": self.t,
            "radius": self.radius,
            "holds": self.holds,
            "log2_bound": -math.inf if self.holds else None,
            "reason": self.reason,
        }


def scenario_dfr(
    n: int,
    w: int,
    t: int,
    scenario: Scenario,
    s: int | None = None,
    alpha: float | None = None,
    v: int | None = None,
    p_mode: PMode = "exact",
    target_bits: int = DEFAULT_TARGET_BITS,
) -> DfrBound | ZeroErrorCertificate:
    """Failure bound for one of the four parameter-selection scenarios.

    I: zero-error certificate iff floor(v/2s) >= t.
    II: two rounds; fails only if more than floor(v/2s) errors survive round one,
        so t' = floor(v/2s) + 1.
    III / IV: unbounded rounds under the residual-contraction assumption,
        t' = ceil(alpha t) with alpha = 0.5 / 0.75 by default.

    ``v`` defaults to w/2 (the two-block QC structure).  The bound itself is
    the exact-tail chain (union split at t'/2); the unsplit P(S >= t'),
    theorem dominant terms and the other p-mode are recorded in ``variants``.
    """
    if scenario not in ("I", "II", "III", "IV"):
        raise ParameterError(f"unknown scenario {scenario!r}")
    if not (1 <= w <= n and 0 <= t <= n):
        raise ParameterError(f"invalid (n, w, t) = ({n}, {w}, {t})")
    if v is None:
        if w % 2:
            raise ParameterError("v defaults to w/2, which needs w even")
        v = w // 2
    if scenario in ("I", "II"):
        if s is None:
            raise ParameterError(f"scenario {scenario} needs the max column intersection s")
        radius = guaranteed_radius(v, s)
        if scenario == "I" or radius >= t:
            holds = radius >= t
            why = f"floor({v}/(2*{s})) = {radius} {'>=' if holds else '<'} t = {t}"
            return ZeroErrorCertificate(scenario, v, s, t, radius, holds, why)
        t_prime = radius + 1
        assumptions: tuple[str, ...] = ("A1",)
    else:
        if alpha is None:
            alpha = SCENARIO_ALPHA[scenario]
        if not 0 < alpha <= 1:
            raise ParameterError("alpha must lie in (0, 1]")
        if t == 0:
            return ZeroErrorCertificate(scenario, v, s, t, None, True, "no errors")
        t_prime = math.ceil(alpha * t - 1e-12)
        assumptions = ("A1", f"A2(alpha={alpha})")

    bound = tail_of_S(n, t, t_prime, flip_error_probs(n, w, v, t, p_mode))
    other_mode = "eps" if p_mode == "exact" else "exact"
    other = tail_of_S(n, t, t_prime, flip_error_probs(n, w, v, t, other_mode))
    thm = theorem_exponent(n, v, w, t, t_prime)
    variants = {
        f"exact_tail[p={p_mode}]": bound.log2_bound,
        f"exact_tail[p={other_mode}]": other.log2_bound,
        f"unsplit_S_tail[p={p_mode}]": bound.factor_breakdown["log2_exact_S_tail"],
        f"unsplit_S_tail[p={other_mode}]": other.factor_breakdown["log2_exact_S_tail"],
        "theorem_dominant": thm.dominant_bits,
        "theorem_with_prefactor": thm.total_bits,
    }
    flags = []
    if not any(x <= -target_bits for x in variants.values()):
        flags.append(f"no_variant_reaches_2^-{target_bits}")
    elif bound.log2_bound > -target_bits:
        flags.append(f"exact_tail_above_2^-{target_bits}")
    inputs = dict(bound.inputs, w=w, scenario=scenario, s=s, alpha=alpha, target_bits=target_bits)
    inputs["theorem"] = thm.to_dict()
    return DfrBound(
        log2_bound=bound.log2_bound,
        t_prime=t_prime,
        factor_breakdown=bound.factor_breakdown,
        assumptions_used=assumptions,
        inputs=inputs,
        variants=variants,
        flags=tuple(flags),
        target_bits=target_bits,
    )
