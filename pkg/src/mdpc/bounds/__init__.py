"""Analytic failure-rate machinery: parity-check bias, binomial tails and scenario bounds."""

from .dfr import (
    DfrBound,
    FlipErrorProbs,
    TheoremExponent,
    ZeroErrorCertificate,
    conditional_check_probs,
    flip_error_probs,
    log_exact_residual_tail,
    scenario_dfr,
    tail_of_S,
    theorem_exponent,
)
from .krawtchouk import (
    Bias,
    RatioCheck,
    bias_float,
    bias_hypergeometric,
    bias_krawtchouk,
    eps,
    exact_bias,
    krawtchouk,
    krawtchouk_ratio_check,
    ratio_closed_form,
)
from .tails import (
    LargeDeviationTail,
    binary_entropy,
    binom_tail_exact,
    binom_tail_ld,
    kl,
    kl_alpha_residual,
    kl_half_closed_form,
    kl_small_approx,
    kl_small_residual,
    log_binom_tail,
)

__all__ = [
    "Bias",
    "DfrBound",
    "FlipErrorProbs",
    "LargeDeviationTail",
    "RatioCheck",
    "TheoremExponent",
    "ZeroErrorCertificate",
    "bias_float",
    "bias_hypergeometric",
    "bias_krawtchouk",
    "binary_entropy",
    "binom_tail_exact",
    "binom_tail_ld",
    "conditional_check_probs",
    "eps",
    "exact_bias",
    "flip_error_probs",
    "kl",
    "kl_alpha_residual",
    "kl_half_closed_form",
    "kl_small_approx",
    "kl_small_residual",
    "krawtchouk",
    "krawtchouk_ratio_check",
    "log_binom_tail",
    "log_exact_residual_tail",
    "ratio_closed_form",
    "scenario_dfr",
    "tail_of_S",
    "theorem_exponent",
]
