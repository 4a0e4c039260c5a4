"""Moderate-density parity-check codes: construction, intersection analysis,
bit-flipping decoding, failure-rate bounds and Monte Carlo validation."""

from .core import (
    BinaryWord,
    Construction,
    MdpcCode,
    MdpcType,
    QcMdpcKey,
    SparseBinaryMatrix,
    expand_qc,
)
from .errors import (
    BudgetExhausted,
    EnumerationBudgetExceeded,
    FormatError,
    MdpcError,
    ParameterError,
    RegimeError,
)

__version__ = "0.1.0"

__all__ = [
    "BinaryWord",
    "BudgetExhausted",
    "Construction",
    "EnumerationBudgetExceeded",
    "FormatError",
    "MdpcCode",
    "MdpcError",
    "MdpcType",
    "ParameterError",
    "QcMdpcKey",
    "RegimeError",
    "SparseBinaryMatrix",
    "expand_qc",
]
