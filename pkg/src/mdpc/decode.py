"""Parallel bit-flipping decoder and exhaustive verification of the one-round radius.

Every round computes all counters from the same snapshot of the word, then
flips every position whose unsatisfied-check count is a strict majority
(``2 * u_i > n_i``) at once.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import BinaryWord, MdpcCode, SparseBinaryMatrix
from .errors import EnumerationBudgetExceeded, ParameterError

DEFAULT_ENUMERATION_BUDGET = 2_000_000


@dataclass(frozen=True)
class Counters:
    n_i: np.ndarray
    u_i: np.ndarray


@dataclass(frozen=True)
class DecodeReport:
    output: BinaryWord
    iterations_run: int
    syndrome_weight_trace: list[int]
    flips_trace: list[int]
    success: bool

    def to_dict(self) -> dict:
        from .io import word_to_dict

        return {
            "schema": "mdpc.decode-report/1",
            "output": word_to_dict(self.output),
            "iterations_run": self.iterations_run,
            "syndrome_weight_trace": self.syndrome_weight_trace,
            "flips_trace": self.flips_trace,
            "success": self.success,
        }


def _gather(indptr: np.ndarray, indices: np.ndarray, sel: np.ndarray) -> np.ndarray:
    """Concatenate ``indices[indptr[k]:indptr[k+1]]`` for every k in ``sel``."""
    if sel.size == 0:
        return np.zeros(0, dtype=np.int64)
    starts = indptr[sel]
    lens = indptr[sel + 1] - starts
    total = int(lens.sum())
    shift = np.repeat(starts - np.concatenate(([0], np.cumsum(lens)[:-1])), lens)
    return indices[shift + np.arange(total)]


def _syndrome_bits(m: SparseBinaryMatrix, bits: np.ndarray) -> np.ndarray:
    rows = _gather(m.col_indptr, m.col_indices, np.flatnonzero(bits))
    return (np.bincount(rows, minlength=m.rows) & 1).astype(np.uint8)


def _counters(m: SparseBinaryMatrix, syn: np.ndarray) -> np.ndarray:
    # only unsatisfied rows contribute, so cost scales with syndrome weight
    cols = _gather(m.indptr, m.indices, np.flatnonzero(syn))
    return np.bincount(cols, minlength=m.cols)


def _check_length(m: SparseBinaryMatrix, y: BinaryWord) -> None:
    if y.length != m.cols:
        raise ParameterError(f"word length {y.length} != matrix columns {m.cols}")


def syndrome(m: SparseBinaryMatrix, y: BinaryWord) -> BinaryWord:
    """H y^T over GF(2), as a word of length r."""
    _check_length(m, y)
    return BinaryWord.from_bits(_syndrome_bits(m, y.to_bits()))


def bf_iteration(m: SparseBinaryMatrix, y: BinaryWord) -> tuple[BinaryWord, Counters]:
    """One parallel bit-flipping round; ties (2u == n) do not flip."""
    _check_length(m, y)
    bits = y.to_bits()
    u = _counters(m, _syndrome_bits(m, bits))
    flips = 2 * u > m.col_weights
    bits ^= flips.astype(np.uint8)
    return BinaryWord.from_bits(bits), Counters(m.col_weights.copy(), u)


def decode_bits(m: SparseBinaryMatrix, bits: np.ndarray, max_iterations: int):
    """Array-level decoder loop.

    Returns ``(bits, syndrome_trace, flips_trace, after_first)`` where
    ``after_first`` is the word after round one (the input itself if the
    syndrome was already zero).
    """
    if max_iterations < 1:
        raise ParameterError("max_iterations must be >= 1")
    bits = np.array(bits, dtype=np.uint8)
    n_i = m.col_weights
    syn = _syndrome_bits(m, bits)
    syn_trace = [int(syn.sum())]
    flips_trace: list[int] = []
    after_first = bits
    for a in range(max_iterations):
        if syn_trace[-1] == 0:
            break
        flipped = np.flatnonzero(2 * _counters(m, syn) > n_i)
        bits[flipped] ^= 1
        syn ^= (np.bincount(_gather(m.col_indptr, m.col_indices, flipped), minlength=m.rows) & 1).astype(
            np.uint8
        )
        syn_trace.append(int(syn.sum()))
        flips_trace.append(int(flipped.size))
        if a == 0:
            after_first = bits.copy()
    return bits, syn_trace, flips_trace, after_first


def decode(m: SparseBinaryMatrix, y: BinaryWord, max_iterations: int) -> DecodeReport:
    """Run up to ``max_iterations`` rounds, stopping early once the syndrome is zero."""
    _check_length(m, y)
    bits, syn_trace, flips_trace, _ = decode_bits(m, y.to_bits(), max_iterations)
    return DecodeReport(
        BinaryWord.from_bits(bits),
        len(flips_trace),
        syn_trace,
        flips_trace,
        syn_trace[-1] == 0,
    )


@dataclass(frozen=True)
class RadiusVerdict:
    proved: bool
    t: int
    patterns_checked: int
    counterexample: BinaryWord | None = None


def verify_radius_exhaustive(
    code: MdpcCode | SparseBinaryMatrix, t: int, budget: int = DEFAULT_ENUMERATION_BUDGET
) -> RadiusVerdict:
    """Check that one round corrects every error of weight <= t on the zero codeword."""
    m = code.matrix if isinstance(code, MdpcCode) else code
    n = m.cols
    if t < 0:
        raise ParameterError("t must be >= 0")
    total = sum(math.comb(n, k) for k in range(min(t, n) + 1))
    if total > budget:
        raise EnumerationBudgetExceeded(
            f"{total} patterns of weight <= {t} at n={n} exceed budget {budget}"
        )
    checked = 0
    bits = np.zeros(n, dtype=np.uint8)
    for k in range(min(t, n) + 1):
        for support in itertools.combinations(range(n), k):
            bits[:] = 0
            bits[list(support)] = 1
            out, *_ = decode_bits(m, bits, 1)
            checked += 1
            if out.any():
                return RadiusVerdict(False, t, checked, BinaryWord(n, support))
    return RadiusVerdict(True, t, checked)
