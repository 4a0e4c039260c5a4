"""Column-intersection analysis of parity-check matrices.

The intersection number of two distinct columns is the number of rows where
both hold a 1; the maximum over all pairs (``s``) certifies that one round of
majority-logic decoding corrects every error of weight at most
``floor(v / 2s)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import QcMdpcKey, SparseBinaryMatrix
from .errors import ParameterError


@dataclass(frozen=True)
class IntersectionProfile:
    """Distribution of intersection numbers over all unordered column pairs."""

    n_cols: int
    max_s: int
    histogram: dict[int, int]
    argmax_pair: tuple[int, int]

    @property
    def degenerate(self) -> bool:
        """No two columns share a row."""
        return self.max_s == 0

    def radius(self, v_min: int) -> int:
        return guaranteed_radius(v_min, self.max_s)

    def to_dict(self, v_min: int | None = None) -> dict:
        out = {
            "n_cols": self.n_cols,
            "max_s": self.max_s,
            "histogram": {str(k): c for k, c in sorted(self.histogram.items())},
            "argmax_pair": list(self.argmax_pair),
            "degenerate": self.degenerate,
        }
        if v_min is not None:
            out["v_min"] = v_min
            out["radius"] = self.radius(v_min)
        return out


def intersection_number(m: SparseBinaryMatrix, j: int, j2: int) -> int:
    if j == j2:
        raise ParameterError("intersection number is defined for two different columns")
    for c in (j, j2):
        if not 0 <= c < m.cols:
            raise ParameterError(f"column {c} out of range")
    return len(set(m.col_supports[j]).intersection(m.col_supports[j2]))


def _pair_keys(m: SparseBinaryMatrix) -> np.ndarray:
    """Encode every co-occurring column pair (a < b) of every row as a*n + b."""
    n = m.cols
    weights = m.row_weights
    chunks = []
    for w in np.unique(weights):
        w = int(w)
        if w < 2:
            continue
        sel = np.flatnonzero(weights == w)
        block = m.indices[(m.indptr[sel][:, None] + np.arange(w)[None, :])]
        a, b = np.triu_indices(w, 1)
        chunks.append((block[:, a] * n + block[:, b]).ravel())
    if not chunks:
        return np.zeros(0, dtype=np.int64)
    return np.concatenate(chunks)


def max_column_intersection(m: SparseBinaryMatrix) -> IntersectionProfile:
    """Intersection profile by sparse pair counting.

    Work is proportional to the number of co-occurring pairs, sum over rows of
    C(row_weight, 2), never to n^2.
    """
    n = m.cols
    if n < 2:
        raise ParameterError("need at least two columns")
    total = n * (n - 1) // 2
    keys, counts = np.unique(_pair_keys(m), return_counts=True)
    if counts.size == 0:
        return IntersectionProfile(n, 0, {0: total}, (0, 1))
    hist = np.bincount(counts)
    hist[0] = total - counts.size
    max_s = int(counts.max())
    # keys are sorted, so the first hit is the lexicographically smallest pair
    best = int(keys[np.argmax(counts == max_s)])
    histogram = {k: int(c) for k, c in enumerate(hist) if c}
    return IntersectionProfile(n, max_s, histogram, (best // n, best % n))


def _difference_counts(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Multiplicity of each d in {(y - x) mod p : x in a, y in b}."""
    diffs = (b[None, :] - a[:, None]) % p
    return np.bincount(diffs.ravel(), minlength=p)


def qc_max_intersection(key: QcMdpcKey) -> IntersectionProfile:
    """Intersection profile of ``expand_qc(key)`` from difference multisets.

    Columns c < c' of the same block b intersect in mult_b(c' - c) rows, where
    mult_b counts differences of the block's first-row support.  Column c of
    block 0 and column c' of block 1 intersect in mult_x(c' - c) rows, with
    mult_x counting differences h1 - h0.  Cost is O(w^2 + p).
    """
    p = key.p
    n = 2 * p
    h0 = np.asarray(key.h0, dtype=np.int64)
    h1 = np.asarray(key.h1, dtype=np.int64)
    within = [_difference_counts(h, h, p) for h in (h0, h1)]
    cross = _difference_counts(h0, h1, p)

    size = int(max(within[0][1:].max(initial=0), within[1][1:].max(initial=0), cross.max())) + 1
    hist = np.zeros(size, dtype=np.int64)
    for mult in within:
        # every d in 1..p-1 labels p ordered pairs; each unordered pair is seen twice
        doubled = np.bincount(mult[1:], minlength=size) * p
        hist += doubled // 2
    hist += np.bincount(cross, minlength=size) * p
    max_s = int(np.flatnonzero(hist)[-1])

    if p > 1 and within[0][1:].max() == max_s:
        pair = (0, 1 + int(np.argmax(within[0][1:] == max_s)))
    elif cross.max() == max_s:
        pair = (0, p + int(np.argmax(cross == max_s)))
    else:
        pair = (p, p + 1 + int(np.argmax(within[1][1:] == max_s)))
    histogram = {k: int(c) for k, c in enumerate(hist) if c}
    return IntersectionProfile(n, max_s, histogram, pair)


def guaranteed_radius(v_min: int, s: int) -> int:
    """Worst-case error weight corrected by one majority-logic round: floor(v / 2s).

    ``s == 0`` (no column pair shares a row) is the degenerate case; the
    radius is then reported as floor(v / 2).
    """
    if v_min < 1 or s < 0:
        raise ParameterError("need v_min >= 1 and s >= 0")
    if s == 0:
        return v_min // 2
    return v_min // (2 * s)
