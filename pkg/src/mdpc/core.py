"""Binary words, sparse parity-check matrices and MDPC code objects.

Positions are 0-based.  Every type here is immutable once built.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Literal, Sequence

import numpy as np

from .errors import ParameterError


def _check_support(support: Sequence[int], length: int, what: str) -> tuple[int, ...]:
    out = tuple(int(x) for x in support)
    prev = -1
    for x in out:
        if x <= prev:
            raise ParameterError(f"{what}: positions must be strictly increasing, got {list(out)}")
        prev = x
    if out and (out[0] < 0 or out[-1] >= length):
        raise ParameterError(f"{what}: positions must lie in [0, {length})")
    return out


@dataclass(frozen=True)
class BinaryWord:
    """A word of F_2^n stored by its support."""

    length: int
    support: tuple[int, ...] = ()

    def __post_init__(self):
        if self.length < 1:
            raise ParameterError("word length must be positive")
        object.__setattr__(self, "support", _check_support(self.support, self.length, "word"))

    @classmethod
    def from_positions(cls, length: int, positions: Iterable[int]) -> "BinaryWord":
        return cls(length, tuple(sorted(set(int(p) for p in positions))))

    @classmethod
    def from_bits(cls, bits) -> "BinaryWord":
        bits = np.asarray(bits)
        return cls(len(bits), tuple(np.flatnonzero(bits & 1).tolist()))

    @classmethod
    def zeros(cls, length: int) -> "BinaryWord":
        return cls(length)

    def weight(self) -> int:
        return len(self.support)

    def to_bits(self) -> np.ndarray:
        bits = np.zeros(self.length, dtype=np.uint8)
        bits[list(self.support)] = 1
        return bits

    def __xor__(self, other: "BinaryWord") -> "BinaryWord":
        if other.length != self.length:
            raise ParameterError("length mismatch")
        return BinaryWord(self.length, tuple(sorted(set(self.support) ^ set(other.support))))


@dataclass(frozen=True, eq=False)
class SparseBinaryMatrix:
    """An r x n matrix over GF(2), stored by row supports.

    Column supports and CSR index arrays for both orientations are derived
    lazily and cached.
    """

    rows: int
    cols: int
    row_supports: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 1:
            raise ParameterError("matrix must have at least one column")
        if len(self.row_supports) != self.rows:
            raise ParameterError(f"expected {self.rows} row supports, got {len(self.row_supports)}")
        supports = tuple(
            _check_support(s, self.cols, f"row {i}") for i, s in enumerate(self.row_supports)
        )
        object.__setattr__(self, "row_supports", supports)

    @classmethod
    def from_dense(cls, dense) -> "SparseBinaryMatrix":
        dense = np.asarray(dense) & 1
        r, n = dense.shape
        return cls(r, n, tuple(tuple(np.flatnonzero(row).tolist()) for row in dense))

    @classmethod
    def _from_csr(cls, rows: int, cols: int, indptr: np.ndarray, indices: np.ndarray):
        # trusted fast path: indices already sorted within each row
        m = cls.__new__(cls)
        object.__setattr__(m, "rows", rows)
        object.__setattr__(m, "cols", cols)
        flat = indices.tolist()
        bounds = indptr.tolist()
        object.__setattr__(
            m, "row_supports", tuple(tuple(flat[bounds[i] : bounds[i + 1]]) for i in range(rows))
        )
        m.__dict__["indptr"] = indptr.astype(np.int64)
        m.__dict__["indices"] = indices.astype(np.int64)
        return m

    def __eq__(self, other):
        if not isinstance(other, SparseBinaryMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.row_supports) == (
            other.rows,
            other.cols,
            other.row_supports,
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.row_supports))

    def __repr__(self):
        return f"SparseBinaryMatrix({self.rows}x{self.cols}, nnz={self.nnz})"

    @cached_property
    def col_supports(self) -> tuple[tuple[int, ...], ...]:
        cols: list[list[int]] = [[] for _ in range(self.cols)]
        for i, support in enumerate(self.row_supports):
            for j in support:
                cols[j].append(i)
        return tuple(tuple(c) for c in cols)

    @cached_property
    def indptr(self) -> np.ndarray:
        return np.concatenate(([0], np.cumsum([len(s) for s in self.row_supports]))).astype(
            np.int64
        )

    @cached_property
    def indices(self) -> np.ndarray:
        if self.nnz == 0:
            return np.zeros(0, dtype=np.int64)
        return np.fromiter(
            (j for s in self.row_supports for j in s), dtype=np.int64, count=self.nnz
        )

    @cached_property
    def col_indptr(self) -> np.ndarray:
        return np.concatenate(([0], np.cumsum(self.col_weights))).astype(np.int64)

    @cached_property
    def col_indices(self) -> np.ndarray:
        # stable sort by column keeps row indices ascending inside each column
        rows_of_entries = np.repeat(np.arange(self.rows, dtype=np.int64), np.diff(self.indptr))
        order = np.argsort(self.indices, kind="stable")
        return rows_of_entries[order]

    @property
    def nnz(self) -> int:
        return sum(len(s) for s in self.row_supports)

    @cached_property
    def row_weights(self) -> np.ndarray:
        return np.diff(self.indptr)

    @cached_property
    def col_weights(self) -> np.ndarray:
        return np.bincount(self.indices, minlength=self.cols).astype(np.int64)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for i, s in enumerate(self.row_supports):
            dense[i, list(s)] = 1
        return dense

    def entries(self) -> set[tuple[int, int]]:
        return {(i, j) for i, s in enumerate(self.row_supports) for j in s}

    def mdpc_type(self) -> "MdpcType | None":
        """``(v, w)`` if every column has weight v and every row weight w with 0 < v < w."""
        if self.rows == 0:
            return None
        rw, cw = self.row_weights, self.col_weights
        if rw.min() != rw.max() or cw.min() != cw.max():
            return None
        v, w = int(cw[0]), int(rw[0])
        if not 0 < v < w:
            return None
        return MdpcType(v, w)

    def with_row(self, support: Sequence[int]) -> "SparseBinaryMatrix":
        return SparseBinaryMatrix(self.rows + 1, self.cols, self.row_supports + (tuple(support),))


@dataclass(frozen=True)
class MdpcType:
    v: int
    w: int

    def __post_init__(self):
        if not 0 < self.v < self.w:
            raise ParameterError(f"MDPC type needs 0 < v < w, got ({self.v}, {self.w})")


@dataclass(frozen=True)
class QcMdpcKey:
    """First rows of the two circulant blocks of H = (H0 | H1).

    Sampled keys are balanced (``|h0| == |h1| == w/2``); unbalanced keys are
    accepted so hand-written blocks can still be expanded and analysed.
    """

    p: int
    h0: tuple[int, ...]
    h1: tuple[int, ...]

    def __post_init__(self):
        if self.p < 1:
            raise ParameterError("block size must be positive")
        object.__setattr__(self, "h0", _check_support(self.h0, self.p, "h0"))
        object.__setattr__(self, "h1", _check_support(self.h1, self.p, "h1"))
        if not self.h0 or not self.h1:
            raise ParameterError("h0 and h1 must be non-empty")

    @property
    def balanced(self) -> bool:
        """Both blocks have weight w/2, so the expansion is of type (w/2, w)."""
        return len(self.h0) == len(self.h1)

    @property
    def half_weight(self) -> int:
        if not self.balanced:
            raise ParameterError("half weight is undefined for unbalanced keys")
        return len(self.h0)

    @property
    def w(self) -> int:
        return len(self.h0) + len(self.h1)

    @property
    def n(self) -> int:
        return 2 * self.p


ConstructionKind = Literal["gallager", "quasi_cyclic", "imported"]


@dataclass(frozen=True)
class Construction:
    """Provenance of a parity-check matrix."""

    kind: ConstructionKind = "imported"
    seed: int | None = None
    permutations: tuple[tuple[int, ...], ...] | None = None
    key: QcMdpcKey | None = None
    attempts: int | None = None


@dataclass(frozen=True)
class MdpcCode:
    matrix: SparseBinaryMatrix
    mdpc_type: MdpcType | None = None
    max_col_intersection: int | None = None
    guaranteed_radius: int | None = None
    construction: Construction = field(default_factory=Construction)

    def __post_init__(self):
        actual = self.matrix.mdpc_type()
        if self.mdpc_type is None:
            object.__setattr__(self, "mdpc_type", actual)
        elif self.mdpc_type != actual:
            raise ParameterError(f"matrix is not of declared type {self.mdpc_type}")
        if self.guaranteed_radius is not None:
            from .intersect import guaranteed_radius

            if self.max_col_intersection is None:
                raise ParameterError("a guaranteed radius needs the max column intersection")
            expected = guaranteed_radius(self.v_min, self.max_col_intersection)
            if self.guaranteed_radius != expected:
                raise ParameterError(
                    f"radius {self.guaranteed_radius} != floor(v/2s) = {expected}"
                )

    @property
    def n(self) -> int:
        return self.matrix.cols

    @property
    def v_min(self) -> int:
        return int(self.matrix.col_weights.min())


def expand_qc(key: QcMdpcKey) -> SparseBinaryMatrix:
    """Expand a QC key into the p x 2p matrix (H0 | H1) of type (w/2, w)."""
    p = key.p
    shifts = np.arange(p, dtype=np.int64)[:, None]
    b0 = (np.asarray(key.h0, dtype=np.int64)[None, :] + shifts) % p
    b1 = (np.asarray(key.h1, dtype=np.int64)[None, :] + shifts) % p + p
    indices = np.sort(np.concatenate((b0, b1), axis=1), axis=1)
    indptr = np.arange(0, p * key.w + 1, key.w, dtype=np.int64)
    return SparseBinaryMatrix._from_csr(p, 2 * p, indptr, indices.ravel())


def transpose_supports(m: SparseBinaryMatrix) -> SparseBinaryMatrix:
    return SparseBinaryMatrix(m.cols, m.rows, m.col_supports)
