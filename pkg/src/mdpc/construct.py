"""Random MDPC constructions.

* Gallager model: v column-permuted copies of the block matrix I_{n/w} (x) 1_w
  stacked on top of each other, giving an r x n matrix of type (v, w).
* Quasi-cyclic model: two circulant p x p blocks with random first rows of
  weight w/2 each.
* Certified construction: rejection sampling until the maximum column
  intersection is small enough, which certifies a one-round correction radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Construction, MdpcCode, QcMdpcKey, SparseBinaryMatrix, expand_qc
from .errors import BudgetExhausted, ParameterError
from .intersect import guaranteed_radius, max_column_intersection, qc_max_intersection
from .rng import Rng, derive_seed

DEFAULT_EPSILON = 0.5


@dataclass(frozen=True)
class GallagerParams:
    n: int
    w: int
    v: int
    r: int | None = None
    seed: int = 0

    def __post_init__(self):
        n, w, v = self.n, self.w, self.v
        if min(n, w, v) < 1:
            raise ParameterError("n, w, v must be positive")
        if n % w:
            raise ParameterError(f"w={w} must divide n={n}")
        r = n * v // w if self.r is None else self.r
        if r * w != n * v or r % v:
            raise ParameterError(f"need r*w == n*v and v | r (r={r}, n={n}, v={v}, w={w})")
        if not v < w:
            raise ParameterError("need v < w")
        object.__setattr__(self, "r", r)


@dataclass(frozen=True)
class QcParams:
    p: int
    half_weight: int
    seed: int = 0

    def __post_init__(self):
        if self.p < 1 or self.half_weight < 1:
            raise ParameterError("p and half_weight must be positive")
        if self.half_weight > self.p:
            raise ParameterError(f"half_weight={self.half_weight} exceeds p={self.p}")

    @property
    def n(self) -> int:
        return 2 * self.p


@dataclass(frozen=True)
class ConstructionBudget:
    max_attempts: int
    target_s: int

    def __post_init__(self):
        if self.max_attempts < 1:
            raise ParameterError("max_attempts must be >= 1")
        if self.target_s < 0:
            raise ParameterError("target_s must be >= 0")


def default_target_s(n: int, epsilon: float = DEFAULT_EPSILON) -> int:
    """ceil((2 + epsilon) ln n / ln ln n), the typical maximum intersection of a random code."""
    if n < 16:
        raise ParameterError("n too small for ln ln n to be meaningful")
    return math.ceil((2 + epsilon) * math.log(n) / math.log(math.log(n)))


def base_block(n: int, w: int) -> SparseBinaryMatrix:
    """The n/w x n matrix whose row i has ones in positions iw, ..., iw + w - 1."""
    if w < 1 or n % w:
        raise ParameterError(f"w={w} must divide n={n}")
    rows = n // w
    return SparseBinaryMatrix(rows, n, tuple(tuple(range(i * w, (i + 1) * w)) for i in range(rows)))


def gallager_from_permutations(
    n: int, w: int, permutations: list[list[int]] | tuple[tuple[int, ...], ...]
) -> SparseBinaryMatrix:
    """Stack the column-permuted base blocks: block l maps base column c to pi_l(c)."""
    if n % w:
        raise ParameterError(f"w={w} must divide n={n}")
    rows_per_block = n // w
    blocks = []
    for perm in permutations:
        perm = np.asarray(perm, dtype=np.int64)
        if perm.shape != (n,) or not np.array_equal(np.sort(perm), np.arange(n)):
            raise ParameterError("each permutation must be a permutation of range(n)")
        blocks.append(np.sort(perm.reshape(rows_per_block, w), axis=1))
    indices = np.concatenate(blocks).ravel()
    r = rows_per_block * len(blocks)
    indptr = np.arange(0, r * w + 1, w, dtype=np.int64)
    return SparseBinaryMatrix._from_csr(r, n, indptr, indices)


def sample_gallager(params: GallagerParams) -> MdpcCode:
    """Draw H(pi_1, ..., pi_v) from the Gallager distribution; bit-exact per seed."""
    rng = Rng(params.seed)
    perms = tuple(tuple(rng.permutation(params.n)) for _ in range(params.v))
    matrix = gallager_from_permutations(params.n, params.w, perms)
    return MdpcCode(
        matrix, construction=Construction("gallager", seed=params.seed, permutations=perms)
    )


def sample_qc(p: int, half_weight: int, seed: int) -> QcMdpcKey:
    """Uniform random (w/2)-subsets for the first rows of both circulant blocks."""
    QcParams(p, half_weight, seed)
    rng = Rng(seed)
    h0 = tuple(sorted(rng.sample(p, half_weight)))
    h1 = tuple(sorted(rng.sample(p, half_weight)))
    return QcMdpcKey(p, h0, h1)


@dataclass(frozen=True)
class CertifiedResult:
    code: MdpcCode
    s: int
    radius: int
    attempts: int
    seed: int
    attempt_seed: int
    key: QcMdpcKey | None = None

    def certificate(self) -> dict:
        return {
            "s": self.s,
            "radius": self.radius,
            "attempts": self.attempts,
            "seed": self.seed,
            "attempt_seed": self.attempt_seed,
        }


def construct_certified(
    params: GallagerParams | QcParams, budget: ConstructionBudget
) -> CertifiedResult:
    """Resample until the maximum column intersection is at most ``budget.target_s``.

    Attempt k draws from ``derive_seed(params.seed, k)``.  Raises
    :class:`BudgetExhausted` when every attempt exceeds the target.
    """
    best = None
    for attempt in range(budget.max_attempts):
        attempt_seed = derive_seed(params.seed, attempt)
        key = None
        if isinstance(params, GallagerParams):
            sample = sample_gallager(
                GallagerParams(params.n, params.w, params.v, params.r, attempt_seed)
            )
            matrix, construction = sample.matrix, sample.construction
            s = max_column_intersection(matrix).max_s
        else:
            key = sample_qc(params.p, params.half_weight, attempt_seed)
            s = qc_max_intersection(key).max_s
            matrix = None
            construction = Construction("quasi_cyclic", seed=attempt_seed, key=key)
        best = s if best is None else min(best, s)
        if s > budget.target_s:
            continue
        if matrix is None:
            matrix = expand_qc(key)
        attempts = attempt + 1
        construction = Construction(
            construction.kind,
            seed=attempt_seed,
            permutations=construction.permutations,
            key=key,
            attempts=attempts,
        )
        v_min = int(matrix.col_weights.min())
        radius = guaranteed_radius(v_min, s)
        code = MdpcCode(
            matrix, max_col_intersection=s, guaranteed_radius=radius, construction=construction
        )
        return CertifiedResult(code, s, radius, attempts, params.seed, attempt_seed, key)
    raise BudgetExhausted(budget.max_attempts, budget.target_s, best)
