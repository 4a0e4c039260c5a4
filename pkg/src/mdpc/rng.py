"""Seeded randomness shared by every sampler in the package.

All draws come from numpy's PCG64 bit generator, whose raw 64-bit output
stream is frozen across numpy releases.  Bounded integers use Lemire's
multiply-and-reject method and shuffles use Fisher-Yates, both implemented
here so the mapping ``seed -> matrix`` does not depend on the (unstable)
``numpy.random.Generator`` method implementations.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_BLOCK = 1024


def derive_seed(seed: int, *path: int) -> int:
    """Deterministically derive a child 64-bit seed from ``seed`` and an index path."""
    words = np.random.SeedSequence([int(seed) & _MASK64, *[int(p) for p in path]]).generate_state(
        2, np.uint32
    )
    return (int(words[0]) << 32) | int(words[1])


class Rng:
    """PCG64 stream with unbiased bounded draws.

    >>> Rng(7).below(10) == Rng(7).below(10)
    True
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK64
        self._bitgen = np.random.PCG64(self.seed)
        self._buf: list[int] = []

    def raw(self) -> int:
        if not self._buf:
            # reversed so pop() yields the stream in order
            self._buf = self._bitgen.random_raw(_BLOCK).tolist()[::-1]
        return self._buf.pop()

    def below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)``."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        m = self.raw() * bound
        low = m & _MASK64
        if low < bound:
            threshold = (-bound) % bound
            while low < threshold:
                m = self.raw() * bound
                low = m & _MASK64
        return m >> 64

    def permutation(self, n: int) -> list[int]:
        """Uniform permutation of ``range(n)`` by Fisher-Yates (Durstenfeld)."""
        a = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.below(i + 1)
            a[i], a[j] = a[j], a[i]
        return a

    def sample(self, n: int, k: int) -> list[int]:
        """First ``k`` entries of a forward Fisher-Yates shuffle of ``range(n)``.

        Prefixes are nested: with the same seed, ``sample(n, k)`` is a prefix
        of ``sample(n, k + 1)``.  Only touched positions are stored, so this is
        cheap for ``k << n``.
        """
        if not 0 <= k <= n:
            raise ValueError(f"cannot draw {k} items from {n}")
        swapped: dict[int, int] = {}
        out = []
        for i in range(k):
            j = i + self.below(n - i)
            out.append(swapped.get(j, j))
            swapped[j] = swapped.get(i, i)
        return out
