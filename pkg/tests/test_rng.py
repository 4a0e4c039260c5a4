from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mdpc.rng import Rng, derive_seed


def test_frozen_stream_values():
    # Frozen on first build; a change here breaks every seed-pinned artifact.
    assert derive_seed(0, 1) == 17029223190271853676
    assert derive_seed(12345) == 11546529591295108226
    assert Rng(42).permutation(10) == [1, 5, 2, 8, 9, 0, 4, 6, 3, 7]
    assert Rng(42).sample(100, 5) == [77, 44, 86, 70, 13]


def test_derive_seed_separates_paths():
    seeds = {derive_seed(1, i) for i in range(1000)}
    assert len(seeds) == 1000
    assert derive_seed(1, 2) != derive_seed(2, 1)


@given(st.integers(0, 2**64 - 1), st.integers(1, 2**40))
def test_below_in_range(seed, bound):
    x = Rng(seed).below(bound)
    assert 0 <= x < bound


@given(st.integers(0, 2**32), st.integers(1, 60))
def test_permutation_is_permutation(seed, n):
    assert sorted(Rng(seed).permutation(n)) == list(range(n))


@given(st.integers(0, 2**32), st.integers(1, 80), st.data())
def test_sample_prefixes_nested(seed, n, data):
    k = data.draw(st.integers(0, n - 1))
    small, big = Rng(seed).sample(n, k), Rng(seed).sample(n, k + 1)
    assert big[:k] == small
    assert len(set(big)) == k + 1


def test_sample_rejects_oversize():
    with pytest.raises(ValueError):
        Rng(0).sample(3, 4)


def test_below_is_uniform():
    rng = Rng(9)
    counts = Counter(rng.below(7) for _ in range(70_000))
    expected = 10_000
    assert all(abs(c - expected) < 5 * np.sqrt(expected) for c in counts.values())
