import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import dense_intersections
from mdpc.construct import GallagerParams, base_block, sample_gallager, sample_qc
from mdpc.core import QcMdpcKey, SparseBinaryMatrix, expand_qc
from mdpc.errors import ParameterError
from mdpc.intersect import (
    guaranteed_radius,
    intersection_number,
    max_column_intersection,
    qc_max_intersection,
)
from mdpc.rng import Rng
from test_core import dense_matrices, qc_keys


def stacked():
    b = base_block(6, 3)
    return SparseBinaryMatrix(4, 6, b.row_supports * 2)


def test_intersection_number_examples():
    m = stacked()
    assert intersection_number(m, 0, 1) == 2
    assert intersection_number(m, 0, 3) == 0
    with pytest.raises(ParameterError):
        intersection_number(m, 2, 2)


@given(dense_matrices(20, 40), st.data())
def test_intersection_number_brute_force(dense, data):
    if dense.shape[1] < 2:
        return
    m = SparseBinaryMatrix.from_dense(dense)
    j = data.draw(st.integers(0, m.cols - 1))
    k = data.draw(st.integers(0, m.cols - 2))
    k += k >= j
    brute = sum(1 for row in dense if row[j] and row[k])
    assert intersection_number(m, j, k) == brute == intersection_number(m, k, j)


def test_identity_is_degenerate():
    n = 9
    prof = max_column_intersection(SparseBinaryMatrix.from_dense(np.eye(n, dtype=np.uint8)))
    assert prof.max_s == 0 and prof.degenerate
    assert prof.histogram == {0: n * (n - 1) // 2}


def test_stacked_base_block():
    prof = max_column_intersection(stacked())
    assert prof.max_s == 2 and prof.argmax_pair == (0, 1)


@settings(max_examples=150)
@given(dense_matrices(12, 64))
def test_matches_dense_oracle(dense):
    if dense.shape[1] < 2:
        return
    prof = max_column_intersection(SparseBinaryMatrix.from_dense(dense))
    max_s, hist = dense_intersections(dense)
    assert prof.max_s == max_s
    assert prof.histogram == hist
    assert sum(prof.histogram.values()) == dense.shape[1] * (dense.shape[1] - 1) // 2
    j, k = prof.argmax_pair
    assert intersection_number(SparseBinaryMatrix.from_dense(dense), j, k) == max_s
    # lexicographically smallest witness
    gram = dense.astype(int).T @ dense.astype(int)
    first = min((a, b) for a in range(len(gram)) for b in range(a + 1, len(gram)) if gram[a, b] == max_s)
    assert (j, k) == first


def test_qc_small_example():
    key = QcMdpcKey(7, (0, 1), (0, 2))
    m = expand_qc(key)
    assert intersection_number(m, 0, 1) == 1
    assert qc_max_intersection(key).histogram == max_column_intersection(m).histogram


@settings(max_examples=120)
@given(qc_keys(p_min=2, p_max=64, balanced=False))
def test_qc_fast_path_equals_expansion(key):
    fast = qc_max_intersection(key)
    slow = max_column_intersection(expand_qc(key))
    assert fast == slow


def test_qc_original_size_fast_and_consistent():
    import time

    key = sample_qc(4801, 45, 12)
    t0 = time.perf_counter()
    fast = qc_max_intersection(key)
    assert time.perf_counter() - t0 < 1.0
    assert fast.max_s == max_column_intersection(expand_qc(key)).max_s


@given(dense_matrices(8, 16), st.lists(st.integers(0, 1), min_size=16, max_size=16))
def test_adding_row_never_decreases(dense, extra):
    if dense.shape[1] < 2:
        return
    m = SparseBinaryMatrix.from_dense(dense)
    bigger = m.with_row([j for j in range(m.cols) if extra[j]])
    for j in range(m.cols):
        for k in range(j + 1, m.cols):
            assert intersection_number(bigger, j, k) >= intersection_number(m, j, k)


@pytest.mark.parametrize("v,s,r", [(2017, 12, 84), (45, 3, 7), (25, 3, 4), (7, 0, 3)])
def test_guaranteed_radius(v, s, r):
    assert guaranteed_radius(v, s) == r


def test_profile_radius_flags_degenerate():
    prof = max_column_intersection(SparseBinaryMatrix.from_dense(np.eye(4, dtype=np.uint8)))
    assert prof.to_dict(v_min=1)["degenerate"] and prof.radius(1) == 0


def test_concentration_window_sample():
    # a handful of draws at (1024, 32, 16) sit below the ceil(2.5 ln n / ln ln n) = 9 window
    values = [max_column_intersection(sample_gallager(GallagerParams(1024, 32, 16, seed=s)).matrix).max_s
              for s in range(5)]
    assert all(3 <= x <= 9 for x in values)
