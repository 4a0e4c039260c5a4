import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdpc.core import BinaryWord, MdpcCode, MdpcType, QcMdpcKey, SparseBinaryMatrix, expand_qc, transpose_supports
from mdpc.errors import FormatError, ParameterError
from mdpc.io import key_from_dict, key_to_dict, matrix_from_dict, matrix_to_dict, word_from_dict, word_to_dict
from mdpc.rng import Rng


@st.composite
def dense_matrices(draw, max_rows=10, max_cols=20):
    r = draw(st.integers(1, max_rows))
    n = draw(st.integers(1, max_cols))
    bits = draw(st.lists(st.integers(0, 1), min_size=r * n, max_size=r * n))
    return np.array(bits, dtype=np.uint8).reshape(r, n)


@st.composite
def qc_keys(draw, p_min=2, p_max=64, balanced=True):
    p = draw(st.integers(p_min, p_max))
    k = draw(st.integers(1, p))
    seed = draw(st.integers(0, 2**32))
    rng = Rng(seed)
    h0 = sorted(rng.sample(p, k))
    h1 = sorted(rng.sample(p, k if balanced else draw(st.integers(1, p))))
    return QcMdpcKey(p, tuple(h0), tuple(h1))


class TestBinaryWord:
    def test_weight_and_bits(self):
        w = BinaryWord(6, (1, 4))
        assert w.weight() == 2
        assert w.to_bits().tolist() == [0, 1, 0, 0, 1, 0]
        assert BinaryWord.from_bits(w.to_bits()) == w

    @pytest.mark.parametrize("support", [(2, 1), (1, 1), (6,), (-1,)])
    def test_rejects_bad_support(self, support):
        with pytest.raises(ParameterError):
            BinaryWord(6, support)

    def test_xor(self):
        assert BinaryWord(5, (0, 2)) ^ BinaryWord(5, (2, 3)) == BinaryWord(5, (0, 3))


class TestSparseMatrix:
    @given(dense_matrices())
    def test_dense_round_trip_and_column_consistency(self, dense):
        m = SparseBinaryMatrix.from_dense(dense)
        assert np.array_equal(m.to_dense(), dense)
        rebuilt = {(i, j) for j, col in enumerate(m.col_supports) for i in col}
        assert rebuilt == m.entries()
        assert m.col_weights.tolist() == dense.sum(axis=0).tolist()
        # CSC arrays agree with col_supports
        for j in range(m.cols):
            lo, hi = m.col_indptr[j], m.col_indptr[j + 1]
            assert tuple(m.col_indices[lo:hi].tolist()) == m.col_supports[j]

    def test_rejects_duplicates(self):
        with pytest.raises(ParameterError):
            SparseBinaryMatrix(1, 3, ((0, 0),))

    def test_mdpc_type(self):
        m = SparseBinaryMatrix.from_dense(np.ones((2, 3), dtype=np.uint8))
        assert m.mdpc_type() == MdpcType(2, 3)
        assert SparseBinaryMatrix.from_dense(np.eye(3, dtype=np.uint8)).mdpc_type() is None

    def test_mdpc_type_requires_v_below_w(self):
        with pytest.raises(ParameterError):
            MdpcType(3, 3)


class TestTranspose:
    def test_one_by_two(self):
        t = transpose_supports(SparseBinaryMatrix(1, 2, ((0,),)))
        assert t.rows == 2 and t.cols == 1
        assert SparseBinaryMatrix(1, 2, ((0,),)).col_supports == ((0,), ())
        assert t.row_supports == ((0,), ())

    @given(qc_keys(p_max=20))
    def test_involution(self, key):
        m = expand_qc(key)
        assert transpose_supports(transpose_supports(m)) == m

    @given(dense_matrices(10, 20))
    def test_entries_preserved(self, dense):
        m = SparseBinaryMatrix.from_dense(dense)
        assert {(j, i) for i, j in transpose_supports(m).entries()} == m.entries()


class TestExpandQc:
    def test_small_example(self):
        m = expand_qc(QcMdpcKey(3, (0,), (0, 1)))
        assert m.row_supports == ((0, 3, 4), (1, 4, 5), (2, 3, 5))

    def test_regular_small(self):
        m = expand_qc(QcMdpcKey(3, (0, 1), (0, 1)))
        assert set(m.row_weights.tolist()) == {4}
        assert set(m.col_weights.tolist()) == {2}

    def test_original_parameter_size(self):
        rng = Rng(3)
        key = QcMdpcKey(4801, tuple(sorted(rng.sample(4801, 45))), tuple(sorted(rng.sample(4801, 45))))
        m = expand_qc(key)
        assert (m.rows, m.cols) == (4801, 9602)
        assert m.mdpc_type() == MdpcType(45, 90)

    @settings(max_examples=100)
    @given(qc_keys(p_min=16, p_max=512))
    def test_type_is_half_w_w(self, key):
        assert expand_qc(key).mdpc_type() == MdpcType(key.half_weight, key.w)

    def test_matches_definition(self):
        key = QcMdpcKey(7, (0, 3), (1, 2))
        m = expand_qc(key)
        for i in range(7):
            want = sorted([(j + i) % 7 for j in key.h0] + [(j + i) % 7 + 7 for j in key.h1])
            assert list(m.row_supports[i]) == want

    def test_unbalanced_key_is_flagged(self):
        key = QcMdpcKey(3, (0,), (0, 1))
        assert not key.balanced
        with pytest.raises(ParameterError):
            key.half_weight


class TestMdpcCode:
    def test_radius_must_match(self):
        m = SparseBinaryMatrix.from_dense(np.ones((2, 3), dtype=np.uint8))
        MdpcCode(m, max_col_intersection=2, guaranteed_radius=0)
        with pytest.raises(ParameterError):
            MdpcCode(m, max_col_intersection=2, guaranteed_radius=1)
        with pytest.raises(ParameterError):
            MdpcCode(m, guaranteed_radius=0)

    def test_declared_type_checked(self):
        m = SparseBinaryMatrix.from_dense(np.ones((2, 3), dtype=np.uint8))
        with pytest.raises(ParameterError):
            MdpcCode(m, mdpc_type=MdpcType(1, 3))


class TestSerialization:
    @given(dense_matrices())
    def test_matrix_round_trip(self, dense):
        m = SparseBinaryMatrix.from_dense(dense)
        assert matrix_from_dict(matrix_to_dict(m)) == m

    @given(qc_keys(balanced=False))
    def test_key_round_trip(self, key):
        assert key_from_dict(key_to_dict(key)) == key

    def test_word_round_trip(self):
        w = BinaryWord(9, (0, 8))
        assert word_from_dict(word_to_dict(w)) == w

    @pytest.mark.parametrize(
        "obj",
        [
            {"rows": 1, "cols": 3, "row_supports": [[2, 1]]},
            {"rows": 1, "cols": 3, "row_supports": [[1, 1]]},
            {"rows": 1, "cols": 3},
            {"rows": 2, "cols": 3, "row_supports": [[1]]},
            {"rows": 1, "cols": 3, "row_supports": [["a"]]},
        ],
    )
    def test_matrix_reader_rejects(self, obj):
        with pytest.raises(FormatError):
            matrix_from_dict(obj)

    def test_reader_ignores_extra_keys(self):
        m = matrix_from_dict({"rows": 1, "cols": 2, "row_supports": [[0, 1]], "note": "x"})
        assert m.row_supports == ((0, 1),)
