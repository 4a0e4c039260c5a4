import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import dense_bf_round, dense_decode
from mdpc.construct import ConstructionBudget, GallagerParams, base_block, construct_certified, sample_gallager
from mdpc.core import BinaryWord, SparseBinaryMatrix
from mdpc.decode import bf_iteration, decode, decode_bits, syndrome, verify_radius_exhaustive
from mdpc.errors import EnumerationBudgetExceeded, ParameterError
from mdpc.intersect import guaranteed_radius
from mdpc.rng import Rng
from test_core import dense_matrices


def gf2_nullspace(dense: np.ndarray) -> list[np.ndarray]:
    """Basis of {x : H x = 0 mod 2} by Gaussian elimination."""
    a = dense.copy().astype(np.uint8) & 1
    r, n = a.shape
    pivots, row = [], 0
    for col in range(n):
        hits = np.flatnonzero(a[row:, col]) + row if row < r else []
        if len(hits) == 0:
            continue
        a[[row, hits[0]]] = a[[hits[0], row]]
        for i in range(r):
            if i != row and a[i, col]:
                a[i] ^= a[row]
        pivots.append(col)
        row += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        x = np.zeros(n, dtype=np.uint8)
        x[f] = 1
        for i, p in enumerate(pivots):
            x[p] = a[i, f]
        basis.append(x)
    return basis


@pytest.fixture(scope="module")
def certified_small():
    return construct_certified(GallagerParams(30, 5, 4, seed=1), ConstructionBudget(5000, 2))


class TestSyndrome:
    def test_zero_word(self):
        m = base_block(6, 3)
        assert syndrome(m, BinaryWord.zeros(6)).weight() == 0

    def test_unit_vector(self):
        assert syndrome(base_block(6, 3), BinaryWord(6, (0,))).support == (0,)

    @given(dense_matrices(10, 20), st.data())
    def test_dense_oracle(self, dense, data):
        y = np.array(data.draw(st.lists(st.integers(0, 1), min_size=dense.shape[1], max_size=dense.shape[1])),
                     dtype=np.uint8)
        m = SparseBinaryMatrix.from_dense(dense)
        want = (dense.astype(int) @ y) % 2
        assert syndrome(m, BinaryWord.from_bits(y)).to_bits().tolist() == want.tolist()

    def test_length_mismatch(self):
        with pytest.raises(ParameterError):
            syndrome(base_block(6, 3), BinaryWord.zeros(5))


class TestBfIteration:
    def test_zero_syndrome_fixed_point(self):
        m = base_block(6, 3)
        y = BinaryWord(6, (0, 1))  # row 0 has even parity
        out, counters = bf_iteration(m, y)
        assert out == y and counters.u_i.sum() == 0

    def test_snapshot_semantics_two_by_two(self):
        m = SparseBinaryMatrix(2, 2, ((0, 1), (0, 1)))
        out, counters = bf_iteration(m, BinaryWord(2, (0,)))
        assert counters.u_i.tolist() == [2, 2]
        assert out == BinaryWord(2, (1,))  # both bits flip simultaneously

    def test_ties_do_not_flip(self):
        m = SparseBinaryMatrix(2, 2, ((0,), (0, 1)))
        # bit 0 sits in both rows; only row 1 unsatisfied -> u_0 = 1 = n_0 / 2
        out, counters = bf_iteration(m, BinaryWord(2, (0, 1)))
        assert counters.n_i.tolist() == [2, 1] and counters.u_i.tolist() == [1, 0]
        assert out == BinaryWord(2, (0, 1))

    @settings(max_examples=150)
    @given(dense_matrices(10, 16), st.data())
    def test_dense_oracle_and_counter_invariants(self, dense, data):
        n = dense.shape[1]
        y = np.array(data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n)), dtype=np.uint8)
        m = SparseBinaryMatrix.from_dense(dense)
        out, c = bf_iteration(m, BinaryWord.from_bits(y))
        assert out.to_bits().tolist() == dense_bf_round(dense, y).tolist()
        assert np.all((0 <= c.u_i) & (c.u_i <= c.n_i))
        syn = (dense.astype(int) @ y) % 2
        assert c.u_i.sum() == int(dense.sum(axis=1)[syn == 1].sum())

    @given(st.integers(0, 2**32))
    def test_order_independence(self, seed):
        rng = Rng(seed)
        code = sample_gallager(GallagerParams(24, 4, 3, seed=seed))
        dense = code.matrix.to_dense()
        y = np.zeros(24, dtype=np.uint8)
        y[rng.sample(24, 5)] = 1
        base, _ = bf_iteration(code.matrix, BinaryWord.from_bits(y))
        for _ in range(20):
            perm = np.array(rng.permutation(24))
            pm = SparseBinaryMatrix.from_dense(dense[:, perm])
            out, _ = bf_iteration(pm, BinaryWord.from_bits(y[perm]))
            assert out.to_bits().tolist() == base.to_bits()[perm].tolist()


class TestDecode:
    def test_zero_error(self, certified_small):
        rep = decode(certified_small.code.matrix, BinaryWord.zeros(30), 1)
        assert rep.success and rep.iterations_run == 0 and rep.flips_trace == []
        assert rep.syndrome_weight_trace == [0]

    def test_rejects_zero_iterations(self):
        with pytest.raises(ParameterError):
            decode(base_block(6, 3), BinaryWord.zeros(6), 0)

    def test_within_radius_one_round(self, certified_small):
        m, t = certified_small.code.matrix, certified_small.radius
        rng = Rng(5)
        for _ in range(200):
            rep = decode(m, BinaryWord.from_positions(30, rng.sample(30, t)), 1)
            assert rep.success and rep.output.weight() == 0

    @settings(max_examples=60)
    @given(st.integers(0, 2**32), st.integers(1, 8), st.integers(1, 5))
    def test_beyond_radius_matches_dense_decoder(self, seed, t, iters):
        m = sample_gallager(GallagerParams(24, 4, 3, seed=seed)).matrix
        y = np.zeros(24, dtype=np.uint8)
        y[Rng(seed).sample(24, t)] = 1
        rep = decode(m, BinaryWord.from_bits(y), iters)
        assert rep.output.to_bits().tolist() == dense_decode(m.to_dense(), y, iters).tolist()
        assert len(rep.syndrome_weight_trace) == rep.iterations_run + 1
        assert rep.success == (rep.syndrome_weight_trace[-1] == 0)
        assert rep.iterations_run <= iters

    def test_after_first_round(self):
        m = sample_gallager(GallagerParams(24, 4, 3, seed=3)).matrix
        y = np.zeros(24, dtype=np.uint8)
        y[[0, 5, 9, 17]] = 1
        _, _, _, first = decode_bits(m, y, 3)
        assert first.tolist() == dense_bf_round(m.to_dense(), y).tolist()

    @given(st.integers(0, 2**32))
    def test_linearity(self, seed):
        rng = Rng(seed)
        m = sample_gallager(GallagerParams(24, 4, 2, seed=seed)).matrix
        basis = gf2_nullspace(m.to_dense())
        c = np.zeros(24, dtype=np.uint8)
        for b in basis:
            if rng.below(2):
                c ^= b
        assert not ((m.to_dense().astype(int) @ c) % 2).any()
        e = np.zeros(24, dtype=np.uint8)
        e[rng.sample(24, 3)] = 1
        out_e, syn_e, flips_e, _ = decode_bits(m, e, 4)
        out_ce, syn_ce, flips_ce, _ = decode_bits(m, e ^ c, 4)
        assert (out_ce ^ c).tolist() == out_e.tolist()
        assert flips_e == flips_ce and syn_e == syn_ce


class TestVerifyRadius:
    def test_certified_proved(self, certified_small):
        v = verify_radius_exhaustive(certified_small.code, certified_small.radius)
        assert v.proved and v.counterexample is None

    def test_t_zero(self):
        v = verify_radius_exhaustive(SparseBinaryMatrix(1, 4, ((0, 1, 2, 3),)), 0)
        assert v.proved and v.patterns_checked == 1

    def test_budget(self):
        with pytest.raises(EnumerationBudgetExceeded):
            verify_radius_exhaustive(base_block(60, 3), 5, budget=1000)

    def test_counterexample_replays(self):
        found = 0
        for seed in range(30):
            res = construct_certified(GallagerParams(30, 5, 4, seed=seed), ConstructionBudget(5000, 2))
            t = guaranteed_radius(4, max(res.s - 1, 1)) + 1
            verdict = verify_radius_exhaustive(res.code, t)
            if verdict.counterexample is not None:
                found += 1
                bits = verdict.counterexample.to_bits()
                assert dense_bf_round(res.code.matrix.to_dense(), bits).any()
        assert found > 0
