import random
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qbent import glnf2
from qbent.boolfun import TruthTable, parse_anf, from_anf
from qbent.glnf2 import BitMatrix, act, enumerate_gl, gf2_rank, gl_order, gl_rows, is_invertible

from oracles import mat_vec, naive_gl, naive_rank


def mats(n):
    return st.lists(st.integers(0, (1 << n) - 1), min_size=n, max_size=n).map(lambda r: BitMatrix(n, tuple(r)))


@pytest.mark.parametrize("n,order", [(1, 1), (2, 6), (3, 168), (4, 20160), (5, 9999360)])
def test_gl_order(n, order):
    assert gl_order(n) == order


@pytest.mark.parametrize("n", [1, 2, 3])
def test_enumeration_matches_bruteforce(n):
    got = [tuple(int(x) for x in r) for r in gl_rows(n)]
    assert len(got) == len(set(got)) == gl_order(n)
    assert set(got) == set(naive_gl(n))


def test_enumeration_n4_unique_and_invertible():
    rows = gl_rows(4)
    assert rows.shape == (20160, 4)
    assert len({tuple(r) for r in rows.tolist()}) == 20160
    assert all(gf2_rank(r) == 4 for r in rows.tolist()[::97])


def test_enumeration_order():
    # row 1 ascending over nonzero vectors, each later row ascending outside the span
    assert [m.rows for m in enumerate_gl(2)] == [(1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2)]
    first = gl_rows(3)[:, 0]
    assert np.all(np.diff(first.astype(int)) >= 0)


def test_first_row_partition():
    parts = [list(enumerate_gl(3, first_row=r)) for r in range(1, 8)]
    assert sum(len(p) for p in parts) == 168
    assert all(len(p) == 24 for p in parts)


@settings(max_examples=200)
@given(mats(4))
def test_rank_matches_oracle(A):
    assert A.rank() == naive_rank(A.rows)
    assert is_invertible(A) == (naive_rank(A.rows) == 4)


@settings(max_examples=200)
@given(mats(4), st.integers(0, 15))
def test_apply_matches_row_combination(A, a):
    assert A.apply(a) == mat_vec(A.rows, a, 4)


@settings(max_examples=100)
@given(mats(3), mats(3), st.integers(0, 7))
def test_matmul_is_composition(A, B, a):
    assert (A @ B).apply(a) == B.apply(A.apply(a))


@settings(max_examples=100)
@given(st.integers(0, 255), st.data())
def test_action_composes(v, data):
    q = TruthTable(3, v)
    draw = lambda: BitMatrix(3, tuple(int(x) for x in gl_rows(3)[data.draw(st.integers(0, 167))]))
    A, B = draw(), draw()
    assert act(act(q, A), B) == act(q, B @ A)
    assert act(q, BitMatrix.identity(3)) == q


def test_act_example():
    q = from_anf(parse_anf("x1x2+x3", 3))
    swap = BitMatrix.from_text("010\n100\n001")
    assert act(q, swap) == q
    with pytest.raises(ValueError):
        act(q, BitMatrix.zero(3))


def test_text_roundtrip():
    A = BitMatrix.from_text("0110\n1000\n0011\n0001")
    assert BitMatrix.from_text(A.to_text()) == A
    assert BitMatrix.identity(4).to_text() == "1000\n0100\n0010\n0001"


def test_sampler_deterministic_and_invertible():
    a = [m.rows for _, m in zip(range(20), glnf2.gl_sampler(4, 123))]
    b = [m.rows for _, m in zip(range(20), glnf2.gl_sampler(4, 123))]
    assert a == b
    assert all(gf2_rank(r) == 4 for r in a)


def test_sampler_uniform_chi_square():
    # 16800 draws over 168 cells: each count within 100 +- 5 sqrt(100); chi-square with
    # 167 dof stays under its 99.9% quantile (about 233)
    draws = 16800
    counts = Counter(m.rows for _, m in zip(range(draws), glnf2.gl_sampler(3, 2024)))
    assert len(counts) == 168
    assert all(50 <= c <= 150 for c in counts.values())
    chi2 = sum((c - 100) ** 2 / 100 for c in counts.values())
    assert chi2 < 233


def test_cache_roundtrip(tmp_path):
    path = glnf2.save_gl_cache(tmp_path / "gl3.glnf2", 3)
    data = path.read_bytes()
    assert data[:5] == b"GLNF2" and data[6] == 3
    assert int.from_bytes(data[7:15], "little") == 168
    assert np.array_equal(glnf2.load_gl_cache(path), gl_rows(3))
    assert np.array_equal(glnf2.cached_gl_rows(3, tmp_path), gl_rows(3))
    path.write_bytes(data[:-2])
    with pytest.raises(ValueError):
        glnf2.load_gl_cache(path)


def test_enumeration_limits():
    with pytest.raises(ValueError):
        gl_rows(6)


@pytest.mark.slow
def test_gl5_count():
    rows = gl_rows(5)
    assert rows.shape[0] == gl_order(5) == 9999360
    sample = random.Random(1).sample(range(rows.shape[0]), 2000)
    assert all(gf2_rank(rows[i].tolist()) == 5 for i in sample)
