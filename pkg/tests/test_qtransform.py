import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qbent import qtransform as qt
from qbent.boolfun import TruthTable, from_anf, imbalance, is_balanced, is_bent, parse_anf, weight
from qbent.glnf2 import BitMatrix, act, enumerate_gl, gl_order, gl_rows

from oracles import naive_coeff, naive_spectrum


def fn(text, n):
    return from_anf(parse_anf(text, n))


Q3, Q4 = fn("x1x2+x3", 3), fn("x1x2+x3", 4)


def sorted_hist(spec):
    return {v: c for v, c in spec.histogram}


@pytest.mark.parametrize("v", [0x00, 0x56, 0x17, 0x80, 0xe8, 0x3c])
def test_spectrum_matches_per_matrix_oracle_n3(v):
    f = TruthTable(3, v)
    spec = qt.q_spectrum(f, Q3)
    assert sorted_hist(spec) == naive_spectrum(f, Q3)
    assert spec.gl_total == 168 and spec.zero_coeff == imbalance(f)


def test_spectrum_matches_act_oracle_n4():
    rng = random.Random(3)
    rows = gl_rows(4)
    for _ in range(5):
        f = TruthTable(4, rng.getrandbits(16))
        spec = qt.q_spectrum(f, Q4)
        hist = {}
        for r in rows.tolist():
            w = naive_coeff(f, Q4, r)
            hist[w] = hist.get(w, 0) + 1
        assert sorted_hist(spec) == hist


def test_q_coeff_examples():
    f = fn("x1x2+x3x4", 4)
    assert qt.q_coeff(f, Q4, BitMatrix.zero(4)) == 4
    assert qt.q_coeff(f, Q4, BitMatrix.identity(4)) == 8
    A = BitMatrix.from_text("0110\n1000\n0011\n0001")
    assert qt.q_coeff(f, Q4, A) == naive_coeff(f, Q4, A.rows)


def test_example_spectrum():
    spec = qt.q_spectrum(fn("x1x2+x3x4", 4), Q4)
    assert spec.abs_values() == {0, 4, 8}
    assert spec.histogram == ((-8, 864), (-4, 3456), (0, 8640), (4, 5184), (8, 2016))
    assert spec.to_json(fn("x1x2+x3x4", 4), Q4) == {
        "n": 4, "q": "333c", "f": "111e", "zero_coeff": 4,
        "histogram": [[-8, 864], [-4, 3456], [0, 8640], [4, 5184], [8, 2016]], "gl_total": 20160,
    }


def test_jobs_do_not_change_spectrum():
    f = TruthTable(4, 0x1b3f)
    q = fn("x1x2+x3x1+x4", 4)
    qt._ORBITS.clear()
    a = qt.q_spectrum(f, q, 1)
    qt._ORBITS.clear()
    b = qt.q_spectrum(f, q, 8)
    assert a == b


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 255), st.integers(0, 167))
def test_mod4_law(v, i):
    f = TruthTable(3, v)
    A = list(enumerate_gl(3))[i]
    w = qt.q_coeff(f, Q3, A)
    assert w % 4 == (0 if weight(f) % 2 == 0 else 2)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 255))
def test_complement_negates(v):
    f = TruthTable(3, v)
    a, b = qt.q_spectrum(f, Q3), qt.q_spectrum(f.complement(), Q3)
    assert sorted_hist(b) == {-w: c for w, c in a.histogram}
    assert qt.q_bentness(f, Q3).delta == qt.q_bentness(f.complement(), Q3).delta


@settings(max_examples=50, deadline=None)
@given(st.integers(0, (1 << 16) - 1))
def test_expectation_identities(v):
    f = TruthTable(4, v)
    assert qt.expectation_prime_sq(f, Q4) == qt.expectation_prime_formula(f)
    assert qt.expectation_omega_sq(f, Q4) == 16


def test_omega_weights_sum_to_one():
    for n in (2, 3, 4, 5):
        w = qt.omega_weights(n)
        assert w.weight_gl * gl_order(n) + w.weight_zero == 1


def test_balanced_q_required():
    with pytest.raises(ValueError):
        qt.q_bentness(TruthTable(3, 0x56), fn("x1x2", 3))
    with pytest.raises(ValueError):
        qt.expectation_omega_sq(TruthTable(3, 0x56), fn("x1x2x3", 3))


def test_within_matches_exact_reals():
    # |a - 2^(n/2)| <= delta, decided in exact arithmetic by squaring
    for n in range(1, 9):
        r = 1 << n
        for delta in range(9):
            for a in range(40):
                if a >= delta:
                    expect = (a - delta) ** 2 <= r <= (a + delta) ** 2
                else:
                    expect = r <= (a + delta) ** 2
                assert qt.within(a, delta, n) == expect
                d = qt.deviation(a, n)
                assert qt.within(a, d, n) and (d == 0 or not qt.within(a, d - 1, n))


@pytest.mark.parametrize("n,delta,parity,values", [
    (3, 4, qt.ODD, {2, 6}),
    (4, 2, qt.ODD, {2, 6}),
    (4, 2, qt.EVEN, {4}),
    (4, 4, qt.EVEN, {0, 4, 8}),
    (3, 0, qt.EVEN, set()),
    (5, 1, qt.EVEN, set()),
])
def test_admissible_examples(n, delta, parity, values):
    assert qt.admissible_values(n, delta, parity) == values


def test_nonexistence_examples():
    assert qt.nonexistence_by_parity(3, 0, qt.EVEN).verdict == qt.IMPOSSIBLE
    assert qt.nonexistence_by_parity(4, 0, qt.EVEN).verdict == qt.IMPOSSIBLE
    assert qt.nonexistence_by_parity(4, 0, qt.EVEN, q_affine=True).verdict == qt.UNDECIDED
    assert qt.nonexistence_by_parity(4, 2, qt.ODD).verdict == qt.UNDECIDED
    assert qt.nonexistence_by_parity(3, 1, qt.ODD).verdict == qt.IMPOSSIBLE


@pytest.mark.parametrize("n", [3, 4])
def test_impossible_verdicts_are_sound(n):
    """No f of an IMPOSSIBLE parity class reaches that delta (n = 3 exhaustive, n = 4 sampled)."""
    q = Q3 if n == 3 else Q4
    rng = random.Random(n)
    fs = [TruthTable(n, v) for v in range(256)] if n == 3 else [TruthTable(4, rng.getrandbits(16)) for _ in range(300)]
    best = {qt.EVEN: math.inf, qt.ODD: math.inf}
    for f in fs:
        p = qt.parity_of(f)
        best[p] = min(best[p], qt.q_bentness(f, q).delta)
    for delta in range(0, 8):
        for p in (qt.EVEN, qt.ODD):
            if qt.nonexistence_by_parity(n, delta, p).verdict == qt.IMPOSSIBLE:
                assert best[p] > delta


def test_bentness_report_example():
    rep = qt.q_bentness(fn("x1x2+x3x4", 4), Q4)
    assert rep.delta == 4 and not rep.exceeded
    assert rep.matrices_examined == 20160
    assert abs(qt.q_coeff(fn("x1x2+x3x4", 4), Q4, rep.witness_worst)) in (0, 8)


def test_bentness_early_abort():
    f = fn("x1x2+x3x4", 4)
    rep = qt.q_bentness(f, Q4, abort_above=2)
    assert rep.exceeded and rep.delta > 2 and rep.matrices_examined < 20160
    # the witness is the first matrix in enumeration order that breaks the bound
    first = next(i for i, A in enumerate(enumerate_gl(4)) if qt.deviation(qt.q_coeff(f, Q4, A), 4) > 2)
    assert rep.matrices_examined == first + 1


def test_bentness_zero_matrix_witness():
    f = TruthTable.zero(4)
    rep = qt.q_bentness(f, Q4)
    assert rep.delta == 12 and rep.witness_worst.is_zero


def test_linear_q_matches_bent_n4_sample():
    q = fn("x1", 4)
    rng = random.Random(11)
    fs = [TruthTable(4, rng.getrandbits(16)) for _ in range(300)] + [fn("x1x2+x3x4", 4), fn("x1x3+x2x4+x1", 4)]
    for f in fs:
        assert qt.is_q_bent(f, q) == is_bent(f)


def test_is_q_bent_requires_even_n():
    with pytest.raises(ValueError):
        qt.is_q_bent(TruthTable(3, 0x56), Q3)


def test_no_q_bent_for_nonaffine_q_n4():
    # candidates need weight 6 or 10; check every such f
    from itertools import combinations
    for k in (6, 10):
        for combo in combinations(range(16), k):
            f = TruthTable(4, sum(1 << (15 - a) for a in combo))
            assert not qt.is_q_bent(f, Q4)


def test_overlap_example():
    assert qt.support_overlap_range(fn("x1x2+x3x4", 4), Q4) == (1, 5)


def test_estimate_tracks_exact_mean():
    f = fn("x1x2+x3x4", 4)
    est = qt.estimate_spectrum(f, Q4, 4000, seed=5)
    assert est.expected_mean_sq == 16
    assert est.ci95[0] <= 16 <= est.ci95[1]
    assert est.zero_coeff == 4
    assert qt.estimate_spectrum(f, Q4, 100, seed=5) == qt.estimate_spectrum(f, Q4, 100, seed=5)


def test_large_n_refuses_exact():
    f = TruthTable(6, 0)
    q = fn("x1x2+x3", 6)
    with pytest.raises(ValueError):
        qt.q_spectrum(f, q)


def test_json_int():
    assert qt.json_int(2 ** 53) == 2 ** 53
    assert qt.json_int(2 ** 53 + 1) == str(2 ** 53 + 1)


@pytest.mark.slow
def test_linear_q_matches_bent_n4_full():
    q = fn("x1", 4)
    for v in range(1 << 16):
        f = TruthTable(4, v)
        assert qt.is_q_bent(f, q) == is_bent(f)
