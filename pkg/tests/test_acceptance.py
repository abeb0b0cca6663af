"""Acceptance criteria, one test each; every test prints a PASS/FAIL line.

Slow variants (full linear-q sweep, GL_5 count) run with --runslow.
"""

import io
import json
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from qbent import cli, qtransform as qt, repro
from qbent.boolfun import (
    TruthTable, bent_block, from_anf, imbalance, is_bent, parse_anf, quad_classify, support,
    walsh_transform, weight,
)
from qbent.glnf2 import gl_order, gl_rows, gl_sampler
from qbent.pds import MINUS, NONEXISTENT, PLUS, pds_check, pds_closure, theorem3_scan
from qbent.search import SearchTask, bendability, find_almost_q_bent, pds_bruteforce


def fn(text, n):
    return from_anf(parse_anf(text, n))


def test_01_reference_spectrum(acceptance):
    t = time.perf_counter()
    f, q = fn("x1x2+x3x4", 4), fn("x1x2+x3", 4)
    values = qt.q_spectrum(f, q).abs_values()
    delta = qt.q_bentness(f, q).delta
    dt = time.perf_counter() - t
    acceptance(1, "f = x1x2+x3x4, q = x1x2+x3: |W| set over GL_4 and 0 is {0,4,8}, q-bentness 4",
               values == {0, 4, 8} and delta == 4, f"values {sorted(values)}, delta {delta}, {dt:.2f}s")


def test_02_odd_weight_search(acceptance):
    t = time.perf_counter()
    q = fn("x1x2+x3", 4)
    out = find_almost_q_bent(SearchTask(q, 2, qt.ODD, worker_count=1))
    parity = {p: qt.nonexistence_by_parity(4, d, p).verdict for d in range(2) for p in (qt.EVEN, qt.ODD)}
    even_lt4 = [qt.nonexistence_by_parity(4, d, qt.EVEN).verdict for d in range(4)]
    b = bendability(q, 8)
    dt = time.perf_counter() - t
    ok = (out.exhausted and out.witness_count == 0 and out.functions_scanned == 32768
          and all(v == qt.IMPOSSIBLE for v in parity.values()) and b.value == 4)
    acceptance(2, "no odd-weight f in B_4 is 2-almost q-bent; bendability(q) = 4", ok,
               f"scanned {out.functions_scanned}, witnesses {out.witness_count}, even-weight verdicts "
               f"d<4 {even_lt4}, bendability {b.value}, {dt:.2f}s")


def test_03_three_variable_table(acceptance):
    t = time.perf_counter()
    r = repro.example2()
    evaluated = 256 * (gl_order(3) + 1)
    dt = time.perf_counter() - t
    failed = [c.name for c in r.claims if not c.passed]
    acceptance(3, "n=3, q = x1x2+x3: weight-class table over all 256 f and 169 group elements", r.passed and evaluated == 256 * 169,
               f"{len(r.claims)} claims, failed {failed}, {dt:.2f}s")


def test_04_generalized_parseval(acceptance):
    t = time.perf_counter()
    rng = random.Random(4)
    bad = 0
    for n in (3, 4):
        q = fn("x1x2+x3", n)
        N, size = gl_order(n), 1 << n
        for _ in range(50):
            f = TruthTable(n, rng.getrandbits(size))
            spec = qt.q_spectrum(f, q)
            total = sum(v * v * c for v, c in spec.histogram)
            if Fraction(total) != Fraction(N * (size * size - imbalance(f) ** 2), size - 1):
                bad += 1
            if qt.expectation_omega_sq(f, q) != size:
                bad += 1
    dt = time.perf_counter() - t
    acceptance(4, "sum of W_q(f)(A)^2 over GL_n equals N(2^2n - I_f^2)/(2^n - 1); omega mean is 2^n",
               bad == 0, f"100 functions, {bad} failures, {dt:.2f}s")


def _hadamard(n):
    idx = np.arange(1 << n)
    dots = np.bitwise_count(idx[:, None] & idx[None, :]) & 1
    return 1 - 2 * dots.astype(np.int64)


def test_05_classical_parseval(acceptance):
    t = time.perf_counter()
    bad = 0
    H3 = _hadamard(3)
    for v in range(256):
        f = TruthTable(3, v)
        W = np.array(walsh_transform(f).coeffs)
        bad += int((W * W).sum() != 64) + int(not np.array_equal(W, H3 @ (1 - 2 * f.bits.astype(np.int64))))
    rng = random.Random(5)
    H10 = _hadamard(10)
    for _ in range(100):
        f = TruthTable(10, rng.getrandbits(1024))
        W = np.array(walsh_transform(f).coeffs)
        bad += int((W * W).sum() != 1 << 20) + int(not np.array_equal(W, H10 @ (1 - 2 * f.bits.astype(np.int64))))
    dt = time.perf_counter() - t
    acceptance(5, "Parseval for all of B_3 and 100 random f at n=10; fast WHT equals naive",
               bad == 0, f"{bad} failures, {dt:.2f}s")


def test_06_mod4_law(acceptance):
    t = time.perf_counter()
    rng = random.Random(6)
    failures, total = 0, 0
    for n, count in ((3, 3334), (4, 3333), (5, 3333)):
        q = fn("x1x2+x3", n)
        for A in (A for _, A in zip(range(count), gl_sampler(n, 600 + n))):
            f = TruthTable(n, rng.getrandbits(1 << n))
            w = qt.q_coeff(f, q, A)
            failures += w % 4 != (0 if weight(f) % 2 == 0 else 2)
            total += 1
    dt = time.perf_counter() - t
    acceptance(6, "W = 0 mod 4 iff wt(f) even, else 2 mod 4", failures == 0 and total == 10000,
               f"{total} pairs, {failures} failures, {dt:.2f}s")


def test_07_parameter_scan(acceptance):
    worst, bad = 0.0, []
    for n in range(4, 21, 2):
        t = time.perf_counter()
        for sign in (PLUS, MINUS):
            rep = theorem3_scan(n, sign)
            if rep.verdict != NONEXISTENT or rep.survivors:
                bad.append((n, sign))
        worst = max(worst, time.perf_counter() - t)
    agree = True
    for sign in (PLUS, MINUS):
        ex, red = theorem3_scan(4, sign, "exhaustive"), theorem3_scan(4, sign, "reduced")
        agree &= ex.survivors == red.survivors == () and ex.scanned == red.scanned
    n4 = theorem3_scan(4, PLUS, "exhaustive").scanned
    acceptance(7, "zero surviving (lambda, mu) for even n in 4..20, both signs; n=4 scans agree",
               not bad and agree and n4 == 81 and worst < 1.0,
               f"failures {bad}, n=4 pairs {n4}, slowest n {worst:.3f}s")


@pytest.fixture(scope="module")
def equal_sweep():
    return {k: pds_bruteforce(4, k, False) for k in (6, 10)}


def test_08_pds_bruteforce(acceptance, equal_sweep):
    t = time.perf_counter()
    ne = {k: len(pds_bruteforce(4, k, True)) for k in (6, 10)}
    B4 = tuple(sorted(support(bent_block(4, 4))))
    rep = pds_check(B4, 4)
    found = B4 in {p.elements for p in equal_sweep[6]}
    dt = time.perf_counter() - t
    acceptance(8, "no regular nontrivial PDS with lambda != mu for k in {6,10} at n=4; B_4 support is (16,6,2,2)",
               ne == {6: 0, 10: 0} and found and rep.is_pds and rep.params.as_tuple() == (16, 6, 2, 2),
               f"lambda!=mu counts {ne}, lambda=mu found {[len(v) for v in equal_sweep.values()]}, {dt:.2f}s")


def test_09_closure(acceptance, equal_sweep):
    t = time.perf_counter()
    checked, bad = 0, 0
    for found in equal_sweep.values():
        for p in found:
            for _, r in pds_closure(p.elements, 4).values():
                checked += 1
                bad += not r.is_pds
    dt = time.perf_counter() - t
    acceptance(9, "all five derived sets of every lambda = mu PDS are PDSs", bad == 0 and checked > 0,
               f"{checked} sets, {bad} failures, {dt:.2f}s")


def test_10_quadratic_classification(acceptance):
    t = time.perf_counter()
    monos = [()] + [(i,) for i in range(1, 5)] + [(i, j) for i in range(1, 5) for j in range(i + 1, 5)]
    from qbent.boolfun import AnfPoly
    bad = 0
    for v in range(1 << 11):
        f = from_anf(AnfPoly.from_terms(4, [m for i, m in enumerate(monos) if (v >> i) & 1]))
        bad += quad_classify(f).predicted_imbalance != imbalance(f)
    dt = time.perf_counter() - t
    acceptance(10, "predicted imbalance equals measured for all 2^11 quadratics at n=4", bad == 0,
               f"{bad} mismatches, {dt:.2f}s")


def _linear_q(fs):
    q = fn("x1", 4)
    return sum(qt.is_q_bent(f, q) != is_bent(f) for f in fs)


def test_11_linear_q_spot(acceptance):
    rng = random.Random(11)
    fs = [TruthTable(4, rng.getrandbits(16)) for _ in range(1000)]
    fs += [TruthTable(4, v) for v in range(1 << 16) if is_bent(TruthTable(4, v))][:100]
    bad = _linear_q(fs)
    acceptance(11, "q = x1 at n=4: q-bent iff bent (1000 random f plus 100 bent f)", bad == 0, f"{bad} mismatches")


@pytest.mark.slow
def test_11_linear_q_full(acceptance):
    t = time.perf_counter()
    bad = _linear_q(TruthTable(4, v) for v in range(1 << 16))
    acceptance(11, "q = x1 at n=4: q-bent iff bent for all 2^16 f", bad == 0,
               f"{bad} mismatches, {time.perf_counter() - t:.1f}s")


def test_12_gl_counts(acceptance):
    t = time.perf_counter()
    c3, c4 = gl_rows(3).shape[0], gl_rows(4).shape[0]
    acceptance(12, "GL enumeration counts 168 (n=3) and 20160 (n=4) equal the group order",
               c3 == gl_order(3) == 168 and c4 == gl_order(4) == 20160, f"{time.perf_counter() - t:.2f}s")


@pytest.mark.slow
def test_12_gl5_count(acceptance):
    t = time.perf_counter()
    c5 = gl_rows(5).shape[0]
    acceptance(12, "GL_5 enumeration count 9,999,360", c5 == gl_order(5) == 9999360,
               f"{time.perf_counter() - t:.1f}s")


def _cli(argv):
    buf = io.StringIO()
    cli.main(argv, out=buf)
    return buf.getvalue()


def test_13_determinism(acceptance):
    commands = [
        ["qt", "spectrum", "--anf", "x1x2+x3x4", "--n", "4", "--q-anf", "x1x2+x3"],
        ["qt", "bentness", "--anf", "x1x2+x3x4", "--n", "4", "--q-anf", "x1x2+x3"],
        ["search", "almost", "--n", "4", "--q-anf", "x1x2+x3", "--delta", "2", "--parity", "odd"],
        ["repro", "example1"],
        ["repro", "example2"],
        ["repro", "theorem3"],
        ["search", "pds-bruteforce", "--n", "4", "--k", "6", "--allow-equal"],
    ]
    differing = []
    for argv in commands:
        outs = set()
        for jobs in (1, 4, 16):
            qt._ORBITS.clear()
            outs.add(_cli(["--jobs", str(jobs), *argv]))
        if len(outs) != 1:
            differing.append(" ".join(argv[:2]))
    acceptance(13, "byte-identical JSON under 1, 4 and 16 workers", not differing,
               f"{len(commands)} commands, differing {differing}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
