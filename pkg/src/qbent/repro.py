"""Reproduction recipes: each returns a list of checked claims."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, List

from . import qtransform as qt
from .boolfun import (
    AnfPoly, TruthTable, bent_block, from_anf, imbalance, is_affine, parse_anf, quad_classify,
    support, vector_str, weight,
)
from .pds import MINUS, NONEXISTENT, PLUS, pds_check, pds_closure, theorem3_scan
from .search import (
    SearchTask, bendability, find_almost_q_bent, pds_bruteforce, quadratic_bentness_table,
)


@dataclass
class Claim:
    name: str
    expected: Any
    observed: Any
    passed: bool

    def to_json(self) -> dict:
        return {"claim": self.name, "expected": self.expected, "observed": self.observed,
                "passed": self.passed}


@dataclass
class Repro:
    name: str
    claims: List[Claim] = field(default_factory=list)

    def check(self, name: str, expected, observed, passed=None) -> None:
        ok = expected == observed if passed is None else bool(passed)
        self.claims.append(Claim(name, expected, observed, ok))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims)

    def to_json(self) -> dict:
        return {"repro": self.name, "passed": self.passed, "claims": [c.to_json() for c in self.claims]}


def fn(text: str, n: int) -> TruthTable:
    return from_anf(parse_anf(text, n))


def example1(jobs: int = 1) -> Repro:
    """n = 4, q = x1x2 + x3, f = x1x2 + x3x4."""
    r = Repro("example1")
    q, f = fn("x1x2+x3", 4), fn("x1x2+x3x4", 4)
    r.check("wt(f)", 6, weight(f))
    r.check("supp(f)", sorted(["1100", "1011", "0111", "0011", "1101", "1110"]),
            sorted(vector_str(a, 4) for a in support(f)))
    spec = qt.q_spectrum(f, q, jobs)
    r.check("|W_q(f)(A)| values over GL_4 and 0", [0, 4, 8], sorted(spec.abs_values()))
    r.check("q-bentness of f", 4, qt.q_bentness(f, q).delta)
    lo, hi = qt.support_overlap_range(f, q)
    r.check("supp(f_A) meets supp(q) for every A", True, lo >= 1)
    r.check("overlap range", [1, 5], [lo, hi])
    orb = qt.orbit(f, jobs)
    weights_seen = sorted({int((int(u) ^ q.value).bit_count()) for u in orb.tables})
    r.check("wt(f_A + q) values", [4, 6, 8, 10, 12], weights_seen)
    odd = find_almost_q_bent(SearchTask(q, 2, qt.ODD, symmetry_reduction=True, worker_count=jobs))
    r.check("no odd-weight 2-almost q-bent f", [True, 0], [odd.exhausted, odd.witness_count])
    b = bendability(q, 8, jobs)
    r.check("bendability(q)", 4, b.value)
    return r


def example2(jobs: int = 1) -> Repro:
    """n = 3, q = x1x2 + x3, every f in B_3."""
    r = Repro("example2")
    q = fn("x1x2+x3", 3)
    q1 = q.complement()
    orbit_q = {int(u) for u in qt.orbit(q, jobs).tables} | {int(u) for u in qt.orbit(q1, jobs).tables}
    groups = {"wt2or6": set(), "odd": set(), "wt4_affine": set(), "wt4_like_q": set(), "wt4_other": set()}
    deltas = {k: set() for k in groups}
    for v in range(256):
        f = TruthTable(3, v)
        w = weight(f)
        if w in (2, 6):
            key = "wt2or6"
        elif w % 2:
            key = "odd"
        elif w == 4:
            key = "wt4_affine" if is_affine(f) else ("wt4_like_q" if v in orbit_q else "wt4_other")
        else:
            continue
        groups[key].add(tuple(sorted(qt.q_spectrum(f, q, jobs).abs_values())))
        deltas[key].add(qt.q_bentness(f, q).delta)
    r.check("wt 2/6: |W| values", [(0, 4)], sorted(groups["wt2or6"]))
    r.check("wt 2/6: q-bentness", [3], sorted(deltas["wt2or6"]))
    r.check("odd wt: |W| values", [(2, 6)], sorted(groups["odd"]))
    r.check("odd wt: q-bentness", [4], sorted(deltas["odd"]))
    r.check("affine wt 4: |W| values", [(0, 4)], sorted(groups["wt4_affine"]))
    r.check("affine wt 4: q-bentness", [3], sorted(deltas["wt4_affine"]))
    r.check("non-affine wt 4 is equivalent to q or q+1", [], sorted(groups["wt4_other"]))
    r.check("f ~ q: |W| values", [(0, 4, 8)], sorted(groups["wt4_like_q"]))
    r.check("f ~ q: q-bentness", [6], sorted(deltas["wt4_like_q"]))
    r.check("bendability(q)", 3, bendability(q, 8, jobs).value)
    return r


def example3(include_n5: bool = False) -> Repro:
    """Quadratic forms: classification and q-bentness against q = x1x2 + x3."""
    r = Repro("example3")
    mismatched = []
    for v in range(1 << 11):
        monos = [m for i, m in enumerate(_QUAD_MONOMIALS_4) if (v >> i) & 1]
        f = from_anf(AnfPoly.from_terms(4, monos))
        if quad_classify(f).predicted_imbalance != imbalance(f):
            mismatched.append(f.to_hex())
    r.check("predicted imbalance = imbalance for all 2^11 quadratics at n=4", [], mismatched)
    for n in (4, 5) if include_n5 else (4,):
        q = fn("x1x2+x3", n)
        rows = quadratic_bentness_table(q)
        for row in rows:
            r.check(f"n={n} rank {row.rank} type {row.form_type}: closed form", row.formula_delta,
                    row.measured_delta)
        best = min(row.measured_delta for row in rows)
        expected = 4 if n == 4 else 11  # ceil(2^(n/2)) for even n, ceil(2^(n/2)(2^(3/2)-1)) for odd n
        r.check(f"n={n} least q-bentness among quadratics", expected, best)
    r.check("B_4 against q: q-bentness", 4, qt.q_bentness(bent_block(4, 4), fn("x1x2+x3", 4)).delta)
    return r


_QUAD_MONOMIALS_4 = [()] + [(i,) for i in range(1, 5)] + [
    (i, j) for i in range(1, 5) for j in range(i + 1, 5)
]


def theorem3(max_n: int = 20) -> Repro:
    r = Repro("theorem3")
    for n in range(4, max_n + 1, 2):
        for sign in (PLUS, MINUS):
            rep = theorem3_scan(n, sign)
            r.check(f"n={n} {sign}: survivors", [], list(rep.survivors))
            other = theorem3_scan(n, sign, "reduced" if rep.mode == "full" else "full") \
                if rep.k < (1 << 20) else None
            if other is not None:
                r.check(f"n={n} {sign}: {rep.mode} and {other.mode} agree",
                        [list(rep.survivors), rep.scanned], [list(other.survivors), other.scanned])
    for sign in (PLUS, MINUS):
        ex = theorem3_scan(4, sign, "exhaustive")
        r.check(f"n=4 {sign}: pairwise scan empty", [NONEXISTENT, []], [ex.verdict, list(ex.survivors)])
    for k in (6, 10):
        r.check(f"n=4 k={k}: regular nontrivial PDS with lambda != mu", 0, len(pds_bruteforce(4, k, True)))
    B4 = support(bent_block(4, 4))
    rep = pds_check(B4, 4)
    r.check("supp(x1x2+x3x4) is a (16,6,2,2) PDS", (16, 6, 2, 2),
            rep.params.as_tuple() if rep.is_pds else None)
    found = pds_bruteforce(4, 6, False)
    r.check("lambda = mu sweep contains supp(x1x2+x3x4)", True,
            tuple(sorted(B4)) in {p.elements for p in found})
    bad = 0
    for k in (6, 10):
        for p in pds_bruteforce(4, k, False):
            bad += sum(not rep.is_pds for _, rep in pds_closure(p.elements, 4).values())
    r.check("closures of every lambda = mu PDS are PDSs", 0, bad)
    return r


RECIPES = {"example1": example1, "example2": example2, "example3": example3, "theorem3": theorem3}
