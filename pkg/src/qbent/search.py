"""Exhaustive searches for almost q-bent functions and partial difference sets."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import qtransform as qt
from .boolfun import (
    TYPE_I, TYPE_II, TYPE_III, TruthTable, canonical_quadratic, is_affine, is_balanced,
    quad_classify, weight,
)
from .pds import PdsReport, pds_check

DEFAULT_BUDGET = 1 << 22
_CELLS = 1 << 22  # candidate x orbit cells evaluated per batch


class SearchTooLarge(ValueError):
    """The requested search space exceeds the configured budget."""


WeightFilter = Union[None, str, FrozenSet[int]]


@dataclass(frozen=True)
class SearchTask:
    q: TruthTable
    delta_target: int
    weight_filter: WeightFilter = None  # None, "even", "odd" or a set of weights
    symmetry_reduction: bool = False
    worker_count: int = 1
    max_witnesses: Optional[int] = None
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.delta_target < 0:
            raise ValueError("delta_target must be >= 0")
        if self.worker_count < 1:
            raise ValueError("worker_count must be >= 1")
        if isinstance(self.weight_filter, (set, list, tuple)):
            object.__setattr__(self, "weight_filter", frozenset(self.weight_filter))
        ws = self.weights()
        if ws is not None and any(not 0 <= w <= self.q.size for w in ws):
            raise ValueError("weights must lie in 0..2^n")

    @property
    def n(self) -> int:
        return self.q.n

    def weights(self) -> Optional[Tuple[int, ...]]:
        wf = self.weight_filter
        if wf is None:
            return None
        size = self.q.size
        if wf == qt.EVEN:
            return tuple(range(0, size + 1, 2))
        if wf == qt.ODD:
            return tuple(range(1, size + 1, 2))
        if isinstance(wf, str):
            raise ValueError(f"unknown weight filter {wf!r}")
        return tuple(sorted(wf))


@dataclass(frozen=True)
class SearchOutcome:
    witnesses: Tuple[TruthTable, ...]
    witness_count: int
    exhausted: bool
    functions_scanned: int
    prune_stats: Dict[str, int] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "witnesses": [w.to_hex() for w in self.witnesses],
            "witness_count": self.witness_count,
            "exhausted": self.exhausted,
            "functions_scanned": self.functions_scanned,
            "prune_stats": dict(sorted(self.prune_stats.items())),
        }


def _position_weights(size: int) -> np.ndarray:
    return np.left_shift(np.uint64(1), np.arange(size - 1, -1, -1, dtype=np.uint64))


def _combination_tables(positions: Sequence[int], w: int, size: int, start: int, stop: int) -> np.ndarray:
    """Tables of the combinations with lexicographic rank in [start, stop)."""
    combos = list(itertools.islice(itertools.combinations(positions, w), start, stop))
    if not combos:
        return np.zeros(0, dtype=np.uint64)
    if w == 0:
        return np.zeros(len(combos), dtype=np.uint64)
    pw = _position_weights(size)
    return pw[np.array(combos, dtype=np.int64)].sum(axis=1, dtype=np.uint64)


def _evaluate(cands: np.ndarray, orb: qt.Orbit, devtab: np.ndarray, delta: int, size: int):
    """Per candidate: passes (bool) and enumeration depth of the first violation (0 if none)."""
    ok = np.ones(cands.size, dtype=bool)
    depth = np.zeros(cands.size, dtype=np.int64)
    if orb.tables.size == 0 or cands.size == 0:
        return ok, depth
    per = max(1, _CELLS // orb.tables.size)
    for s in range(0, cands.size, per):
        c = cands[s : s + per, None]
        w = size - 2 * np.bitwise_count(c ^ orb.tables[None, :]).astype(np.int64)
        bad = devtab[np.abs(w)] > delta
        hit = bad.any(axis=1)
        first = np.argmax(bad, axis=1)
        ok[s : s + per] = ~hit
        depth[s : s + per] = np.where(hit, orb.first[first] + 1, 0)
    return ok, depth


def _depth_bucket(d: int) -> str:
    return f"kill_depth_le_{1 << max(0, (int(d) - 1).bit_length())}"


def find_almost_q_bent(
    task: SearchTask,
    on_witness: Optional[Callable[[TruthTable], None]] = None,
    resume: Optional[Dict[str, int]] = None,
    on_checkpoint: Optional[Callable[[Dict[str, int]], None]] = None,
) -> SearchOutcome:
    """All f in the filtered class with q-bentness at most ``delta_target``.

    Weight classes are enumerated as lexicographic combinations of point
    indices, the unfiltered space by integer table value.  A class whose
    imbalance is not an admissible |W| value is rejected without touching
    GL_n.  With symmetry reduction (only when the class is closed under
    complement) just the tables with f(0) = 0 are evaluated and complements of
    the survivors are added back.

    ``resume`` maps a weight (as a string) to the number of combinations
    already processed; ``on_checkpoint`` receives the same mapping after every
    batch.
    """
    q, n, delta = task.q, task.n, task.delta_target
    if not is_balanced(q):
        raise ValueError("q must be balanced")
    if n > qt.glnf2.MAX_ENUM_N:
        raise SearchTooLarge(f"searches need n <= {qt.glnf2.MAX_ENUM_N}")
    size = q.size
    ws = task.weights()
    all_weights = tuple(range(size + 1)) if ws is None else ws
    closed = {size - w for w in all_weights} == set(all_weights)
    reduce = task.symmetry_reduction and closed
    stats: Dict[str, int] = {"zero_coeff": 0, "gl_evaluated": 0}
    if task.symmetry_reduction and not closed:
        stats["symmetry_reduction_skipped"] = 1

    adm = {p: qt.admissible_values(n, delta, p) for p in (qt.EVEN, qt.ODD)}

    def class_ok(w: int) -> bool:
        return abs(size - 2 * w) in adm[qt.ODD if w % 2 else qt.EVEN]

    if ws is None:
        if size > 16:
            raise SearchTooLarge("the unfiltered space needs n <= 4; give a weight filter")
        total = 1 << (size - 1 if reduce else size)
    else:
        total = sum(math.comb(size - 1 if reduce else size, w) for w in ws)
        live = sum(math.comb(size - 1 if reduce else size, w) for w in ws if class_ok(w))
        if live > task.budget:
            raise SearchTooLarge(f"{live} candidates exceed the budget of {task.budget}")

    orb = qt.orbit(q, task.worker_count)
    devtab = qt.deviation_table(n)

    def run(cands: np.ndarray):
        return _evaluate(cands, orb, devtab, delta, size)

    found: List[int] = []
    batches: List[Tuple[Optional[int], int, np.ndarray]] = []  # (weight, rank after batch, tables)
    progress = dict(resume or {})
    if ws is None:
        values = np.arange(total, dtype=np.uint64)
        wts = np.bitwise_count(values).astype(np.int64)
        keep = np.array([class_ok(w) for w in range(size + 1)])[wts]
        stats["zero_coeff"] += int((~keep).sum())
        values = values[keep]
        step = max(1, _CELLS // max(1, orb.tables.size))
        for s in range(0, values.size, step):
            batches.append((None, 0, values[s : s + step]))
    else:
        positions = range(1, size) if reduce else range(size)
        for w in ws:
            count = math.comb(len(positions), w)
            if not class_ok(w):
                stats["zero_coeff"] += count
                continue
            done = progress.get(str(w), 0)
            step = max(1, _CELLS // max(1, orb.tables.size))
            for s in range(done, count, step):
                stop = min(count, s + step)
                batches.append((w, stop, _combination_tables(positions, w, size, s, stop)))

    if task.worker_count > 1 and len(batches) > 1:
        with ThreadPoolExecutor(task.worker_count) as pool:
            results = list(pool.map(lambda b: run(b[2]), batches))
    else:
        results = [run(b[2]) for b in batches]

    for (w, rank, cands), (ok, depth) in zip(batches, results):
        stats["gl_evaluated"] += int(cands.size)
        for d in depth[~ok]:
            key = _depth_bucket(d)
            stats[key] = stats.get(key, 0) + 1
        for v in cands[ok].tolist():
            found.append(v)
            if on_witness is not None:
                on_witness(TruthTable(n, v))
                if reduce:
                    on_witness(TruthTable(n, v).complement())
        if w is not None:
            progress[str(w)] = rank
            if on_checkpoint is not None:
                on_checkpoint(dict(progress))

    if reduce:
        mask = (1 << size) - 1
        found.extend(v ^ mask for v in list(found))
    found = sorted(set(found))
    count = len(found)
    if task.max_witnesses is not None:
        found = found[: task.max_witnesses]
    return SearchOutcome(
        tuple(TruthTable(n, v) for v in found), count, True, total, stats
    )


# -- bendability ---------------------------------------------------------------------


@dataclass(frozen=True)
class BendabilityResult:
    value: Optional[int]  # None when no witness up to max_delta
    max_delta: int
    witness: Optional[TruthTable]
    log: Tuple[dict, ...]

    @property
    def exceeded(self) -> bool:
        return self.value is None

    def to_json(self) -> dict:
        return {
            "bendability": self.value if self.value is not None else f"EXCEEDS({self.max_delta})",
            "witness": self.witness.to_hex() if self.witness else None,
            "log": list(self.log),
        }


def bendability(q: TruthTable, max_delta: int, jobs: int = 1) -> BendabilityResult:
    """Least delta for which some delta-almost q-bent function exists.

    Parity classes ruled out by the mod-4 argument are skipped without a
    search, and a class is not searched twice for the same admissible set.
    """
    if not is_balanced(q):
        raise ValueError("q must be balanced")
    if q.n > 4:
        raise SearchTooLarge("exact bendability needs n <= 4")
    affine = is_affine(q)
    searched: Dict[Tuple[str, FrozenSet[int]], bool] = {}
    log = []
    for delta in range(max_delta + 1):
        hits = []
        for parity in (qt.EVEN, qt.ODD):
            verdict = qt.nonexistence_by_parity(q.n, delta, parity, q_affine=affine)
            entry = {"delta": delta, "parity": parity, "admissible": sorted(verdict.admissible)}
            if verdict.verdict == qt.IMPOSSIBLE:
                log.append({**entry, "action": "skipped", "reason": verdict.reason})
                continue
            key = (parity, verdict.admissible)
            if key in searched and not searched[key]:
                log.append({**entry, "action": "skipped", "reason": "admissible set already searched"})
                continue
            out = find_almost_q_bent(
                SearchTask(q, delta, parity, symmetry_reduction=True, worker_count=jobs)
            )
            searched[key] = out.witness_count > 0
            log.append({**entry, "action": "searched", "witnesses": out.witness_count,
                        "functions_scanned": out.functions_scanned})
            if out.witnesses:
                hits.append(out.witnesses[0])
        if hits:
            return BendabilityResult(delta, max_delta, min(hits, key=lambda t: t.value), tuple(log))
    return BendabilityResult(None, max_delta, None, tuple(log))


# -- PDS brute force ------------------------------------------------------------------


@dataclass(frozen=True)
class FoundPds:
    elements: Tuple[int, ...]
    report: PdsReport


def pds_bruteforce(n: int, k: int, require_lambda_ne_mu: bool, budget: int = 1 << 20) -> List[FoundPds]:
    """Regular nontrivial PDSs among the k-subsets of V_n without 0."""
    total = math.comb((1 << n) - 1, k)
    if total > budget:
        raise SearchTooLarge(f"{total} subsets exceed the budget of {budget}")
    out = []
    for combo in itertools.combinations(range(1, 1 << n), k):
        rep = pds_check(combo, n)
        if not (rep.is_pds and rep.regular and not rep.trivial):
            continue
        if require_lambda_ne_mu and rep.params.lam == rep.params.mu:
            continue
        out.append(FoundPds(combo, rep))
    return out


# -- quadratic forms against q ---------------------------------------------------------


def _ceil_sub_pow(n: int, e2: int) -> int:
    """ceil(2^(e2/2) - 2^(n/2)) for integers, exactly."""
    # x = 2^(e2/2) - 2^(n/2); compare candidates by squaring both halves
    lo = math.isqrt(1 << e2) - math.isqrt(1 << n) - 2
    c = lo
    while not _le_pow_diff(n, e2, c):
        c += 1
    return c


def _le_pow_diff(n: int, e2: int, c: int) -> bool:
    """2^(e2/2) - 2^(n/2) <= c, i.e. 2^(e2/2) <= c + 2^(n/2)."""
    # both sides may be irrational; square after isolating: a <= c + b with a,b >= 0
    a2, b2 = 1 << e2, 1 << n
    if c >= 0:
        # a <= c + b  <=>  a^2 <= c^2 + 2cb + b^2  <=>  a^2 - c^2 - b^2 <= 2cb
        lhs = a2 - c * c - b2
        return lhs <= 0 or lhs * lhs <= 4 * c * c * b2
    # c < 0: a - c' <= ... with c' = -c > 0: a + c' <= b
    cp = -c
    # a + cp <= b  <=>  b^2 - a^2 - cp^2 >= 2 cp a
    rhs = b2 - a2 - cp * cp
    return rhs >= 0 and rhs * rhs >= 4 * cp * cp * a2


@dataclass(frozen=True)
class QuadRow:
    rank: int
    form_type: str
    representative: TruthTable
    measured_delta: int
    formula_delta: Optional[int]
    least_even_rank: Optional[int]
    rank_rule_delta: Optional[int]

    @property
    def agrees(self) -> Optional[bool]:
        if self.formula_delta is None:
            return None
        return self.formula_delta == self.measured_delta

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "type": self.form_type,
            "f": self.representative.to_hex(),
            "measured_delta": self.measured_delta,
            "formula_delta": self.formula_delta,
            "least_even_rank": self.least_even_rank,
            "rank_rule_delta": self.rank_rule_delta,
            "agrees": self.agrees,
        }


def quadratic_rank_formula(rank: int, form_type: str, n: int) -> int:
    """Almost-bentness bound for a quadratic f against q = x1x2 + x3 by rank and type."""
    if form_type == TYPE_II:
        return _ceil_sub_pow(n, 2 * n - (rank - 3))
    if rank == 2:
        return _ceil_sub_pow(n, 2 * (n - 1))
    return _ceil_sub_pow(n, 2 * n - (rank - 2))


def quadratic_bentness_table(q: TruthTable, n: Optional[int] = None) -> List[QuadRow]:
    """Measured q-bentness of every quadratic class of rank >= 2, beside the rank rules.

    ``formula_delta`` is the closed form for q of rank 3 and Type II;
    ``rank_rule_delta`` is ceil(2^(n - d/2) - 2^(n/2)) with d the least even
    rank of f + q_A over GL_n.  Both are reported as computed, without
    reconciling them with the measured value.
    """
    n = q.n if n is None else n
    if n != q.n:
        raise ValueError("n does not match q")
    if n > qt.glnf2.MAX_ENUM_N:
        raise SearchTooLarge(f"the table needs n <= {qt.glnf2.MAX_ENUM_N}")
    qc = quad_classify(q)
    q_is_x1x2_x3 = qc.rank == 3 and qc.form_type == TYPE_II
    orb = qt.orbit(q)
    rows = []
    for r in range(2, n + 1):
        for t in ((TYPE_I, TYPE_III) if r % 2 == 0 else (TYPE_II,)):
            f = canonical_quadratic(r, t, n)
            measured = qt.q_bentness(f, q).delta
            ranks = {quad_classify(TruthTable(n, f.value ^ int(u))).rank for u in orb.tables}
            even = sorted(d for d in ranks if d % 2 == 0)
            least = even[0] if even else None
            rule = _ceil_sub_pow(n, 2 * n - least) if least is not None else None
            formula = quadratic_rank_formula(r, t, n) if q_is_x1x2_x3 else None
            rows.append(QuadRow(r, t, f, measured, formula, least, rule))
    return rows
