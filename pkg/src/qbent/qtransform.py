"""q-transform coefficients over GL_n(F_2) plus the zero matrix.

W_q(f)(A) = W(f, q_A) depends on A only through the table q_A, so exact
spectra are computed over the distinct tables in the GL_n-orbit of q, each
weighted by how many matrices produce it.  Orbit entries are kept in order of
the first matrix (in enumeration order) that yields them, so early-abort
depths and worst-case witnesses refer to the same matrix a plain sequential
scan would stop at.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Tuple

import numpy as np

from . import glnf2
from .boolfun import TruthTable, correlation, imbalance, is_balanced, weight
from .glnf2 import BitMatrix

EVEN = "even"
ODD = "odd"
IMPOSSIBLE = "IMPOSSIBLE"
UNDECIDED = "UNDECIDED-BY-THIS-ARGUMENT"

_CHUNK = 1 << 18


# -- exact comparisons against 2^(n/2) --------------------------------------


def omega_floor(n: int) -> int:
    """floor(2^(n/2))."""
    return math.isqrt(1 << n)


def within(a: int, delta: int, n: int) -> bool:
    """|a - 2^(n/2)| <= delta for a >= 0, in integers only."""
    two_n = 1 << n
    return (a + delta) ** 2 >= two_n and (a <= delta or (a - delta) ** 2 <= two_n)


def deviation(a: int, n: int) -> int:
    """Least integer delta >= 0 with |a - 2^(n/2)| <= delta."""
    a = abs(a)
    s = omega_floor(n)
    if a * a >= (1 << n):
        return a - s
    return (s if s * s == (1 << n) else s + 1) - a


# -- orbits ------------------------------------------------------------------


@dataclass(frozen=True)
class Orbit:
    """Distinct tables g_A over GL_n, ordered by first occurrence."""

    n: int
    tables: np.ndarray  # uint64 packed truth tables
    counts: np.ndarray  # number of matrices giving each table
    first: np.ndarray  # enumeration index of the first such matrix

    def matrix(self, i: int) -> BitMatrix:
        rows = glnf2.gl_rows(self.n)[int(self.first[i])]
        return BitMatrix(self.n, tuple(int(r) for r in rows))


def _tables_for(gbits: np.ndarray, rows: np.ndarray, n: int) -> np.ndarray:
    """Packed tables of a -> g(aA) for each packed matrix in ``rows``."""
    size = 1 << n
    rows = np.asarray(rows, dtype=np.uint16)
    imgs = [np.zeros(rows.shape[0], dtype=np.uint16)]
    tables = np.zeros(rows.shape[0], dtype=np.uint64)
    if gbits[0]:
        tables |= np.uint64(1) << np.uint64(size - 1)
    for a in range(1, size):
        low = (a & -a).bit_length() - 1  # bit position in idx; row n-1-low
        img = imgs[a & (a - 1)] ^ rows[:, n - 1 - low]
        imgs.append(img)
        tables |= gbits[img].astype(np.uint64) << np.uint64(size - 1 - a)
    return tables


def _orbit_chunk(gbits: np.ndarray, rows: np.ndarray, n: int, start: int):
    tables = _tables_for(gbits, rows, n)
    uniq, first, counts = np.unique(tables, return_index=True, return_counts=True)
    return uniq, first + start, counts


_ORBITS: "OrderedDict[Tuple[int, int], Orbit]" = OrderedDict()
_ORBIT_CACHE_SIZE = 64


def orbit(g: TruthTable, jobs: int = 1) -> Orbit:
    key = (g.n, g.value)
    if key in _ORBITS:
        _ORBITS.move_to_end(key)
        return _ORBITS[key]
    orb = _compute_orbit(g.n, g.value, max(1, jobs))
    _ORBITS[key] = orb
    if len(_ORBITS) > _ORBIT_CACHE_SIZE:
        _ORBITS.popitem(last=False)
    return orb


def _compute_orbit(n: int, value: int, jobs: int) -> Orbit:
    rows = glnf2.gl_rows(n)
    gbits = np.asarray(TruthTable(n, value).bits)
    starts = range(0, rows.shape[0], _CHUNK)
    work = lambda s: _orbit_chunk(gbits, rows[s : s + _CHUNK], n, s)  # noqa: E731
    if jobs > 1 and len(starts) > 1:
        with ThreadPoolExecutor(jobs) as pool:
            parts = list(pool.map(work, starts))
    else:
        parts = [work(s) for s in starts]
    # merge is order independent: first index is a min, counts add
    tables = np.concatenate([p[0] for p in parts])
    firsts = np.concatenate([p[1] for p in parts])
    counts = np.concatenate([p[2] for p in parts])
    uniq, inv = np.unique(tables, return_inverse=True)
    first = np.full(uniq.size, np.iinfo(np.int64).max, dtype=np.int64)
    np.minimum.at(first, inv, firsts)
    total = np.zeros(uniq.size, dtype=np.int64)
    np.add.at(total, inv, counts)
    order = np.argsort(first, kind="stable")
    out = Orbit(n, uniq[order], total[order], first[order])
    for arr in (out.tables, out.counts, out.first):
        arr.flags.writeable = False
    return out


def coefficients(f: TruthTable, orb: Orbit) -> np.ndarray:
    """W(f, u) for every orbit table u."""
    diff = np.bitwise_xor(orb.tables, np.uint64(f.value))
    return (1 << f.n) - 2 * np.bitwise_count(diff).astype(np.int64)


# -- coefficients and spectra --------------------------------------------------


def _check_pair(f: TruthTable, q: TruthTable) -> None:
    if f.n != q.n:
        raise ValueError(f"variable counts differ: {f.n} != {q.n}")


def _check_balanced(q: TruthTable) -> None:
    if not is_balanced(q):
        raise ValueError("q must be balanced")


def q_coeff(f: TruthTable, q: TruthTable, A: BitMatrix) -> int:
    """W_q(f)(A); the zero matrix gives the imbalance of f."""
    _check_pair(f, q)
    if A.n != f.n:
        raise ValueError("matrix size does not match the functions")
    if A.is_zero:
        return imbalance(f)
    return correlation(f, glnf2.act(q, A))


@dataclass(frozen=True)
class QSpectrum:
    n: int
    zero_coeff: int
    histogram: Tuple[Tuple[int, int], ...]  # (value, count) over GL_n, sorted by value
    gl_total: int

    def abs_values(self) -> set:
        """Set of |W_q(f)(A)| over GL_n and the zero matrix."""
        return {abs(v) for v, _ in self.histogram} | {abs(self.zero_coeff)}

    def to_json(self, f: TruthTable, q: TruthTable) -> dict:
        return {
            "n": self.n,
            "q": q.to_hex(),
            "f": f.to_hex(),
            "zero_coeff": self.zero_coeff,
            "histogram": [[v, json_int(c)] for v, c in self.histogram],
            "gl_total": json_int(self.gl_total),
        }


def json_int(x: int):
    """Exact integer for JSON: strings beyond 2^53."""
    return str(x) if abs(x) > (1 << 53) else x


def _histogram(values: np.ndarray, counts: np.ndarray) -> Tuple[Tuple[int, int], ...]:
    hist: Dict[int, int] = {}
    for v, c in zip(values.tolist(), counts.tolist()):
        hist[v] = hist.get(v, 0) + c
    return tuple(sorted(hist.items()))


def q_spectrum(f: TruthTable, q: TruthTable, jobs: int = 1) -> QSpectrum:
    _check_pair(f, q)
    if f.n > glnf2.MAX_ENUM_N:
        raise ValueError(f"exact spectra need n <= {glnf2.MAX_ENUM_N}; use estimate_spectrum")
    orb = orbit(q, jobs)
    vals = coefficients(f, orb)
    return QSpectrum(f.n, imbalance(f), _histogram(vals, orb.counts), glnf2.gl_order(f.n))


def is_q_bent(f: TruthTable, q: TruthTable) -> bool:
    _check_pair(f, q)
    if f.n % 2:
        raise ValueError("q-bentness needs even n")
    _check_balanced(q)
    target = 1 << (f.n // 2)
    if abs(imbalance(f)) != target:
        return False
    orb = orbit(q)
    size = 1 << f.n
    fv = np.uint64(f.value)
    for start in range(0, orb.tables.size, 4096):
        w = size - 2 * np.bitwise_count(orb.tables[start : start + 4096] ^ fv).astype(np.int64)
        if np.any(np.abs(w) != target):
            return False
    return True


@dataclass(frozen=True)
class BentnessReport:
    delta: int
    witness_worst: BitMatrix  # the zero matrix when the imbalance is worst
    spectrum: Optional[QSpectrum]
    exceeded: bool = False  # True: aborted early, delta is only a lower bound
    matrices_examined: int = 0


def deviation_table(n: int) -> np.ndarray:
    """deviation(a, n) for a = 0..2^n."""
    return np.array([deviation(a, n) for a in range((1 << n) + 1)], dtype=np.int64)


def q_bentness(f: TruthTable, q: TruthTable, abort_above: Optional[int] = None) -> BentnessReport:
    """Least delta with f delta-almost q-bent, scanning 0 then GL_n in enumeration order."""
    _check_pair(f, q)
    _check_balanced(q)
    n = f.n
    zero = BitMatrix.zero(n)
    zdev = deviation(imbalance(f), n)
    if abort_above is not None and zdev > abort_above:
        return BentnessReport(zdev, zero, None, exceeded=True, matrices_examined=0)
    orb = orbit(q)
    devs = deviation_table(n)[np.abs(coefficients(f, orb))]
    if abort_above is not None:
        bad = np.flatnonzero(devs > abort_above)
        if bad.size:
            i = int(bad[0])
            return BentnessReport(
                int(devs[i]), orb.matrix(i), None, exceeded=True,
                matrices_examined=int(orb.first[i]) + 1,
            )
    spec = q_spectrum(f, q)
    worst = int(devs.max()) if devs.size else 0
    if zdev >= worst:
        witness = zero
    else:
        witness = orb.matrix(int(np.argmax(devs)))  # first occurrence: lowest enumeration index
    return BentnessReport(max(zdev, worst), witness, spec, matrices_examined=spec.gl_total)


# -- expectations --------------------------------------------------------------


@dataclass(frozen=True)
class OmegaWeights:
    n: int
    weight_gl: Fraction
    weight_zero: Fraction


def omega_weights(n: int) -> OmegaWeights:
    size = 1 << n
    N = glnf2.gl_order(n)
    return OmegaWeights(n, Fraction(size - 1, size * N), Fraction(1, size))


def expectation_prime_sq(f: TruthTable, q: TruthTable) -> Fraction:
    """Mean of W_q(f)(A)^2 over GL_n."""
    _check_balanced(q)
    spec = q_spectrum(f, q)
    return Fraction(sum(v * v * c for v, c in spec.histogram), spec.gl_total)


def expectation_omega_sq(f: TruthTable, q: TruthTable) -> Fraction:
    """omega-weighted mean of W_q(f)(A)^2 over GL_n and the zero matrix."""
    _check_balanced(q)
    spec = q_spectrum(f, q)
    w = omega_weights(f.n)
    total = sum(v * v * c for v, c in spec.histogram)
    return w.weight_gl * total + w.weight_zero * spec.zero_coeff ** 2


def expectation_prime_formula(f: TruthTable) -> Fraction:
    size = 1 << f.n
    return Fraction(size * size - imbalance(f) ** 2, size - 1)


# -- parity arguments ------------------------------------------------------------


def parity_of(f: TruthTable) -> str:
    return ODD if weight(f) % 2 else EVEN


def admissible_values(n: int, delta: int, weight_parity: str) -> frozenset:
    """Values |W| allowed for a delta-almost q-bent f of the given weight parity."""
    if weight_parity not in (EVEN, ODD):
        raise ValueError("weight_parity must be 'even' or 'odd'")
    residue = 0 if weight_parity == EVEN else 2
    hi = omega_floor(n) + 1 + delta
    return frozenset(a for a in range(residue, hi + 1, 4) if within(a, delta, n))


@dataclass(frozen=True)
class ParityVerdict:
    verdict: str
    admissible: frozenset
    reason: str


def nonexistence_by_parity(n: int, delta: int, weight_parity: str, q_affine: bool = False) -> ParityVerdict:
    """Rule out delta-almost q-bent functions of one weight parity from the mod-4 law.

    IMPOSSIBLE when no admissible value exists, when every admissible value
    lies strictly on one side of 2^(n/2) (so the omega-mean of W^2 cannot be
    2^n), or when the only admissible value is 2^(n/2) itself with n >= 4
    even and q non-affine (no q-bent functions).
    """
    adm = admissible_values(n, delta, weight_parity)
    two_n = 1 << n
    if not adm:
        return ParityVerdict(IMPOSSIBLE, adm, "no value of the required residue mod 4 is within delta")
    if max(adm) ** 2 < two_n:
        return ParityVerdict(IMPOSSIBLE, adm, "all admissible values are below 2^(n/2), so E[W^2] < 2^n")
    if min(adm) ** 2 > two_n:
        return ParityVerdict(IMPOSSIBLE, adm, "all admissible values are above 2^(n/2), so E[W^2] > 2^n")
    if adm == {omega_floor(n)} and n % 2 == 0 and n >= 4 and not q_affine:
        return ParityVerdict(IMPOSSIBLE, adm, "forces |W| = 2^(n/2) everywhere, i.e. q-bent, which is impossible for non-affine q")
    return ParityVerdict(UNDECIDED, adm, "admissible values straddle 2^(n/2)")


# -- support overlaps --------------------------------------------------------------


def support_overlap_range(f: TruthTable, q: TruthTable) -> Tuple[int, int]:
    """Min and max of |supp(f_A) & supp(q)| over A in GL_n."""
    _check_pair(f, q)
    orb = orbit(f)
    overlap = np.bitwise_count(orb.tables & np.uint64(q.value))
    return int(overlap.min()), int(overlap.max())


# -- sampling beyond enumeration ---------------------------------------------------


@dataclass(frozen=True)
class SpectrumEstimate:
    n: int
    samples: int
    seed: int
    zero_coeff: int
    histogram: Tuple[Tuple[int, int], ...]
    mean_sq: float
    ci95: Tuple[float, float]
    expected_mean_sq: Fraction = field(default=Fraction(0))


def estimate_spectrum(f: TruthTable, q: TruthTable, samples: int, seed: int) -> SpectrumEstimate:
    """Monte Carlo estimate of the GL_n spectrum from uniformly sampled matrices."""
    _check_pair(f, q)
    values = []
    for _, A in zip(range(samples), glnf2.gl_sampler(f.n, seed)):
        values.append(correlation(f, glnf2.act(q, A)))
    arr = np.array(values, dtype=np.float64) ** 2
    mean = float(arr.mean())
    half = 1.96 * float(arr.std(ddof=1)) / math.sqrt(samples) if samples > 1 else float("inf")
    hist: Dict[int, int] = {}
    for v in values:
        hist[v] = hist.get(v, 0) + 1
    return SpectrumEstimate(
        f.n, samples, seed, imbalance(f), tuple(sorted(hist.items())), mean,
        (mean - half, mean + half), expectation_prime_formula(f) if is_balanced(q) else Fraction(0),
    )


__all__ = [
    "EVEN", "ODD", "IMPOSSIBLE", "UNDECIDED", "Orbit", "QSpectrum", "BentnessReport",
    "OmegaWeights", "ParityVerdict", "SpectrumEstimate", "omega_floor", "within", "deviation",
    "orbit", "coefficients", "q_coeff", "q_spectrum", "is_q_bent", "q_bentness",
    "omega_weights", "expectation_prime_sq", "expectation_omega_sq", "expectation_prime_formula",
    "admissible_values", "nonexistence_by_parity", "support_overlap_range", "estimate_spectrum",
    "parity_of",
]
