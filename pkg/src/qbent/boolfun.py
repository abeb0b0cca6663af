"""Boolean functions on V_n as packed truth tables.

A function ``f`` on ``n`` variables is stored as a single Python integer whose
binary expansion, read most-significant bit first and padded to ``2**n``
digits, is the truth table ``f(idx 0) f(idx 1) ... f(idx 2**n - 1)``.  Point
``a = (a_1, ..., a_n)`` has index ``sum(a_i * 2**(n - i))`` so the string
``"1100"`` names ``a_1 = a_2 = 1, a_3 = a_4 = 0``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import FrozenSet, Iterable, Optional

import numpy as np

MAX_VARS = 16


class AnfSyntaxError(ValueError):
    """Raised when an ANF expression cannot be parsed."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_VARS:
        raise ValueError(f"number of variables must be in 1..{MAX_VARS}, got {n}")


def vector_str(a: int, n: int) -> str:
    """Render point index ``a`` as the string a_1 a_2 ... a_n."""
    return format(a, f"0{n}b")


def parse_vector(text: str, n: Optional[int] = None) -> int:
    text = text.strip()
    if not text or set(text) - {"0", "1"}:
        raise ValueError(f"not a binary vector: {text!r}")
    if n is not None and len(text) != n:
        raise ValueError(f"vector {text!r} does not have length {n}")
    return int(text, 2)


@dataclass(frozen=True)
class TruthTable:
    n: int
    value: int

    def __post_init__(self):
        _check_n(self.n)
        if not 0 <= self.value < (1 << self.size):
            raise ValueError("truth table value does not fit in 2**n bits")

    @property
    def size(self) -> int:
        return 1 << self.n

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "TruthTable":
        return cls(n, 0)

    @classmethod
    def one(cls, n: int) -> "TruthTable":
        return cls(n, (1 << (1 << n)) - 1)

    @classmethod
    def from_bits(cls, bits: Iterable[int], n: Optional[int] = None) -> "TruthTable":
        arr = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits, dtype=np.uint8)
        size = arr.size
        if size == 0 or size & (size - 1):
            raise ValueError("truth table length must be a power of two")
        m = size.bit_length() - 1
        if n is not None and n != m:
            raise ValueError(f"table of length {size} does not match n={n}")
        if np.any(arr > 1):
            raise ValueError("truth table entries must be 0 or 1")
        return cls(m, _pack(arr))

    @classmethod
    def from_hex(cls, text: str, n: int) -> "TruthTable":
        """Parse the big-endian hex format; idx 0 is the top bit of the first digit.

        For n < 2 the table is left-aligned inside a single hex digit.
        """
        _check_n(n)
        size = 1 << n
        digits = max(1, size // 4)
        text = text.strip().lower().removeprefix("0x")
        if len(text) != digits:
            raise ValueError(f"expected {digits} hex digits for n={n}, got {len(text)}")
        raw = int(text, 16)
        pad = 4 * digits - size
        if raw & ((1 << pad) - 1):
            raise ValueError("padding bits must be zero")
        return cls(n, raw >> pad)

    @classmethod
    def from_callable(cls, n: int, func) -> "TruthTable":
        """Build from ``func(a)`` where ``a`` is the tuple (a_1, ..., a_n)."""
        _check_n(n)
        bits = []
        for idx in range(1 << n):
            a = tuple((idx >> (n - 1 - i)) & 1 for i in range(n))
            bits.append(int(func(a)) & 1)
        return cls.from_bits(bits)

    @classmethod
    def from_anf_text(cls, text: str, n: int) -> "TruthTable":
        return from_anf(parse_anf(text, n))

    # -- views --------------------------------------------------------------

    @cached_property
    def bits(self) -> np.ndarray:
        """Truth table as a read-only uint8 array indexed by idx(a)."""
        arr = _unpack(self.value, self.size)
        arr.flags.writeable = False
        return arr

    def __call__(self, a: int) -> int:
        return (self.value >> (self.size - 1 - a)) & 1

    def __xor__(self, other: "TruthTable") -> "TruthTable":
        _same_n(self, other)
        return TruthTable(self.n, self.value ^ other.value)

    __add__ = __xor__

    def complement(self) -> "TruthTable":
        return TruthTable(self.n, self.value ^ ((1 << self.size) - 1))

    def to_hex(self) -> str:
        digits = max(1, self.size // 4)
        pad = 4 * digits - self.size
        return format(self.value << pad, f"0{digits}x")

    def to_bitstring(self) -> str:
        return format(self.value, f"0{self.size}b")

    def __repr__(self) -> str:
        return f"TruthTable(n={self.n}, hex={self.to_hex()})"


def _pack(arr: np.ndarray) -> int:
    size = arr.size
    packed = np.packbits(arr, bitorder="big").tobytes()
    return int.from_bytes(packed, "big") >> ((-size) % 8)


def _unpack(value: int, size: int) -> np.ndarray:
    nbytes = (size + 7) // 8
    raw = (value << ((-size) % 8)).to_bytes(nbytes, "big")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="big")[:size].copy()


def _same_n(f: TruthTable, g: TruthTable) -> None:
    if f.n != g.n:
        raise ValueError(f"variable counts differ: {f.n} != {g.n}")


# -- weight and distance ---------------------------------------------------


def weight(f: TruthTable) -> int:
    return f.value.bit_count()


def support(f: TruthTable) -> FrozenSet[int]:
    """Support as a set of point indices; render with :func:`vector_str`."""
    return frozenset(int(i) for i in np.flatnonzero(f.bits))


def imbalance(f: TruthTable) -> int:
    return f.size - 2 * weight(f)


def is_balanced(f: TruthTable) -> bool:
    return 2 * weight(f) == f.size


def distance(f: TruthTable, g: TruthTable) -> int:
    _same_n(f, g)
    return (f.value ^ g.value).bit_count()


def correlation(f: TruthTable, g: TruthTable) -> int:
    """W(f, g) = sum over a of (-1)^(f(a) + g(a))."""
    return f.size - 2 * distance(f, g)


# -- Walsh-Hadamard --------------------------------------------------------


@dataclass(frozen=True)
class WalshSpectrum:
    n: int
    coeffs: tuple

    def __getitem__(self, v: int) -> int:
        return self.coeffs[v]

    def max_abs(self) -> int:
        return max(abs(c) for c in self.coeffs)


def fwht(values: np.ndarray) -> np.ndarray:
    """Unnormalised in-place-style butterfly on an integer vector (returns a copy)."""
    a = np.array(values, dtype=np.int64)
    size = a.size
    h = 1
    while h < size:
        a = a.reshape(-1, 2, h)
        x = a[:, 0, :].copy()
        y = a[:, 1, :]
        a[:, 0, :] += y
        a[:, 1, :] = x - y
        a = a.reshape(size)
        h *= 2
    return a


def signs(f: TruthTable) -> np.ndarray:
    return 1 - 2 * f.bits.astype(np.int64)


def walsh_transform(f: TruthTable) -> WalshSpectrum:
    return WalshSpectrum(f.n, tuple(int(c) for c in fwht(signs(f))))


def is_bent(f: TruthTable) -> bool:
    if f.n % 2:
        return False
    target = 1 << (f.n // 2)
    return all(abs(c) == target for c in walsh_transform(f).coeffs)


def autocorrelation(f: TruthTable) -> tuple:
    """Entry idx(e) is sum over x of (-1)^(f(x) + f(x + e))."""
    w = fwht(signs(f))
    return tuple(int(c) >> f.n for c in fwht(w * w))


# -- algebraic normal form -------------------------------------------------


@dataclass(frozen=True)
class AnfPoly:
    """Sum over F_2 of monomials; each monomial is a frozenset of 1-based variable indices."""

    n: int
    monomials: FrozenSet[FrozenSet[int]]

    def __post_init__(self):
        _check_n(self.n)
        for m in self.monomials:
            if any(not 1 <= i <= self.n for i in m):
                raise ValueError(f"monomial {sorted(m)} uses a variable outside 1..{self.n}")

    @classmethod
    def from_terms(cls, n: int, terms: Iterable[Iterable[int]]) -> "AnfPoly":
        acc: set = set()
        for t in terms:
            acc ^= {frozenset(t)}
        return cls(n, frozenset(acc))

    @property
    def degree(self) -> int:
        """Maximum monomial size; -1 for the zero polynomial."""
        return max((len(m) for m in self.monomials), default=-1)

    @property
    def is_affine(self) -> bool:
        return self.degree <= 1

    def __str__(self) -> str:
        if not self.monomials:
            return "0"
        ordered = sorted(self.monomials, key=lambda m: (len(m), sorted(m)))
        return "+".join("".join(f"x{i}" for i in sorted(m)) if m else "1" for m in ordered)


def _mobius(bits: np.ndarray) -> np.ndarray:
    a = np.array(bits, dtype=np.uint8)
    size = a.size
    h = 1
    while h < size:
        a = a.reshape(-1, 2, h)
        a[:, 1, :] ^= a[:, 0, :]
        a = a.reshape(size)
        h *= 2
    return a


def _mask_to_monomial(mask: int, n: int) -> FrozenSet[int]:
    return frozenset(i for i in range(1, n + 1) if (mask >> (n - i)) & 1)


def _monomial_to_mask(mono: Iterable[int], n: int) -> int:
    mask = 0
    for i in mono:
        mask |= 1 << (n - i)
    return mask


def to_anf(f: TruthTable) -> AnfPoly:
    coeffs = _mobius(f.bits)
    return AnfPoly(f.n, frozenset(_mask_to_monomial(int(m), f.n) for m in np.flatnonzero(coeffs)))


def from_anf(p: AnfPoly) -> TruthTable:
    coeffs = np.zeros(1 << p.n, dtype=np.uint8)
    for m in p.monomials:
        coeffs[_monomial_to_mask(m, p.n)] ^= 1
    return TruthTable.from_bits(_mobius(coeffs))


def degree(f: TruthTable) -> int:
    return to_anf(f).degree


def is_affine(f: TruthTable) -> bool:
    return degree(f) <= 1


_TOKEN = re.compile(r"\s*(?:(x)(\d+)|([01])|(\+)|(\*)|(\S))")


def parse_anf(text: str, n: int) -> AnfPoly:
    """Parse ``expr := term ('+' term)*``, ``term := factor ('*'? factor)*``.

    A factor is ``x<INDEX>``, ``1`` or ``0``.  Whitespace between tokens is
    ignored and repeated monomials cancel in pairs.
    """
    _check_n(n)
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace is left
            break
        start = m.start(m.lastindex)
        if m.group(1):
            index = int(m.group(2))
            if not 1 <= index <= n:
                raise AnfSyntaxError(f"variable index x{index} out of range 1..{n}", start)
            tokens.append(("var", index, start))
        elif m.group(3):
            tokens.append(("const", int(m.group(3)), start))
        elif m.group(4):
            tokens.append(("+", None, start))
        elif m.group(5):
            tokens.append(("*", None, start))
        else:
            raise AnfSyntaxError(f"unexpected character {m.group(6)!r}", start)
        pos = m.end()
    end = len(text)

    terms = []
    i = 0

    def factor(i):
        if i >= len(tokens):
            raise AnfSyntaxError("expected a factor", end)
        kind, val, where = tokens[i]
        if kind not in ("var", "const"):
            raise AnfSyntaxError(f"expected a factor, found {kind!r}", where)
        return (kind, val), i + 1

    while True:
        fac, i = factor(i)
        vars_: set = set()
        zero = False

        def absorb(fac):
            nonlocal zero
            kind, val = fac
            if kind == "var":
                vars_.add(val)
            elif val == 0:
                zero = True

        absorb(fac)
        while i < len(tokens) and tokens[i][0] != "+":
            if tokens[i][0] == "*":
                i += 1
            fac, i = factor(i)
            absorb(fac)
        if not zero:
            terms.append(vars_)
        if i == len(tokens):
            break
        i += 1  # consume '+'
        if i == len(tokens):
            raise AnfSyntaxError("expected a term after '+'", end)
    return AnfPoly.from_terms(n, terms)


# -- quadratic forms -------------------------------------------------------

TYPE_I = "I"
TYPE_II = "II"
TYPE_III = "III"
DEGENERATE = "DEGENERATE"


@dataclass(frozen=True)
class QuadClass:
    rank: int
    form_type: str
    predicted_imbalance: int


def quad_classify(f: TruthTable) -> QuadClass:
    """Rank and type of a function of degree at most 2.

    Repeatedly takes the lowest quadratic term x_i x_j, writes
    f = (x_i + L_j)(x_j + L_i) + L_i L_j + R and continues on L_i L_j + R,
    which no longer involves x_i or x_j.  What remains is an affine function:
    non-constant gives Type II, constant 0 Type I, constant 1 Type III.
    """
    p = to_anf(f)
    if p.degree > 2:
        raise ValueError(f"quad_classify needs degree <= 2, got {p.degree}")
    n = f.n
    quad = {tuple(sorted(m)) for m in p.monomials if len(m) == 2}
    lin = {next(iter(m)) for m in p.monomials if len(m) == 1}
    const = int(frozenset() in p.monomials)

    pairs = 0
    while quad:
        i, j = min(quad)
        quad.discard((i, j))
        # L_i: partners of x_i other than x_j, plus the linear coefficient of x_i
        li = {b if a == i else a for (a, b) in quad if i in (a, b)}
        lj = {b if a == j else a for (a, b) in quad if j in (a, b)}
        li_c = int(i in lin)
        lj_c = int(j in lin)
        quad = {t for t in quad if i not in t and j not in t}
        lin.discard(i)
        lin.discard(j)
        # add L_i * L_j, where each L is a linear form plus constant
        for a in li:
            for b in lj:
                if a == b:
                    lin ^= {a}
                else:
                    quad ^= {(min(a, b), max(a, b))}
        if lj_c:
            lin ^= li
        if li_c:
            lin ^= lj
        const ^= li_c & lj_c
        pairs += 1

    if lin:
        rank, form_type, imb = 2 * pairs + 1, TYPE_II, 0
    else:
        rank = 2 * pairs
        imb = (1 << (n - pairs)) * (-1 if const else 1)
        if pairs == 0:
            form_type = DEGENERATE
        else:
            form_type = TYPE_III if const else TYPE_I
    return QuadClass(rank, form_type, imb)


def bent_block(m: int, n: int) -> TruthTable:
    """B_m = x1x2 + x3x4 + ... + x_{m-1}x_m on n variables (m even)."""
    if m % 2 or m > n:
        raise ValueError("B_m needs even m <= n")
    return from_anf(AnfPoly.from_terms(n, [(i, i + 1) for i in range(1, m, 2)]))


def canonical_quadratic(rank: int, form_type: str, n: int) -> TruthTable:
    """Representative of a class in the classification table."""
    if form_type == TYPE_I:
        return bent_block(rank, n)
    if form_type == TYPE_II:
        terms = [(i, i + 1) for i in range(1, rank - 1, 2)] + [(rank,)]
        return from_anf(AnfPoly.from_terms(n, terms))
    if form_type == TYPE_III:
        terms = [(i, i + 1) for i in range(1, rank, 2)] + [(rank - 1,), (rank,)]
        return from_anf(AnfPoly.from_terms(n, terms))
    raise ValueError(f"no canonical form for {form_type}")
