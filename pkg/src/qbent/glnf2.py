"""Matrices over F_2 and the general linear group GL_n(F_2).

Rows are packed into integers with column ``j`` (0-based) at bit ``n-1-j``, the
same convention as point indices, so the row vector ``a`` maps to ``aA`` =
XOR of the rows selected by the bits of ``a``.

Enumeration order: row 1 runs ascending over nonzero vectors, row ``k`` runs
ascending over vectors outside the span of rows ``1..k-1``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterator, Optional, Sequence

import numpy as np

from .boolfun import TruthTable

MAX_ENUM_N = 5
CACHE_MAGIC = b"GLNF2"
CACHE_VERSION = 1


@dataclass(frozen=True)
class BitMatrix:
    n: int
    rows: tuple

    def __post_init__(self):
        if len(self.rows) != self.n:
            raise ValueError(f"expected {self.n} rows, got {len(self.rows)}")
        limit = 1 << self.n
        if any(not 0 <= r < limit for r in self.rows):
            raise ValueError("row has bits beyond column n-1")

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, tuple(1 << (n - 1 - i) for i in range(n)))

    @classmethod
    def zero(cls, n: int) -> "BitMatrix":
        return cls(n, (0,) * n)

    @classmethod
    def from_text(cls, text: str) -> "BitMatrix":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        n = len(lines)
        if any(len(ln) != n or set(ln) - {"0", "1"} for ln in lines):
            raise ValueError("matrix text must be n lines of n characters '0'/'1'")
        return cls(n, tuple(int(ln, 2) for ln in lines))

    def to_text(self) -> str:
        return "\n".join(format(r, f"0{self.n}b") for r in self.rows)

    @property
    def is_zero(self) -> bool:
        return not any(self.rows)

    def apply(self, a: int) -> int:
        """Index of the row vector aA."""
        out = 0
        for i, r in enumerate(self.rows):
            if (a >> (self.n - 1 - i)) & 1:
                out ^= r
        return out

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        if self.n != other.n:
            raise ValueError("matrix sizes differ")
        return BitMatrix(self.n, tuple(other.apply(r) for r in self.rows))

    def rank(self) -> int:
        return gf2_rank(self.rows)


def gf2_rank(rows: Sequence[int]) -> int:
    """Rank over F_2 of packed rows by Gaussian elimination."""
    work = [r for r in rows if r]
    rank = 0
    while work:
        pivot = max(work)
        top = pivot.bit_length() - 1
        work = [r ^ pivot if (r >> top) & 1 else r for r in work if r != pivot]
        work = [r for r in work if r]
        rank += 1
    return rank


def is_invertible(A: BitMatrix) -> bool:
    return gf2_rank(A.rows) == A.n


def gl_order(n: int) -> int:
    if n < 1:
        raise ValueError("n must be >= 1")
    order = 1
    for i in range(n):
        order *= (1 << n) - (1 << i)
    return order


def _check_enum(n: int) -> None:
    if not 1 <= n <= MAX_ENUM_N:
        raise ValueError(f"GL_n enumeration supports 1 <= n <= {MAX_ENUM_N}; use sampling for n={n}")


@lru_cache(maxsize=4)
def gl_rows(n: int) -> np.ndarray:
    """All of GL_n as an (N, n) uint16 array of packed rows, in enumeration order."""
    _check_enum(n)
    size = 1 << n
    partial = np.zeros((1, 0), dtype=np.uint16)
    span = np.zeros((1, 1), dtype=np.uint16)  # span elements of each partial basis
    for _ in range(n):
        m = partial.shape[0]
        member = np.zeros((m, size), dtype=bool)
        member[np.arange(m)[:, None], span] = True
        parent, vec = np.nonzero(~member)  # row-major: parents in order, vectors ascending
        vec = vec.astype(np.uint16)
        partial = np.concatenate([partial[parent], vec[:, None]], axis=1)
        span = np.concatenate([span[parent], span[parent] ^ vec[:, None]], axis=1)
    partial.flags.writeable = False
    return partial


def enumerate_gl(n: int, first_row: Optional[int] = None) -> Iterator[BitMatrix]:
    """Yield every invertible matrix once, in enumeration order.

    ``first_row`` restricts the stream to one row-1 prefix, giving disjoint
    sub-streams that can be generated independently.
    """
    rows = gl_rows(n)
    if first_row is not None:
        rows = rows[rows[:, 0] == first_row]
    for r in rows:
        yield BitMatrix(n, tuple(int(x) for x in r))


def images(rows: np.ndarray, n: int) -> np.ndarray:
    """For packed matrices (M, n), the (M, 2**n) array of idx(aA) over all a."""
    rows = np.asarray(rows, dtype=np.uint16).reshape(-1, n)
    idx = np.arange(1 << n, dtype=np.uint16)
    out = np.zeros((rows.shape[0], 1 << n), dtype=np.uint16)
    for i in range(n):
        sel = ((idx >> (n - 1 - i)) & 1).astype(bool)
        out[:, sel] ^= rows[:, i : i + 1]
    return out


def act(q: TruthTable, A: BitMatrix) -> TruthTable:
    """The function a -> q(aA)."""
    if q.n != A.n:
        raise ValueError("matrix size does not match the function")
    if not is_invertible(A):
        raise ValueError("act needs an invertible matrix")
    img = images(np.array(A.rows), A.n)[0]
    return TruthTable.from_bits(q.bits[img])


def gl_sampler(n: int, seed: int) -> Iterator[BitMatrix]:
    """Uniform stream over GL_n by rejection sampling.

    Uses numpy's PCG64 generator seeded with ``seed``: each attempt draws n
    integers uniformly in [0, 2**n) as rows and keeps the matrix if invertible.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    while True:
        rows = tuple(int(r) for r in rng.integers(0, 1 << n, size=n, dtype=np.uint64))
        if gf2_rank(rows) == n:
            yield BitMatrix(n, rows)


def sample_gl(n: int, seed: int) -> BitMatrix:
    return next(gl_sampler(n, seed))


# -- disk cache ------------------------------------------------------------


def save_gl_cache(path, n: int) -> Path:
    """Write GL_n in enumeration order: header, then n little-endian u16 rows per matrix."""
    rows = gl_rows(n)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(CACHE_MAGIC + struct.pack("<BBQ", CACHE_VERSION, n, rows.shape[0]))
        fh.write(rows.astype("<u2").tobytes())
    return path


def load_gl_cache(path) -> np.ndarray:
    with open(path, "rb") as fh:
        head = fh.read(len(CACHE_MAGIC) + 10)
        if head[: len(CACHE_MAGIC)] != CACHE_MAGIC:
            raise ValueError("not a GLNF2 cache file")
        version, n, count = struct.unpack("<BBQ", head[len(CACHE_MAGIC) :])
        if version != CACHE_VERSION:
            raise ValueError(f"unsupported cache version {version}")
        data = np.frombuffer(fh.read(), dtype="<u2")
    if data.size != count * n:
        raise ValueError("truncated cache file")
    return data.reshape(count, n).astype(np.uint16)


def cached_gl_rows(n: int, cache_dir=None) -> np.ndarray:
    """GL_n rows, loaded from ``cache_dir`` when present and written there otherwise."""
    if cache_dir is None:
        return gl_rows(n)
    path = Path(cache_dir) / f"gl{n}.glnf2"
    if path.exists():
        return load_gl_cache(path)
    save_gl_cache(path, n)
    return gl_rows(n)
