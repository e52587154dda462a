"""Minterm <-> positive-polarity Reed-Muller coefficient transforms.

Coefficient vectors of length ``2**m`` are stored bit-packed in ``uint64``
words: coefficient ``j`` lives in word ``j // 64`` at bit ``j % 64``.
Index ``j`` names the product of the variables ``x_i`` whose bit ``i`` is
set in ``j``, so index 0 is the constant term and ``2**m - 1`` the full
product ``x_{m-1} ... x_0``.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass

import numpy as np

WORD_BITS = 64
MAX_ORACLE_ORDER = 14

# Lower-half selectors for block sizes 1, 2, 4, ..., 32 inside one word.
_INWORD_MASKS = tuple(
    np.uint64(v)
    for v in (
        0x5555555555555555,
        0x3333333333333333,
        0x0F0F0F0F0F0F0F0F,
        0x00FF00FF00FF00FF,
        0x0000FFFF0000FFFF,
        0x00000000FFFFFFFF,
    )
)


class OrderTooLargeForOracle(ValueError):
    pass


class IndexOutOfRange(ValueError):
    pass


class Basis(enum.Enum):
    MINTERM = "minterm"
    PPRM = "pprm"

    def flipped(self) -> "Basis":
        return Basis.PPRM if self is Basis.MINTERM else Basis.MINTERM


def word_count(m: int) -> int:
    return max(1, (1 << m) // WORD_BITS)


def _tail_mask(m: int) -> np.uint64:
    if m >= 6:
        return np.uint64(0xFFFFFFFFFFFFFFFF)
    return np.uint64((1 << (1 << m)) - 1)


def pack_bits(bits) -> np.ndarray:
    """Pack a 0/1 array of length ``2**m`` (last axis) into uint64 words."""
    bits = np.asarray(bits, dtype=np.uint8)
    size = bits.shape[-1]
    pad = (-size) % WORD_BITS
    if pad:
        bits = np.concatenate(
            [bits, np.zeros(bits.shape[:-1] + (pad,), dtype=np.uint8)], axis=-1
        )
    packed = np.packbits(bits, axis=-1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64, copy=False)


def unpack_bits(words: np.ndarray, m: int) -> np.ndarray:
    """Inverse of :func:`pack_bits`; returns uint8 0/1 values."""
    raw = np.ascontiguousarray(words, dtype="<u8").view(np.uint8)
    bits = np.unpackbits(raw, axis=-1, bitorder="little")
    return bits[..., : 1 << m]


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """GF(2) coefficient vector over ``m`` Boolean variables."""

    m: int
    kind: Basis
    words: np.ndarray

    def __post_init__(self):
        if self.m < 0:
            raise ValueError(f"variable count must be non-negative, got {self.m}")
        words = np.array(self.words, dtype=np.uint64)
        if words.shape != (word_count(self.m),):
            raise ValueError(
                f"expected {word_count(self.m)} words for m={self.m}, got shape {words.shape}"
            )
        if words[-1] & ~_tail_mask(self.m):
            raise ValueError("bits beyond 2**m are set")
        words.flags.writeable = False
        object.__setattr__(self, "words", words)

    @classmethod
    def from_bits(cls, bits, kind: Basis = Basis.MINTERM) -> "CoefficientVector":
        bits = np.asarray(bits)
        size = bits.shape[0]
        m = size.bit_length() - 1
        if bits.ndim != 1 or size != 1 << m:
            raise ValueError(f"length must be a power of two, got {size}")
        if np.any((bits != 0) & (bits != 1)):
            raise ValueError("coefficients must be 0 or 1")
        return cls(m, kind, pack_bits(bits))

    @classmethod
    def zeros(cls, m: int, kind: Basis = Basis.MINTERM) -> "CoefficientVector":
        return cls(m, kind, np.zeros(word_count(m), dtype=np.uint64))

    def to_bits(self) -> np.ndarray:
        return unpack_bits(self.words, self.m)

    def support(self) -> np.ndarray:
        """Ascending indices of the nonzero coefficients, as uint64."""
        return np.flatnonzero(self.to_bits()).astype(np.uint64)

    def popcount(self) -> int:
        return int(np.bitwise_count(self.words).sum())

    def __len__(self):
        return 1 << self.m

    def __getitem__(self, j: int) -> int:
        if not 0 <= j < len(self):
            raise IndexOutOfRange(f"index {j} outside [0, {len(self)})")
        return int((self.words[j // WORD_BITS] >> np.uint64(j % WORD_BITS)) & np.uint64(1))

    def __xor__(self, other: "CoefficientVector") -> "CoefficientVector":
        if (self.m, self.kind) != (other.m, other.kind):
            raise ValueError("operands differ in order or basis")
        return CoefficientVector(self.m, self.kind, self.words ^ other.words)

    def __eq__(self, other):
        if not isinstance(other, CoefficientVector):
            return NotImplemented
        return (
            self.m == other.m
            and self.kind == other.kind
            and bool(np.array_equal(self.words, other.words))
        )

    def __repr__(self):
        shown = "".join(map(str, self.to_bits()[:32]))
        more = "..." if self.m > 5 else ""
        return f"CoefficientVector(m={self.m}, kind={self.kind.value}, bits={shown}{more})"


def butterfly_words(words: np.ndarray, m: int) -> np.ndarray:
    """Block-XOR transform on packed words; leading axes are a batch.

    Pass ``k`` XORs every lower block of size ``2**k`` into the upper block
    next to it. Blocks smaller than a word are handled with masked in-word
    shifts, larger ones by XOR-ing whole word ranges. Returns a new array.
    """
    w = np.array(words, dtype=np.uint64, copy=True)
    if w.shape[-1] != word_count(m):
        raise ValueError(f"expected {word_count(m)} words on the last axis for m={m}")
    for k in range(min(m, 6)):
        w ^= (w & _INWORD_MASKS[k]) << np.uint64(1 << k)
    for k in range(6, m):
        half = 1 << (k - 6)
        blocks = w.reshape(w.shape[:-1] + (-1, 2, half))
        blocks[..., 1, :] ^= blocks[..., 0, :]
    return w


def pprm_forward(v: CoefficientVector) -> CoefficientVector:
    """Apply ``R(m)`` over GF(2); the map is an involution so it also inverts."""
    return CoefficientVector(v.m, v.kind.flipped(), butterfly_words(v.words, v.m))


@functools.lru_cache(maxsize=1)
def kronecker_matrix(m: int) -> np.ndarray:
    """Dense ``R(m)``: the m-fold Kronecker power of [[1, 0], [1, 1]].

    Each step forms ``R(1) (x) R(k)`` as the block matrix [[R, 0], [R, R]].
    """
    if m > MAX_ORACLE_ORDER:
        raise OrderTooLargeForOracle(
            f"dense oracle limited to m <= {MAX_ORACLE_ORDER}, got m={m}"
        )
    r = np.ones((1, 1), dtype=np.uint8)
    for _ in range(m):
        h = r.shape[0]
        nxt = np.zeros((2 * h, 2 * h), dtype=np.uint8)
        nxt[:h, :h] = r
        nxt[h:, :h] = r
        nxt[h:, h:] = r
        r = nxt
    r.flags.writeable = False
    return r


def pprm_naive_bits(bits: np.ndarray) -> np.ndarray:
    """Dense-matrix transform of a batch of unpacked vectors, shape (batch, 2**m).

    Each output coefficient is the XOR-reduction of a row of ``R(m)`` AND-ed
    with the input. Row blocks go through float32 GEMM; the integer sums stay
    below 2**24, so the parity is exact. ``R(m)`` is lower triangular, so a
    row block ending at ``hi`` only needs the first ``hi`` columns.
    """
    bits = np.atleast_2d(np.asarray(bits, dtype=np.uint8))
    size = bits.shape[-1]
    m = size.bit_length() - 1
    if size != 1 << m:
        raise ValueError(f"length must be a power of two, got {size}")
    r = kronecker_matrix(m)
    rhs = bits.T.astype(np.float32)
    out = np.empty((size, bits.shape[0]), dtype=np.uint8)
    chunk = max(1, (1 << 24) // size)
    for lo in range(0, size, chunk):
        hi = min(lo + chunk, size)
        sums = r[lo:hi, :hi].astype(np.float32) @ rhs[:hi]
        out[lo:hi] = sums.astype(np.int64) & 1
    return out.T


def pprm_naive(v: CoefficientVector) -> CoefficientVector:
    if v.m > MAX_ORACLE_ORDER:
        raise OrderTooLargeForOracle(
            f"dense oracle limited to m <= {MAX_ORACLE_ORDER}, got m={v.m}"
        )
    b = pprm_naive_bits(v.to_bits()[None, :])[0]
    return CoefficientVector(v.m, v.kind.flipped(), pack_bits(b))


def term_literals(j: int, m: int) -> frozenset[int]:
    """Variables present in the product term with coefficient index ``j``."""
    if not 0 <= j < 1 << m:
        raise IndexOutOfRange(f"term index {j} outside [0, 2**{m})")
    return frozenset(i for i in range(m) if j >> i & 1)
