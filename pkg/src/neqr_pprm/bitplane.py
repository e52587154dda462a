"""Grayscale image ingestion and bitplane decomposition.

Pixel ``(Y, X)`` of a ``2**n x 2**n`` image sits at index ``k = Y * 2**n + X``.
Bit ``i`` of pixel ``k`` becomes coefficient ``k`` of plane ``i``, which is the
minterm coefficient vector of grayscale qubit ``i``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .rm_transform import Basis, CoefficientVector, pack_bits, unpack_bits

MAX_ORDER = 16
MAX_DEPTH = 16

_GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_U64 = (1 << 64) - 1


class OrderOutOfRange(ValueError):
    pass


class DepthOutOfRange(ValueError):
    pass


class PgmError(ValueError):
    """Base class for NetPBM grayscale parse failures."""


class UnsupportedMagic(PgmError):
    pass


class MalformedHeader(PgmError):
    pass


class NonSquare(PgmError):
    pass


class NonPowerOfTwoDimension(PgmError):
    pass


class TruncatedData(PgmError):
    pass


class PixelOutOfRange(PgmError):
    pass


def _check_order(n):
    if not 1 <= n <= MAX_ORDER:
        raise OrderOutOfRange(f"order n={n} outside [1, {MAX_ORDER}]")


def _check_depth(q):
    if not 1 <= q <= MAX_DEPTH:
        raise DepthOutOfRange(f"bit depth q={q} outside [1, {MAX_DEPTH}]")


@dataclass(frozen=True, eq=False)
class GrayImage:
    n: int
    q: int
    pixels: np.ndarray

    def __post_init__(self):
        _check_order(self.n)
        _check_depth(self.q)
        pixels = np.asarray(self.pixels)
        if pixels.ndim != 1 or pixels.shape[0] != 1 << (2 * self.n):
            raise ValueError(
                f"expected {1 << (2 * self.n)} pixels for n={self.n}, got shape {pixels.shape}"
            )
        if pixels.size and (pixels.min() < 0 or pixels.max() >= 1 << self.q):
            raise ValueError(f"pixel values must lie in [0, {(1 << self.q) - 1}]")
        pixels = pixels.astype(np.uint32)
        pixels.flags.writeable = False
        object.__setattr__(self, "pixels", pixels)

    @property
    def side(self) -> int:
        return 1 << self.n

    @property
    def m(self) -> int:
        """Number of coordinate (control) qubits."""
        return 2 * self.n

    def pixel(self, y: int, x: int) -> int:
        return int(self.pixels[(y << self.n) | x])

    def as_array(self) -> np.ndarray:
        return self.pixels.reshape(self.side, self.side)

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return (
            self.n == other.n
            and self.q == other.q
            and bool(np.array_equal(self.pixels, other.pixels))
        )

    def __repr__(self):
        return f"GrayImage(n={self.n}, q={self.q}, pixels={self.pixels[:8].tolist()}...)"


@dataclass(frozen=True)
class ImagePlanes:
    n: int
    q: int
    planes: tuple[CoefficientVector, ...]

    def __post_init__(self):
        if len(self.planes) != self.q:
            raise ValueError(f"expected {self.q} planes, got {len(self.planes)}")
        for p in self.planes:
            if p.m != 2 * self.n or p.kind is not Basis.MINTERM:
                raise ValueError("planes must be minterm vectors over 2n variables")

    @property
    def m(self) -> int:
        return 2 * self.n


def image_from_array(arr, q: int = 8) -> GrayImage:
    arr = np.asarray(arr)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise NonSquare(f"image must be square, got shape {arr.shape}")
    side = arr.shape[0]
    if side < 2 or side & (side - 1):
        raise NonPowerOfTwoDimension(f"side {side} is not a power of two >= 2")
    return GrayImage(side.bit_length() - 1, q, arr.reshape(-1))


# --- NetPBM -----------------------------------------------------------------

_TOKEN = re.compile(rb"\s*(?:#[^\n\r]*[\n\r]\s*)*")


def _header_tokens(data: bytes, count: int):
    """Read ``count`` whitespace-separated header tokens after the magic.

    Returns the tokens and the offset of the single whitespace byte that
    terminates the last one.
    """
    pos = 2
    tokens = []
    for name in ("width", "height", "maxval")[:count]:
        skip = _TOKEN.match(data, pos)
        pos = skip.end()
        start = pos
        while pos < len(data) and data[pos : pos + 1].isdigit():
            pos += 1
        if pos == start:
            raise MalformedHeader(f"{name}: expected a decimal integer at byte {start}")
        tokens.append(int(data[start:pos]))
    return tokens, pos


def parse_pgm(data: bytes) -> GrayImage:
    """Decode a P5 (binary) or P2 (ASCII) grayscale NetPBM file."""
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise UnsupportedMagic(f"magic: expected P2 or P5, got {magic!r}")
    if len(data) < 3 or not data[2:3].isspace():
        raise MalformedHeader("magic: must be followed by whitespace")
    (width, height, maxval), pos = _header_tokens(data, 3)
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise MalformedHeader("maxval: must be followed by a single whitespace byte")
    pos += 1
    if width == 0 or height == 0:
        raise MalformedHeader(f"width/height: zero dimension {width}x{height}")
    if not 0 < maxval <= 65535:
        raise MalformedHeader(f"maxval: {maxval} outside [1, 65535]")
    if width != height:
        raise NonSquare(f"width {width} != height {height}")
    if width < 2 or width & (width - 1):
        raise NonPowerOfTwoDimension(f"width: {width} is not a power of two >= 2")
    if width.bit_length() - 1 > MAX_ORDER:
        raise NonPowerOfTwoDimension(f"width: {width} exceeds 2**{MAX_ORDER}")
    q = 8 if maxval <= 255 else 16
    count = width * height

    if magic == b"P5":
        bps = 1 if q == 8 else 2
        body = data[pos : pos + count * bps]
        if len(body) < count * bps:
            raise TruncatedData(
                f"pixel data: expected {count * bps} bytes, got {len(body)}"
            )
        pixels = np.frombuffer(body, dtype=np.uint8 if bps == 1 else ">u2")
    else:
        fields = data[pos:].split()
        if len(fields) < count:
            raise TruncatedData(f"pixel data: expected {count} values, got {len(fields)}")
        try:
            pixels = np.array([int(f) for f in fields[:count]], dtype=np.int64)
        except ValueError as exc:
            raise MalformedHeader(f"pixel data: non-integer token ({exc})") from None
        if pixels.min() < 0 or pixels.max() > maxval:
            raise PixelOutOfRange(f"pixel data: value outside [0, {maxval}]")
    return GrayImage(width.bit_length() - 1, q, pixels)


def read_pgm(path) -> GrayImage:
    return parse_pgm(Path(path).read_bytes())


def format_pgm(img: GrayImage, binary: bool = True) -> bytes:
    maxval = 255 if img.q <= 8 else 65535
    header = f"{'P5' if binary else 'P2'}\n{img.side} {img.side}\n{maxval}\n".encode()
    if binary:
        dtype = np.uint8 if maxval == 255 else ">u2"
        return header + img.pixels.astype(dtype).tobytes()
    rows = img.as_array()
    return header + "".join(" ".join(map(str, r)) + "\n" for r in rows.tolist()).encode()


# --- random images ----------------------------------------------------------


def splitmix64(seed: int):
    """Yield the SplitMix64 output stream for ``seed`` (reference generator)."""
    z = seed & _U64
    while True:
        z = (z + _GOLDEN_GAMMA) & _U64
        x = z
        x = ((x ^ (x >> 30)) * _MIX1) & _U64
        x = ((x ^ (x >> 27)) * _MIX2) & _U64
        yield x ^ (x >> 31)


def splitmix64_block(seed: int, count: int) -> np.ndarray:
    """First ``count`` SplitMix64 outputs, vectorised.

    The state after draw ``k`` is ``seed + (k + 1) * gamma`` so every draw
    can be computed independently; uint64 arithmetic wraps modulo 2**64.
    """
    steps = np.arange(1, count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        x = np.uint64(seed & _U64) + steps * np.uint64(_GOLDEN_GAMMA)
        x = (x ^ (x >> np.uint64(30))) * np.uint64(_MIX1)
        x = (x ^ (x >> np.uint64(27))) * np.uint64(_MIX2)
    return x ^ (x >> np.uint64(31))


def random_image(n: int, q: int, seed: int) -> GrayImage:
    _check_order(n)
    _check_depth(q)
    draws = splitmix64_block(seed, 1 << (2 * n))
    return GrayImage(n, q, draws & np.uint64((1 << q) - 1))


# --- planes -----------------------------------------------------------------


def extract_planes(img: GrayImage) -> ImagePlanes:
    m = img.m
    planes = tuple(
        CoefficientVector(m, Basis.MINTERM, pack_bits((img.pixels >> i) & 1))
        for i in range(img.q)
    )
    return ImagePlanes(img.n, img.q, planes)


def recombine(planes: ImagePlanes) -> GrayImage:
    pixels = np.zeros(1 << planes.m, dtype=np.uint32)
    for i, p in enumerate(planes.planes):
        pixels |= unpack_bits(p.words, p.m).astype(np.uint32) << i
    return GrayImage(planes.n, planes.q, pixels)
