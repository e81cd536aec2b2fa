"""Point-wise VByte codec, characteristic bit-vectors and their bit-cost models.

Both cost models are defined over d-gaps taken with a virtual predecessor of
``-1`` in front of the first element, so that every integer (including the
first of a partition) is charged the same number of bits no matter how the
surrounding sequence is cut.  The serializer uses exactly the same gaps, which
keeps modeled bits and payload bits identical (up to byte padding of bitmaps).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidSequenceError, MalformedInputError

__all__ = [
    "CostModel",
    "GapView",
    "bitmap_cost",
    "bitmap_decode",
    "bitmap_encode",
    "gap_view",
    "gaps",
    "vbyte_cost",
    "vbyte_costs",
    "vbyte_decode",
    "vbyte_encode",
]

# 10 groups of 7 bits cover any uint64
_MAX_CODEWORD = 10


def vbyte_cost(d: int) -> int:
    """Bits used by VByte for a single non-negative integer ``d``.

    Zero still takes one byte, so the result is never below 8.
    """
    if d < 0:
        raise ValueError(f"vbyte_cost expects a non-negative integer, got {d}")
    return 8 * max(1, -(-int(d).bit_length() // 7))


def vbyte_costs(values) -> np.ndarray:
    """Vectorized :func:`vbyte_cost` for an array of values below 2**63."""
    v = np.asarray(values, dtype=np.int64)
    if v.size and v.min() < 0:
        raise ValueError("vbyte_costs expects non-negative integers")
    nbytes = np.ones(v.shape, dtype=np.int64)
    for shift in range(7, 63, 7):
        nbytes += v >= (1 << shift)
    return 8 * nbytes


def bitmap_cost(d):
    """Bits used by the characteristic bit-vector for gap ``d``: exactly ``d``."""
    return d


def vbyte_encode(values) -> bytes:
    """Encode non-negative integers, least-significant 7-bit group first.

    The high bit of a byte is set when more bytes of the same value follow.
    """
    v = np.asarray(values, dtype=np.uint64).ravel()
    if v.size == 0:
        return b""
    lengths = vbyte_costs(v.astype(np.int64)) // 8
    starts = np.zeros(v.size, dtype=np.int64)
    np.cumsum(lengths[:-1], out=starts[1:])
    out = np.zeros(int(lengths.sum()), dtype=np.uint8)
    for group in range(int(lengths.max())):
        live = lengths > group
        chunk = (v[live] >> np.uint64(7 * group)) & np.uint64(0x7F)
        more = (lengths[live] - 1 > group).astype(np.uint64) << np.uint64(7)
        out[starts[live] + group] = (chunk | more).astype(np.uint8)
    return out.tobytes()


def vbyte_decode(data, count: int) -> np.ndarray:
    """Decode the first ``count`` codewords of ``data``.

    Raises :class:`MalformedInputError` if ``data`` ends before ``count``
    complete codewords were read.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    if count == 0:
        return np.zeros(0, dtype=np.int64)
    buf = np.frombuffer(data, dtype=np.uint8)
    ends = np.flatnonzero(buf < 0x80)
    if ends.size < count:
        raise MalformedInputError(
            f"expected {count} codewords, stream holds only {ends.size} terminators"
        )
    ends = ends[:count]
    starts = np.empty(count, dtype=np.int64)
    starts[0] = 0
    starts[1:] = ends[:-1] + 1
    if int((ends - starts).max()) >= _MAX_CODEWORD:
        raise MalformedInputError("codeword longer than 10 bytes")
    used = buf[: ends[-1] + 1].astype(np.uint64) & np.uint64(0x7F)
    owner = np.repeat(np.arange(count), ends - starts + 1)
    shift = (np.arange(used.size) - starts[owner]) * 7
    return np.add.reduceat(used << shift.astype(np.uint64), starts).astype(np.int64)


def bitmap_encode(values, base: int) -> bytes:
    """Characteristic bit-vector of ``values`` relative to ``base``.

    Bit ``v - base`` is set for every value (LSB-first within each byte).  The
    map spans ``values[-1] - (base - 1)`` bits and is zero-padded to a byte.
    """
    v = np.asarray(values, dtype=np.int64)
    if v.size == 0:
        return b""
    rel = v - base
    if rel[0] < 0 or (v.size > 1 and np.any(np.diff(v) <= 0)):
        raise InvalidSequenceError("bitmap values must be increasing and >= base")
    bits = np.zeros(int(rel[-1]) + 1, dtype=bool)
    bits[rel] = True
    return np.packbits(bits, bitorder="little").tobytes()


def bitmap_decode(data, base: int, bit_len: int) -> np.ndarray:
    """Positions of the set bits among the first ``bit_len`` bits, plus ``base``."""
    buf = np.frombuffer(data, dtype=np.uint8)
    if bit_len > 8 * buf.size:
        raise MalformedInputError(f"bitmap of {bit_len} bits needs more than {buf.size} bytes")
    bits = np.unpackbits(buf, bitorder="little", count=bit_len)
    return np.flatnonzero(bits).astype(np.int64) + base


def gaps(values) -> np.ndarray:
    """d-gaps of a whole sequence, the first one taken from a virtual ``-1``.

    Raises :class:`InvalidSequenceError` unless the input is strictly increasing
    and non-negative.
    """
    v = np.asarray(values, dtype=np.int64).ravel()
    if v.size == 0:
        return v.copy()
    d = np.diff(v, prepend=-1)
    if d.min() <= 0:
        bad = int(np.argmax(d <= 0))
        raise InvalidSequenceError(
            f"sequence must be strictly increasing and non-negative (position {bad})"
        )
    return d


@dataclass(frozen=True)
class GapView:
    """Gaps of the slice ``S[start:stop]``; the first gap is taken from ``S[start-1]``."""

    gaps: np.ndarray
    start: int = 0

    def __len__(self) -> int:
        return len(self.gaps)

    def vbyte_bits(self) -> int:
        return int(vbyte_costs(self.gaps).sum())

    def bitmap_bits(self) -> int:
        return int(self.gaps.sum())


def gap_view(S, i: int = 0, j: int | None = None) -> GapView:
    """Gap transform of ``S[i:j]`` under the ``S[-1] = -1`` convention."""
    s = np.asarray(S, dtype=np.int64)
    if j is None:
        j = s.size
    if not 0 <= i < j <= s.size:
        raise ValueError(f"invalid slice [{i}, {j}) for a sequence of {s.size}")
    d = gaps(s[max(i - 1, 0) : j])
    return GapView(d[1:] if i > 0 else d, start=i)


@dataclass(frozen=True)
class CostModel:
    """Bit costs of the two encoders plus the fixed per-partition header cost."""

    header_bits: int = 64

    def __post_init__(self):
        if self.header_bits < 0:
            raise ValueError("header_bits must be non-negative")

    @staticmethod
    def vbyte(d: int) -> int:
        return vbyte_cost(d)

    @staticmethod
    def bitmap(d: int) -> int:
        return bitmap_cost(d)

    def partition_cost(self, view: GapView) -> int:
        """``min(E, B) + F`` for one partition."""
        return min(view.vbyte_bits(), view.bitmap_bits()) + self.header_bits
