"""Two-level partitioned sequence: an L1 directory over an L2 payload.

Serialized layout (little-endian, every section 8-byte aligned)::

    n                u64
    num_partitions   u64
    L1 entries       2 x u64 each:
                       word 0 = upper_bound (low 32 bits) | size << 32
                       word 1 = payload offset (low 63 bits) | tag << 63
    L2 length        u64
    L2 bytes         zero-padded to a multiple of 8

Partition ``k`` covers values above the previous upper bound; its first
element is coded as the gap from that bound, so the first partition starts
from a virtual ``-1``.  VByte partitions store gaps, bitmap partitions store
bit ``v - base`` for every value ``v``.
"""

from __future__ import annotations

import struct
from bisect import bisect_left
from typing import NamedTuple

import numpy as np

from .codec import bitmap_decode, bitmap_encode, gaps, vbyte_decode, vbyte_encode
from .errors import CorruptionError, InvalidSequenceError, MalformedInputError
from .partition import BITMAP, VBYTE, PartitionPlan

__all__ = [
    "EXHAUSTED",
    "MAX_VALUE",
    "PartitionedSequence",
    "SequenceCursor",
    "StoredBits",
    "build_sequence",
]

MAX_VALUE = (1 << 32) - 2
#: Returned by :meth:`SequenceCursor.next_geq` past the last element.
EXHAUSTED = (1 << 32) - 1

_U64 = struct.Struct("<Q")
_HEAD = struct.Struct("<QQ")
_OFFSET_MASK = (1 << 63) - 1


class StoredBits(NamedTuple):
    l1: int
    l2: int
    total: int


def _pad8(k: int) -> int:
    return -k % 8


class PartitionedSequence:
    """Immutable partitioned representation of one strictly increasing list."""

    __slots__ = (
        "n", "upper_bounds", "sizes", "tags", "offsets", "payload", "_ub_list", "_starts"
    )

    def __init__(self, n, upper_bounds, sizes, tags, offsets, payload):
        self.n = int(n)
        self.upper_bounds = np.asarray(upper_bounds, dtype=np.int64)
        self.sizes = np.asarray(sizes, dtype=np.int64)
        self.tags = np.asarray(tags, dtype=np.uint8)
        self.offsets = np.asarray(offsets, dtype=np.int64)
        self.payload = payload
        self._ub_list = self.upper_bounds.tolist()
        self._starts = np.concatenate(([0], np.cumsum(self.sizes)[:-1])).tolist()
        self._validate()

    def _validate(self):
        m = len(self.upper_bounds)
        if not (len(self.sizes) == len(self.tags) == len(self.offsets) == m):
            raise CorruptionError("L1 columns differ in length")
        if int(self.sizes.sum()) != self.n or (m and self.sizes.min() < 1):
            raise CorruptionError("partition sizes do not add up to n")
        if m and (np.any(np.diff(self.upper_bounds) <= 0) or self.upper_bounds[0] < 0):
            raise CorruptionError("upper bounds are not strictly increasing")
        if m and (
            self.offsets[0] != 0
            or np.any(np.diff(self.offsets) <= 0)
            or self.offsets[-1] >= len(self.payload)
        ):
            raise CorruptionError("payload offsets are not increasing within L2")
        if not np.isin(self.tags, (VBYTE, BITMAP)).all():
            raise CorruptionError("unknown partition tag")

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other):
        if not isinstance(other, PartitionedSequence):
            return NotImplemented
        return self.to_bytes() == other.to_bytes()

    @property
    def num_partitions(self) -> int:
        return len(self.upper_bounds)

    @property
    def universe(self) -> int:
        return self._ub_list[-1] + 1 if self._ub_list else 0

    def base(self, k: int) -> int:
        return self._ub_list[k - 1] + 1 if k > 0 else 0

    def partition_payload(self, k: int):
        end = int(self.offsets[k + 1]) if k + 1 < self.num_partitions else len(self.payload)
        return self.payload[int(self.offsets[k]) : end]

    def decode_partition(self, k: int) -> np.ndarray:
        """Absolute values of partition ``k``, checked against its L1 entry."""
        data = self.partition_payload(k)
        base = self.base(k)
        size = int(self.sizes[k])
        ub = self._ub_list[k]
        if self.tags[k] == BITMAP:
            bit_len = ub - base + 1
            if len(data) != (bit_len + 7) // 8:
                raise CorruptionError(f"partition {k}: bitmap length mismatch")
            values = bitmap_decode(data, base, bit_len)
            if values.size != size:
                raise CorruptionError(
                    f"partition {k}: popcount {values.size} != size {size}"
                )
        else:
            try:
                d = vbyte_decode(data, size)
            except MalformedInputError as exc:
                raise CorruptionError(f"partition {k}: {exc}") from exc
            if d.size and d.min() < 1:
                raise CorruptionError(f"partition {k}: zero gap")
            values = np.cumsum(d) + (base - 1)
            raw = np.frombuffer(data, dtype=np.uint8)
            if raw[-1] >= 0x80 or np.count_nonzero(raw < 0x80) != size:
                raise CorruptionError(f"partition {k}: trailing payload bytes")
        if values.size and int(values[-1]) != ub:
            raise CorruptionError(f"partition {k}: last value != upper bound")
        return values

    def decode(self) -> np.ndarray:
        """Full decode of the original list."""
        if self.n == 0:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate([self.decode_partition(k) for k in range(self.num_partitions)])

    def stored_bits(self) -> StoredBits:
        l1 = 128 * self.num_partitions
        l2 = 8 * len(self.payload)
        return StoredBits(l1, l2, l1 + l2)

    def cursor(self, record_jumps: bool = False) -> "SequenceCursor":
        return SequenceCursor(self, record_jumps)

    def to_bytes(self) -> bytes:
        m = self.num_partitions
        l1 = np.empty(2 * m, dtype="<u8")
        l1[0::2] = self.upper_bounds.astype(np.uint64) | (self.sizes.astype(np.uint64) << np.uint64(32))
        l1[1::2] = self.offsets.astype(np.uint64) | (self.tags.astype(np.uint64) << np.uint64(63))
        payload = bytes(self.payload)
        return b"".join(
            (
                _HEAD.pack(self.n, m),
                l1.tobytes(),
                _U64.pack(len(payload)),
                payload,
                b"\0" * _pad8(len(payload)),
            )
        )

    @classmethod
    def from_buffer(cls, buf, offset: int = 0) -> tuple["PartitionedSequence", int]:
        """Parse a sequence at ``offset``; returns it with the offset just past it.

        The payload is a zero-copy view into ``buf``.
        """
        view = memoryview(buf)
        try:
            n, m = _HEAD.unpack_from(view, offset)
            pos = offset + _HEAD.size
            l1 = np.frombuffer(view, dtype="<u8", count=2 * m, offset=pos)
            pos += 16 * m
            (l2_len,) = _U64.unpack_from(view, pos)
            pos += 8
        except (struct.error, ValueError) as exc:
            raise CorruptionError(f"truncated sequence header at byte {offset}") from exc
        if pos + l2_len > len(view):
            raise CorruptionError(f"payload at byte {pos} overruns the buffer")
        words0 = l1[0::2]
        words1 = l1[1::2]
        seq = cls(
            n,
            (words0 & np.uint64(0xFFFFFFFF)).astype(np.int64),
            (words0 >> np.uint64(32)).astype(np.int64),
            (words1 >> np.uint64(63)).astype(np.uint8),
            (words1 & np.uint64(_OFFSET_MASK)).astype(np.int64),
            view[pos : pos + l2_len],
        )
        return seq, pos + l2_len + _pad8(l2_len)


def build_sequence(S, plan: PartitionPlan) -> PartitionedSequence:
    """Materialize ``S`` according to ``plan``."""
    s = np.asarray(S, dtype=np.int64)
    if plan.size != s.size:
        raise ValueError(f"plan covers {plan.size} elements, list has {s.size}")
    d = gaps(s)
    if s.size and s[-1] > MAX_VALUE:
        raise InvalidSequenceError(f"values must not exceed {MAX_VALUE}")
    chunks = []
    offsets = []
    offset = 0
    base = 0
    for start, stop, tag in plan.partitions():
        if tag == BITMAP:
            chunk = bitmap_encode(s[start:stop], base)
        else:
            chunk = vbyte_encode(d[start:stop])
        offsets.append(offset)
        chunks.append(chunk)
        offset += len(chunk)
        base = int(s[stop - 1]) + 1
    sizes = np.diff(plan.splits, prepend=0)
    return PartitionedSequence(
        s.size, s[plan.splits - 1], sizes, plan.tags, offsets, b"".join(chunks)
    )


class SequenceCursor:
    """Forward-only NextGEQ cursor; successive targets must not decrease.

    VByte partitions are decoded whole into a scratch list on entry.  Bitmap
    partitions are scanned 64 bits at a time, skipping whole words by popcount
    to keep track of the position.
    """

    def __init__(self, seq: PartitionedSequence, record_jumps: bool = False):
        self.seq = seq
        self.position = 0
        self.value = None
        self.jumps = [] if record_jumps else None
        self._part = -1
        self._start = 0
        self._base = 0
        self._scratch = None
        self._bitmap = None
        self._word = 0
        self._rank = 0
        self._local = 0

    def __len__(self) -> int:
        return self.seq.n

    @property
    def exhausted(self) -> bool:
        return self.value == EXHAUSTED

    def _load(self, p: int):
        seq = self.seq
        self._part = p
        self._start = seq._starts[p]
        self._base = seq.base(p)
        self._local = 0
        if seq.tags[p] == BITMAP:
            self._scratch = None
            self._bitmap = seq.partition_payload(p)
            self._word = 0
            self._rank = 0
        else:
            self._bitmap = None
            self._scratch = seq.decode_partition(p).tolist()

    def _read_word(self, w: int) -> int:
        return int.from_bytes(self._bitmap[8 * w : 8 * w + 8], "little")

    def _seek_bitmap(self, x: int) -> int:
        bit = max(x - self._base, 0)
        target = bit >> 6
        w = self._word
        rank = self._rank
        while w < target:
            rank += self._read_word(w).bit_count()
            w += 1
        word = self._read_word(w)
        masked = word & ~((1 << (bit & 63)) - 1) if w == target else word
        while masked == 0:
            rank += word.bit_count()
            w += 1
            word = masked = self._read_word(w)
        low = (masked & -masked).bit_length() - 1
        self._word = w
        self._rank = rank
        self._local = rank + (word & ((1 << low) - 1)).bit_count()
        return self._base + 64 * w + low

    def _record(self, new_position: int):
        if self.jumps is not None:
            self.jumps.append(new_position - self.position)
        self.position = new_position

    def next_geq(self, x: int) -> int:
        """Smallest value ``>= x`` at or after the cursor, else :data:`EXHAUSTED`."""
        if self.value is not None and self.value >= x:
            self._record(self.position)
            return self.value
        seq = self.seq
        p = bisect_left(seq._ub_list, x, max(self._part, 0))
        if p == seq.num_partitions:
            self._record(seq.n)
            self.value = EXHAUSTED
            return EXHAUSTED
        if p != self._part:
            self._load(p)
        if self._scratch is not None:
            self._local = bisect_left(self._scratch, x, self._local)
            value = self._scratch[self._local]
        else:
            value = self._seek_bitmap(x)
        self._record(self._start + self._local)
        self.value = value
        return value

    def next(self) -> int:
        """Advance to the element after the current one."""
        if self.value is None:
            return self.next_geq(0)
        if self.value == EXHAUSTED:
            return EXHAUSTED
        return self.next_geq(self.value + 1)
