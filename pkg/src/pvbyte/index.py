"""Collection ingestion, index construction and the on-disk index format.

Collections use the ds2i binary layout: a file is a concatenation of lists,
each a little-endian ``u32`` count followed by that many ``u32`` values.  The
``.docs`` file starts with a singleton list holding the number of documents;
the ``.freqs`` file has no such header.

Index file (little-endian, sections 8-byte aligned)::

    magic "PVB1" | u32 version | u8 strategy | u32 F | u64 num_docs | u64 num_terms
    (3 bytes of padding)
    offset table: for each term, u64 docs offset then u64 freqs offset
    per term: docs sequence, freqs sequence (see :mod:`pvbyte.sequence`)

Frequencies are stored as their running sums, which are strictly increasing
and reuse the same partitioned machinery.
"""

from __future__ import annotations

import logging
import mmap
import os
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from .errors import (
    IncompatibleIndexError,
    InvalidSequenceError,
    MalformedCollectionError,
)
from .partition import (
    DEFAULT_EPS1,
    DEFAULT_EPS2,
    DEFAULT_F,
    PartitionPlan,
    dp_epsilon_partition,
    optimal_partition,
    single_partition,
    uniform_partition,
)
from .sequence import MAX_VALUE, PartitionedSequence, SequenceCursor, build_sequence

logger = logging.getLogger(__name__)

MAGIC = b"PVB1"
VERSION = 1
STRATEGIES = ("unpartitioned", "uniform", "epsdp", "optimal")

_HEADER = struct.Struct("<4sIBIQQ")
_HEADER_SIZE = 32
_U32 = struct.Struct("<I")


# --- collections -------------------------------------------------------------


class TermList(NamedTuple):
    term_id: int
    docs: np.ndarray
    freqs: np.ndarray | None


def _read_lists(path) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(byte_offset, values)`` for every length-prefixed list in ``path``."""
    size = os.path.getsize(path)
    with open(path, "rb") as fh:
        offset = 0
        while offset < size:
            head = fh.read(4)
            if len(head) < 4:
                raise MalformedCollectionError(f"{path}: truncated length prefix at byte {offset}")
            (n,) = _U32.unpack(head)
            body = fh.read(4 * n)
            if len(body) < 4 * n:
                raise MalformedCollectionError(
                    f"{path}: list at byte {offset} declares {n} values, overruns the file"
                )
            yield offset, np.frombuffer(body, dtype="<u4").astype(np.int64)
            offset += 4 + 4 * n


class Collection:
    """A ds2i-style collection on disk, read one list at a time.

    ``freqs_path`` defaults to the docs path with a ``.freqs`` suffix when that
    file exists.
    """

    def __init__(self, docs_path, freqs_path=None):
        self.docs_path = Path(docs_path)
        if freqs_path is None:
            candidate = self.docs_path.with_suffix(".freqs")
            freqs_path = candidate if candidate.exists() else None
        self.freqs_path = Path(freqs_path) if freqs_path is not None else None
        first = next(_read_lists(self.docs_path), None)
        if first is None or first[1].size != 1:
            raise MalformedCollectionError(
                f"{self.docs_path}: first list must be a singleton holding num_docs"
            )
        self.num_docs = int(first[1][0])

    @classmethod
    def from_basename(cls, basename) -> "Collection":
        return cls(f"{basename}.docs", f"{basename}.freqs")

    def __iter__(self) -> Iterator[TermList]:
        docs_iter = _read_lists(self.docs_path)
        next(docs_iter)
        freqs_iter = _read_lists(self.freqs_path) if self.freqs_path else None
        for term_id, (offset, docs) in enumerate(docs_iter):
            if docs.size and (
                np.any(np.diff(docs) <= 0) or docs[-1] >= self.num_docs
            ):
                raise InvalidSequenceError(
                    f"term {term_id} (byte {offset}): postings must be strictly "
                    f"increasing and below num_docs={self.num_docs}"
                )
            freqs = None
            if freqs_iter is not None:
                item = next(freqs_iter, None)
                if item is None:
                    raise MalformedCollectionError(f"term {term_id}: missing frequency list")
                freqs = item[1]
                if freqs.size != docs.size or (freqs.size and freqs.min() < 1):
                    raise MalformedCollectionError(
                        f"term {term_id} (byte {item[0]}): frequencies must be >= 1 "
                        "and match the postings in length"
                    )
            yield TermList(term_id, docs, freqs)
        if freqs_iter is not None and next(freqs_iter, None) is not None:
            raise MalformedCollectionError(f"{self.freqs_path}: more lists than {self.docs_path}")


def _write_list(fh, values):
    arr = np.asarray(values, dtype="<u4")
    fh.write(_U32.pack(arr.size))
    fh.write(arr.tobytes())


def write_collection(basename, num_docs: int, lists: Iterable) -> tuple[Path, Path]:
    """Write ``(docs, freqs)`` pairs as ``basename.docs`` / ``basename.freqs``."""
    docs_path = Path(f"{basename}.docs")
    freqs_path = Path(f"{basename}.freqs")
    with open(docs_path, "wb") as fd, open(freqs_path, "wb") as ff:
        _write_list(fd, [num_docs])
        for docs, freqs in lists:
            _write_list(fd, docs)
            _write_list(ff, freqs)
    return docs_path, freqs_path


# --- building ----------------------------------------------------------------


@dataclass(frozen=True)
class BuildConfig:
    strategy: str = "optimal"
    header_bits: int = DEFAULT_F
    block: int = 128
    eps1: float = DEFAULT_EPS1
    eps2: float = DEFAULT_EPS2

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}")

    def plan(self, S) -> PartitionPlan:
        F = self.header_bits
        if self.strategy == "optimal":
            return optimal_partition(S, F)
        if self.strategy == "uniform":
            return uniform_partition(S, self.block, F)
        if self.strategy == "epsdp":
            return dp_epsilon_partition(S, F, self.eps1, self.eps2)
        return single_partition(S, F)


def encode_list(values, config: BuildConfig) -> bytes:
    values = np.asarray(values, dtype=np.int64)
    if values.size == 0:
        return PartitionedSequence(0, [], [], [], [], b"").to_bytes()
    return build_sequence(values, config.plan(values)).to_bytes()


def build_index(collection: Iterable[TermList] | Collection, strategy="optimal", F=DEFAULT_F,
                block=128, eps1=DEFAULT_EPS1, eps2=DEFAULT_EPS2, num_docs=None) -> "IndexFile":
    """Partition and encode every list; returns the serialized index in memory.

    Terms are processed and written in term order, so equal inputs give
    byte-identical files.
    """
    config = BuildConfig(strategy, F, block, eps1, eps2)
    if num_docs is None:
        num_docs = collection.num_docs
    blobs = []
    for term in collection:
        freqs = term.freqs if term.freqs is not None else np.ones(term.docs.size, np.int64)
        running = np.cumsum(freqs, dtype=np.int64)
        if running.size and running[-1] > MAX_VALUE:
            raise InvalidSequenceError(f"term {term.term_id}: frequency sum exceeds {MAX_VALUE}")
        blobs.append(encode_list(term.docs, config))
        blobs.append(encode_list(running, config))
    num_terms = len(blobs) // 2
    header = _HEADER.pack(MAGIC, VERSION, STRATEGIES.index(strategy), F, num_docs, num_terms)
    header += b"\0" * (_HEADER_SIZE - len(header))
    table_end = _HEADER_SIZE + 16 * num_terms
    sizes = np.fromiter((len(b) for b in blobs), dtype=np.int64, count=len(blobs))
    offsets = table_end + np.concatenate(([0], np.cumsum(sizes)[:-1])) if blobs else sizes
    data = b"".join([header, offsets.astype("<u8").tobytes(), *blobs])
    return IndexFile(data)


# --- reading -----------------------------------------------------------------


class FreqAccessor:
    """Frequencies of one term, recovered by differencing the stored running sums."""

    def __init__(self, seq: PartitionedSequence):
        self.seq = seq
        self._freqs = None

    def __len__(self) -> int:
        return self.seq.n

    def all(self) -> np.ndarray:
        if self._freqs is None:
            self._freqs = np.diff(self.seq.decode(), prepend=0)
        return self._freqs

    def __getitem__(self, position):
        return self.all()[position]


class IndexFile:
    """Read-only view of a serialized index held in ``bytes`` or an ``mmap``.

    Looking up a term parses only that term's byte range.
    """

    def __init__(self, buf, _file=None):
        self._buf = buf
        self._view = memoryview(buf)
        self._file = _file
        try:
            self._parse_header()
        except IncompatibleIndexError:
            self._view.release()
            raise

    def _parse_header(self):
        if len(self._view) < _HEADER_SIZE:
            raise IncompatibleIndexError("file too short for an index header")
        magic, version, strategy, F, num_docs, num_terms = _HEADER.unpack_from(self._view, 0)
        if magic != MAGIC:
            raise IncompatibleIndexError(f"bad magic {magic!r}")
        if version != VERSION:
            raise IncompatibleIndexError(f"unsupported version {version}")
        if strategy >= len(STRATEGIES):
            raise IncompatibleIndexError(f"unknown strategy tag {strategy}")
        self.version = version
        self.strategy = STRATEGIES[strategy]
        self.header_bits = F
        self.num_docs = num_docs
        self.num_terms = num_terms
        table_end = _HEADER_SIZE + 16 * num_terms
        if table_end > len(self._view):
            raise IncompatibleIndexError("offset table overruns the file")
        self.offsets = np.frombuffer(self._view[_HEADER_SIZE:table_end], dtype="<u8").astype(np.int64)
        if num_terms and (
            self.offsets[0] != table_end
            or np.any(np.diff(self.offsets) <= 0)
            or self.offsets[-1] >= len(self._view)
        ):
            raise IncompatibleIndexError("offset table is not monotone within the file")

    def __len__(self) -> int:
        return self.num_terms

    def __eq__(self, other):
        if not isinstance(other, IndexFile):
            return NotImplemented
        return self._view == other._view

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def close(self):
        """Unmap the file; a no-op for the mapping while sequences still reference it."""
        try:
            self._view.release()
            if isinstance(self._buf, mmap.mmap):
                self._buf.close()
        except BufferError:
            logger.debug("index still referenced, leaving the mapping to the GC")
        if self._file is not None:
            self._file.close()

    def to_bytes(self) -> bytes:
        return bytes(self._view)

    @property
    def nbytes(self) -> int:
        return len(self._view)

    def _check_term(self, term_id: int):
        if not 0 <= term_id < self.num_terms:
            raise IndexError(f"term {term_id} out of range [0, {self.num_terms})")

    def docs_sequence(self, term_id: int) -> PartitionedSequence:
        self._check_term(term_id)
        return PartitionedSequence.from_buffer(self._view, int(self.offsets[2 * term_id]))[0]

    def freqs_sequence(self, term_id: int) -> PartitionedSequence:
        self._check_term(term_id)
        return PartitionedSequence.from_buffer(self._view, int(self.offsets[2 * term_id + 1]))[0]

    def list_size(self, term_id: int) -> int:
        self._check_term(term_id)
        return struct.unpack_from("<Q", self._view, int(self.offsets[2 * term_id]))[0]

    def get_list(self, term_id: int, record_jumps: bool = False) -> tuple[SequenceCursor, FreqAccessor]:
        """Docs cursor and frequency accessor for ``term_id``."""
        return (
            self.docs_sequence(term_id).cursor(record_jumps),
            FreqAccessor(self.freqs_sequence(term_id)),
        )

    def touch(self) -> int:
        """Read every page once so timings start from a warm index."""
        total = 0
        step = mmap.PAGESIZE
        for pos in range(0, len(self._view), step):
            total += self._view[pos]
        return total

    def space(self) -> dict:
        """Stored sizes in bits, split by stream, plus bits per posting."""
        ends = np.append(self.offsets, len(self._view))
        blob_bits = 8 * np.diff(ends)
        docs_bits = int(blob_bits[0::2].sum())
        freqs_bits = int(blob_bits[1::2].sum())
        postings = sum(self.list_size(t) for t in range(self.num_terms))
        file_bits = 8 * len(self._view)
        per = postings or 1
        return {
            "postings": postings,
            "docs_bits": docs_bits,
            "freqs_bits": freqs_bits,
            "file_bits": file_bits,
            "docs_bpi": docs_bits / per,
            "freqs_bpi": freqs_bits / per,
            "total_bpi": file_bits / per,
        }


def write_index(index: IndexFile, path) -> None:
    with open(path, "wb") as fh:
        fh.write(index._view)


def read_index(path) -> IndexFile:
    """Memory-map an index file."""
    fh = open(path, "rb")
    try:
        buf = mmap.mmap(fh.fileno(), 0, access=mmap.ACCESS_READ)
    except ValueError as exc:
        fh.close()
        raise IncompatibleIndexError(f"{path}: empty file") from exc
    try:
        return IndexFile(buf, fh)
    except Exception:
        buf.close()
        fh.close()
        raise
