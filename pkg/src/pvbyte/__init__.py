"""Optimally partitioned VByte posting lists.

Sorted integer lists are cut into partitions, each stored either with VByte
or as a characteristic bit-vector, whichever is smaller.  The cut points are
found exactly in one linear pass.
"""

from .codec import (
    CostModel,
    GapView,
    bitmap_decode,
    bitmap_encode,
    gap_view,
    vbyte_cost,
    vbyte_decode,
    vbyte_encode,
)
from .errors import (
    CorruptionError,
    IncompatibleIndexError,
    InvalidSequenceError,
    MalformedCollectionError,
    MalformedInputError,
    PVByteError,
    QueryParseError,
)
from .index import Collection, IndexFile, build_index, read_index, write_collection, write_index
from .partition import (
    BITMAP,
    VBYTE,
    GainState,
    PartitionPlan,
    dp_epsilon_partition,
    dp_exact_partition,
    gain_step,
    optimal_partition,
    plan_cost,
    uniform_partition,
)
from .query import intersect_and, parse_queries, run_benchmark
from .sequence import EXHAUSTED, PartitionedSequence, SequenceCursor, build_sequence

__version__ = "0.1.0"
