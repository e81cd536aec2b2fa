"""Partitioning strategies for two encoders: VByte (point-wise) and bitmaps.

A plan cuts a sorted sequence into consecutive partitions, each stored with
the cheaper of the two encoders plus a fixed header of ``F`` bits.  Because
both costs are sums of per-gap costs, the optimum can be found in a single
left-to-right pass over the running cost difference ("gain"); the quadratic
DP and the sparsified DP are kept as oracle and baseline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .codec import gap_view, gaps, vbyte_cost, vbyte_costs

__all__ = [
    "BITMAP",
    "VBYTE",
    "GainState",
    "PartitionPlan",
    "close",
    "dp_epsilon_partition",
    "dp_exact_partition",
    "gain_step",
    "optimal_partition",
    "plan_cost",
    "single_partition",
    "uniform_partition",
]

VBYTE = 0
BITMAP = 1
_LABELS = {VBYTE: "E", BITMAP: "B"}

DEFAULT_F = 64
DEFAULT_EPS1 = 0.03
DEFAULT_EPS2 = 0.3
DP_ORACLE_CAP = 2048


@dataclass(frozen=True, eq=False)
class PartitionPlan:
    """End positions of the partitions, their encoders and the modeled size.

    ``splits[-1]`` is always the sequence length; ``tags[k]`` is ``VBYTE`` or
    ``BITMAP`` for the partition ``[splits[k-1], splits[k])``.
    """

    splits: np.ndarray
    tags: np.ndarray
    header_bits: int
    modeled_cost: int

    def __post_init__(self):
        if len(self.splits) == 0:
            raise ValueError("a plan needs at least one partition")
        if len(self.splits) != len(self.tags):
            raise ValueError("splits and tags differ in length")
        if self.splits[0] <= 0 or np.any(np.diff(self.splits) <= 0):
            raise ValueError("split points must be strictly increasing and positive")

    def __len__(self) -> int:
        return len(self.splits)

    def __eq__(self, other):
        if not isinstance(other, PartitionPlan):
            return NotImplemented
        return (
            np.array_equal(self.splits, other.splits)
            and np.array_equal(self.tags, other.tags)
            and self.header_bits == other.header_bits
            and self.modeled_cost == other.modeled_cost
        )

    @property
    def size(self) -> int:
        return int(self.splits[-1])

    @property
    def labels(self) -> str:
        return "".join(_LABELS[int(t)] for t in self.tags)

    def partitions(self):
        """Yield ``(start, stop, tag)`` for every partition."""
        start = 0
        for stop, tag in zip(self.splits.tolist(), self.tags.tolist()):
            yield start, stop, tag
            start = stop


def _prefix_costs(d: np.ndarray):
    pe = np.zeros(d.size + 1, dtype=np.int64)
    pb = np.zeros(d.size + 1, dtype=np.int64)
    np.cumsum(vbyte_costs(d), out=pe[1:])
    np.cumsum(d, out=pb[1:])
    return pe, pb


def _make_plan(d, splits, F, tags=None) -> PartitionPlan:
    splits = np.asarray(splits, dtype=np.int64)
    pe, pb = _prefix_costs(d)
    starts = np.concatenate(([0], splits[:-1]))
    e = pe[splits] - pe[starts]
    b = pb[splits] - pb[starts]
    if tags is None:
        tags = np.where(b < e, BITMAP, VBYTE).astype(np.uint8)
    else:
        tags = np.asarray(tags, dtype=np.uint8)
    chosen = np.where(tags == BITMAP, b, e)
    cost = int(chosen.sum()) + len(splits) * F
    return PartitionPlan(splits, tags, F, cost)


def _checked_gaps(S) -> np.ndarray:
    d = gaps(S)
    if d.size == 0:
        raise ValueError("cannot partition an empty sequence")
    return d


@dataclass
class GainState:
    """Scan state of the linear-time optimizer.

    ``gain`` is the VByte cost minus the bitmap cost accumulated since the last
    emitted split; ``max_gain``/``max_pos`` and ``min_gain``/``min_pos`` are the
    extremes seen in the current interval and where they occur.
    """

    header_bits: int = DEFAULT_F
    threshold: int | None = None
    gain: int = 0
    min_gain: int = 0
    max_gain: int = 0
    max_pos: int = 0
    min_pos: int = 0
    steps: int = 0
    splits: list = field(default_factory=list)
    tags: list = field(default_factory=list)

    def __post_init__(self):
        if self.threshold is None:
            self.threshold = self.header_bits

    def _emit_min(self):
        # the interval ending at the lowest gain is better off with VByte
        self.splits.append(self.min_pos)
        self.tags.append(VBYTE)
        self.threshold = 2 * self.header_bits
        self.max_pos = self.steps
        self.gain -= self.min_gain
        self.min_gain = 0
        self.max_gain = self.gain

    def _emit_max(self):
        self.splits.append(self.max_pos)
        self.tags.append(BITMAP)
        self.threshold = 2 * self.header_bits
        self.min_pos = self.steps
        self.gain -= self.max_gain
        self.max_gain = 0
        self.min_gain = self.gain


def gain_step(state: GainState, d: int) -> GainState:
    """Consume one gap: update the gain, its extremes, and emit a split if due."""
    if d < 1:
        raise ValueError(f"gaps must be >= 1, got {d}")
    F = state.header_bits
    delta = vbyte_cost(d) - d
    state.gain += delta
    state.steps += 1
    if delta >= 0:
        if state.gain > state.max_gain:
            state.max_gain = state.gain
            state.max_pos = state.steps
        if state.min_gain < -state.threshold and state.min_gain - state.gain < -2 * F:
            state._emit_min()
    else:
        if state.gain < state.min_gain:
            state.min_gain = state.gain
            state.min_pos = state.steps
        if state.max_gain > state.threshold and state.max_gain - state.gain > 2 * F:
            state._emit_max()
    return state


def close(state: GainState) -> tuple[list, list]:
    """Flush the trailing interval; returns the final ``(splits, tags)``."""
    F = state.header_bits
    if state.max_gain > F and state.max_gain - state.gain > F:
        state._emit_max()
    if state.min_gain < -F and state.min_gain - state.gain < -F:
        state._emit_min()
    state.splits.append(state.steps)
    state.tags.append(BITMAP if state.gain > 0 else VBYTE)
    return state.splits, state.tags


def optimal_partition(S, F: int = DEFAULT_F, engine: str = "compiled") -> PartitionPlan:
    """Minimum-cost plan in one pass and constant extra state.

    ``engine="python"`` drives :func:`gain_step` explicitly, which is slow but
    lets callers inspect every intermediate :class:`GainState`.
    """
    d = _checked_gaps(S)
    if F < 0:
        raise ValueError("F must be non-negative")
    if engine == "compiled":
        splits, tags, _ = _kernels.linear_partition(d, int(F))
    elif engine == "python":
        state = GainState(int(F))
        for x in d.tolist():
            gain_step(state, x)
        splits, tags = close(state)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    return _make_plan(d, splits, int(F), tags)


def uniform_partition(S, b: int = 128, F: int = DEFAULT_F) -> PartitionPlan:
    """Fixed-size blocks of ``b`` elements (the last one may be shorter)."""
    if b < 1:
        raise ValueError("block size must be >= 1")
    d = _checked_gaps(S)
    splits = np.append(np.arange(b, d.size, b, dtype=np.int64), d.size)
    return _make_plan(d, splits, F)


def single_partition(S, F: int = DEFAULT_F, tag: int | None = VBYTE) -> PartitionPlan:
    """The whole list as one partition; ``tag=None`` picks the cheaper encoder."""
    d = _checked_gaps(S)
    tags = None if tag is None else [tag]
    return _make_plan(d, [d.size], F, tags)


def dp_exact_partition(S, F: int = DEFAULT_F, cap: int = DP_ORACLE_CAP) -> PartitionPlan:
    """Quadratic shortest path over the complete DAG of partitions.

    Meant as a test oracle, so inputs longer than ``cap`` are refused.
    """
    d = _checked_gaps(S)
    n = d.size
    if n > cap:
        raise ValueError(f"dp_exact_partition is capped at {cap} elements, got {n}")
    pe, pb = _prefix_costs(d)
    best = np.zeros(n + 1, dtype=np.int64)
    parent = np.zeros(n + 1, dtype=np.int64)
    for j in range(1, n + 1):
        edge = np.minimum(pe[j] - pe[:j], pb[j] - pb[:j]) + F
        total = best[:j] + edge
        i = int(np.argmin(total))
        best[j] = total[i]
        parent[j] = i
    splits = []
    j = n
    while j > 0:
        splits.append(j)
        j = int(parent[j])
    plan = _make_plan(d, splits[::-1], F)
    assert plan.modeled_cost == best[n]
    return plan


def epsilon_bounds(F: int, single_cost: int, eps1: float, eps2: float) -> np.ndarray:
    """Cost bounds of the windows kept by the sparsified DP."""
    lower = F + 1
    limit = max(F / eps1, lower)
    bounds = []
    bound = float(lower)
    while True:
        bounds.append(bound)
        if bound >= single_cost:
            break
        bound *= 1 + eps2
        if bound >= limit:
            break
    return np.asarray(bounds, dtype=np.float64)


def dp_epsilon_partition(
    S, F: int = DEFAULT_F, eps1: float = DEFAULT_EPS1, eps2: float = DEFAULT_EPS2
) -> PartitionPlan:
    """Approximate DP: cost at most ``(1 + eps1)(1 + eps2)`` times the optimum.

    Only edges of cost up to about ``F / eps1`` are kept, and among those only
    the longest edge within each geometric cost class of ratio ``1 + eps2``.
    """
    if not (0 < eps1 < 1 and 0 < eps2 < 1):
        raise ValueError("eps1 and eps2 must lie in (0, 1)")
    d = _checked_gaps(S)
    pe_n = int(vbyte_costs(d).sum())
    single = min(pe_n, int(d.sum())) + F
    bounds = epsilon_bounds(F, single, eps1, eps2)
    splits = _kernels.epsilon_partition(d, int(F), bounds)
    return _make_plan(d, splits, F)


def plan_cost(S, plan: PartitionPlan) -> int:
    """Recompute a plan's size from the codec cost models, partition by partition."""
    s = np.asarray(S, dtype=np.int64)
    if len(plan) == 0 or plan.size != s.size:
        raise ValueError("plan does not cover the sequence")
    total = 0
    for start, stop, _ in plan.partitions():
        view = gap_view(s, start, stop)
        total += min(view.vbyte_bits(), view.bitmap_bits()) + plan.header_bits
    return total


def approximation_factor(eps1: float = DEFAULT_EPS1, eps2: float = DEFAULT_EPS2) -> float:
    return (1 + eps1) * (1 + eps2)


def epsilon_window_count(eps1: float = DEFAULT_EPS1, eps2: float = DEFAULT_EPS2) -> float:
    """Edges kept per vertex by the sparsified DP, ``log_{1+eps2}(1/eps1)``."""
    return math.log(1 / eps1, 1 + eps2)
