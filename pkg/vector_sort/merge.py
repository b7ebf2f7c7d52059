"""
Bitonic Merge Kernels
---------------------
Three executions of the same n-input bitonic merging network, plus the
streaming merge of arbitrary-length runs built on top of the 2W-element kernel.

Kernels
-------
* Serial     : every comparator in network order through ``comparator_branchless``
               (conditional-select form, no data-dependent branch in the
               comparator itself).
* Vectorized : one network layer at a time. The layer's low and high channels
               are gathered into registers by lane permutation, compared with
               lane-wise min/max W lanes at a time, and scattered back.
* Hybrid     : the leading ``split`` layers run vectorized over all n channels.
               From there the network is two independent halves; the lower
               half continues vectorized and the upper half runs serially, one
               layer of each alternately so the two instruction streams
               interleave.

All three execute exactly the same comparators; only the schedule differs.
Pass a list as ``trace`` to record every comparator a kernel executes.

The same three schedules also exist as flat step tables (``kernel_program``)
for the batched numpy kernel and the compiled native pipeline.

Kernel choice by window
-----------------------
The serial half of a wide hybrid merge spills temporaries out of registers, so
with ``auto_kernel`` a Hybrid request becomes Vectorized once the merge window
exceeds ``hybrid_max_window`` (32 elements by default).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import MergeBufferError, MergeInputError
from .lanes import LaneBackend, Vector, get_backend
from .network import bitonic_merge_pairs

logger = logging.getLogger(__name__)

KERNEL_MAX_WIDTH = 512  # default cap; callers pass 4 * R * W for their block

# An ascending element sequence; list[int] or numpy int32 array depending on backend.
SortedRun = Sequence[int]


class MergeKernel(Enum):
    SERIAL = "serial"
    VECTORIZED = "vectorized"
    HYBRID = "hybrid"

    @classmethod
    def parse(cls, value: Union[str, "MergeKernel"]) -> "MergeKernel":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise MergeInputError(
                f"unknown merge kernel {value!r}; expected one of {[k.value for k in cls]}"
            ) from None


def select_kernel(
    kind: MergeKernel,
    window: int,
    auto_kernel: bool = True,
    hybrid_max_window: int = 32,
) -> MergeKernel:
    """Kernel actually used for a merge of ``window`` elements."""
    if auto_kernel and kind is MergeKernel.HYBRID and window > hybrid_max_window:
        return MergeKernel.VECTORIZED
    return kind


def comparator_branchless(a: int, b: int) -> Tuple[int, int]:
    """(min, max) by conditional select rather than an if-statement."""
    swap = a > b
    return (a, b)[swap], (b, a)[swap]


def is_ascending(values: Sequence[int]) -> bool:
    return all(values[i] <= values[i + 1] for i in range(len(values) - 1))


# ---------------------------------------------------------------------------
# Schedules
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class _LayerPlan:
    """Gather indices and inverse scatter for one vectorized layer."""

    pairs: Tuple[Tuple[int, int], ...]
    lo: Tuple[int, ...]
    hi: Tuple[int, ...]
    scatter: Tuple[int, ...]


def _plan_layer(pairs: Sequence[Tuple[int, int]], offset: int = 0) -> _LayerPlan:
    lo = tuple(p[0] - offset for p in pairs)
    hi = tuple(p[1] - offset for p in pairs)
    m = len(pairs)
    scatter = [0] * (2 * m)
    for t in range(m):
        scatter[lo[t]] = t
        scatter[hi[t]] = m + t
    return _LayerPlan(tuple(pairs), lo, hi, tuple(scatter))


@lru_cache(maxsize=None)
def _full_schedule(n: int) -> Tuple[_LayerPlan, ...]:
    return tuple(_plan_layer(layer) for layer in bitonic_merge_pairs(n))


@lru_cache(maxsize=None)
def _split_schedule(n: int, split: int) -> Tuple[Tuple[_LayerPlan, Tuple[Tuple[int, int], ...]], ...]:
    """Per tail layer: (lower-half vector plan, upper-half serial pairs)."""
    half = n // 2
    tail = []
    for layer in bitonic_merge_pairs(n)[split:]:
        lower = [p for p in layer if p[1] < half]
        upper = tuple((p[0] - half, p[1] - half) for p in layer if p[0] >= half)
        tail.append((_plan_layer(lower), upper))
    return tuple(tail)


def _vector_layer(
    state: Vector,
    plan: _LayerPlan,
    lanes: LaneBackend,
    width: int,
    trace: Optional[list],
    offset: int = 0,
) -> Vector:
    low = lanes.permute(state, plan.lo)
    high = lanes.permute(state, plan.hi)
    mins, maxs = [], []
    for r in range(0, len(plan.lo), width):
        x, y = low[r:r + width], high[r:r + width]
        mins.append(lanes.vmin(x, y))
        maxs.append(lanes.vmax(x, y))
    if trace is not None:
        trace.extend((lo + offset, hi + offset) for lo, hi in plan.pairs)
    return lanes.permute(lanes.concat(mins + maxs), plan.scatter)


def _serial_pairs(state: List[int], pairs, trace: Optional[list], offset: int = 0) -> None:
    for lo, hi in pairs:
        state[lo], state[hi] = comparator_branchless(state[lo], state[hi])
    if trace is not None:
        trace.extend((lo + offset, hi + offset) for lo, hi in pairs)


# ---------------------------------------------------------------------------
# Kernels
# ---------------------------------------------------------------------------
def merge_kernel(
    a: SortedRun,
    b: SortedRun,
    kind: MergeKernel = MergeKernel.HYBRID,
    backend: Optional[LaneBackend] = None,
    width: int = 4,
    split: int = 1,
    check: bool = True,
    trace: Optional[list] = None,
    max_width: int = KERNEL_MAX_WIDTH,
) -> Vector:
    """Merge two equal-length ascending runs into one run of n = 2*len(a).

    ``width`` is the lane count W of one register. ``split`` is the number of
    leading layers the hybrid kernel runs fully vectorized (clamped to 1..k).
    ``check`` enables the sortedness assertion on the inputs; it is skipped
    entirely under ``python -O``. ``max_width`` caps n.
    """
    lanes = backend or get_backend()
    h = len(a)
    if len(b) != h:
        raise MergeInputError(f"kernel inputs differ in length: {h} vs {len(b)}")
    n = 2 * h
    if n < 2 or n & (n - 1) or n > max_width:
        raise MergeInputError(f"kernel width must be a power of two in 2..{max_width}, got {n}")
    if __debug__ and check:
        if not is_ascending(a) or not is_ascending(b):
            raise MergeInputError("kernel inputs must both be ascending")
    if width < 1:
        raise MergeInputError(f"lane width must be >= 1, got {width}")

    if kind is MergeKernel.SERIAL:
        state = lanes.to_list(a) + lanes.to_list(b)
        for plan in _full_schedule(n):
            _serial_pairs(state, plan.pairs, trace)
        return lanes.vector(state)

    state = lanes.concat([lanes.vector(a), lanes.vector(b)])
    layers = _full_schedule(n)
    if kind is MergeKernel.VECTORIZED:
        for plan in layers:
            state = _vector_layer(state, plan, lanes, width, trace)
        return state

    # Hybrid
    split = max(1, min(split, len(layers)))
    for plan in layers[:split]:
        state = _vector_layer(state, plan, lanes, width, trace)
    if split == len(layers):
        return state
    lower = state[:h]
    upper = lanes.to_list(state[h:])
    for lower_plan, upper_pairs in _split_schedule(n, split):
        lower = _vector_layer(lower, lower_plan, lanes, width, trace)
        _serial_pairs(upper, upper_pairs, trace, offset=h)
    return lanes.concat([lower, lanes.vector(upper)])


# ---------------------------------------------------------------------------
# Step tables
# ---------------------------------------------------------------------------
SERIAL_STEP = 0
VECTOR_STEP = 1


@dataclass(frozen=True, eq=False)
class KernelProgram:
    """A merge schedule as rows of (mode, first pair, end pair) over ``lo``/``hi``."""

    steps: np.ndarray  # (m, 3) int64
    lo: np.ndarray     # int64 channel indices, network order
    hi: np.ndarray

    @property
    def size(self) -> int:
        return len(self.lo)


def assemble_program(steps: Sequence[Tuple[int, Sequence[Tuple[int, int]]]]) -> KernelProgram:
    table, lo, hi = [], [], []
    for mode, pairs in steps:
        start = len(lo)
        lo.extend(p[0] for p in pairs)
        hi.extend(p[1] for p in pairs)
        table.append((mode, start, len(lo)))
    return KernelProgram(
        np.asarray(table, dtype=np.int64).reshape(-1, 3),
        np.asarray(lo, dtype=np.int64),
        np.asarray(hi, dtype=np.int64),
    )


@lru_cache(maxsize=None)
def kernel_program(n: int, kind: MergeKernel, split: int = 1) -> KernelProgram:
    """Step table of the n-input merge for one kernel kind.

    Serial is a single serial step over every comparator. Vectorized is one
    vector step per layer. Hybrid is ``split`` vector steps over whole layers,
    then per remaining layer a vector step for the lower half followed by a
    serial step for the upper half.
    """
    layers = bitonic_merge_pairs(n)
    steps: List[Tuple[int, Sequence[Tuple[int, int]]]] = []
    if kind is MergeKernel.SERIAL:
        steps.append((SERIAL_STEP, [p for layer in layers for p in layer]))
    elif kind is MergeKernel.VECTORIZED:
        steps.extend((VECTOR_STEP, layer) for layer in layers)
    else:
        split = max(1, min(split, len(layers)))
        half = n // 2
        steps.extend((VECTOR_STEP, layer) for layer in layers[:split])
        for layer in layers[split:]:
            steps.append((VECTOR_STEP, [p for p in layer if p[1] < half]))
            steps.append((SERIAL_STEP, [p for p in layer if p[0] >= half]))
    return assemble_program(steps)


def merge_kernel_batch(a: np.ndarray, b: np.ndarray, kind: MergeKernel = MergeKernel.HYBRID, split: int = 1) -> np.ndarray:
    """Merge every row of ``a`` with the same row of ``b`` in one pass of numpy calls.

    The batch axis carries independent merges. A vector step costs one gather,
    one min/max and one scatter for its whole layer; a serial step costs one
    min/max per comparator, so the call count follows the kernel's schedule.
    """
    a, b = np.asarray(a), np.asarray(b)
    if a.ndim != 2 or a.shape != b.shape:
        raise MergeInputError(f"batched kernel needs two equal 2-D arrays, got {a.shape} and {b.shape}")
    n = 2 * a.shape[1]
    if n < 2 or n & (n - 1):
        raise MergeInputError(f"kernel width must be a power of two, got {n}")
    state = np.concatenate([a, b], axis=1).astype(np.int32, copy=False)
    prog = kernel_program(n, MergeKernel.parse(kind), split)
    for mode, p0, p1 in prog.steps.tolist():
        if mode == SERIAL_STEP:
            for i, j in zip(prog.lo[p0:p1].tolist(), prog.hi[p0:p1].tolist()):
                x, y = state[:, i], state[:, j]
                low = np.minimum(x, y)
                np.maximum(x, y, out=state[:, j])
                state[:, i] = low
        elif p1 > p0:
            lo, hi = prog.lo[p0:p1], prog.hi[p0:p1]
            x, y = state[:, lo], state[:, hi]
            state[:, lo] = np.minimum(x, y)
            state[:, hi] = np.maximum(x, y)
    return state


# ---------------------------------------------------------------------------
# Streaming merge
# ---------------------------------------------------------------------------
def _drain(x: Sequence[int], y: Sequence[int]) -> List[int]:
    """Scalar two-pointer merge by select; ties take from ``x``."""
    out: List[int] = []
    i = j = 0
    nx, ny = len(x), len(y)
    while i < nx and j < ny:
        take_y = y[j] < x[i]
        out.append((x[i], y[j])[take_y])
        i += 1 - take_y
        j += take_y
    out.extend(x[i:])
    out.extend(y[j:])
    return out


def merge_runs(
    a: SortedRun,
    b: SortedRun,
    kind: MergeKernel = MergeKernel.HYBRID,
    out: Optional[Vector] = None,
    out_offset: int = 0,
    backend: Optional[LaneBackend] = None,
    width: int = 4,
    split: int = 1,
    auto_kernel: bool = True,
    hybrid_max_window: int = 32,
    check: bool = False,
) -> Vector:
    """Merge two ascending runs of any length through a 2W in-flight window.

    The window holds W carried elements plus the next W-element block from
    whichever run has the smaller head. Each step emits the lower W elements of
    the merged window and carries the upper W. When either run has no full
    block left, the carry and both remainders finish with a scalar drain.

    Writes into ``out[out_offset:out_offset + |a| + |b|]`` (a new buffer when
    ``out`` is None) and returns that merged segment.
    """
    lanes = backend or get_backend()
    na, nb = len(a), len(b)
    total = na + nb
    if out is None:
        out = lanes.buffer(total)
        out_offset = 0
    if len(out) - out_offset < total:
        raise MergeBufferError(f"output buffer holds {len(out) - out_offset} elements, need {total}")
    if __debug__ and check:
        if not is_ascending(a) or not is_ascending(b):
            raise MergeInputError("merge_runs inputs must both be ascending")

    w = width
    kernel = select_kernel(kind, 2 * w, auto_kernel, hybrid_max_window)
    pos = out_offset
    if na < w or nb < w:
        lanes.store(out, pos, lanes.vector(_drain(lanes.to_list(a), lanes.to_list(b))))
        return out[out_offset:out_offset + total]

    window = merge_kernel(a[:w], b[:w], kernel, lanes, w, split, check=False)
    ia = ib = w
    while True:
        lanes.store(out, pos, window[:w])
        pos += w
        carry = window[w:]
        more_a = ia + w <= na
        more_b = ib + w <= nb
        if not (more_a and more_b):
            break
        if a[ia] <= b[ib]:
            block, ia = a[ia:ia + w], ia + w
        else:
            block, ib = b[ib:ib + w], ib + w
        window = merge_kernel(block, carry, kernel, lanes, w, split, check=False)

    rest = _drain(lanes.to_list(a[ia:]), lanes.to_list(b[ib:]))
    tail = _drain(lanes.to_list(carry), rest)
    lanes.store(out, pos, lanes.vector(tail))
    logger.debug("merged %d+%d elements with %s kernel", na, nb, kernel.value)
    return out[out_offset:out_offset + total]
