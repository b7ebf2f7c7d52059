"""
Single-Thread Sorter
--------------------
The sort pipeline for one worker:

    1. In-register sort   every R*W block: load -> column sort -> transpose ->
                          log2(W) row-merge passes -> one ascending run.
    2. Merge passes       bottom-up pairwise ``merge_runs`` between two buffers,
                          doubling the run length each pass, until one run is left.

Tail handling: the input is padded up to a multiple of R*W with the maximal
32-bit value. Sentinels sort to the very end and the trailing pad is cut off,
so the partial block goes through the same code path as every other block.

The sort is not stable (comparator networks are not); only value order is
guaranteed. Outputs are Python lists on the emulated backend and numpy int32
arrays on the native one. With numba installed the native backend runs both
stages through the compiled pipeline in ``native.py``.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace
from numbers import Integral
from typing import Any, Callable, Dict, MutableSequence, Optional, Sequence

import numpy as np

from . import native
from .block import Block, column_sort, transpose_rw
from .errors import ElementRangeError, ElementTypeError, GeometryError
from .lanes import ELEMENT_MAX, ELEMENT_MIN, LaneBackend, LaneMode, Vector, get_backend
from .merge import MergeKernel, merge_kernel, merge_runs, select_kernel
from .network import ComparatorNetwork, NetworkKind, column_network
from .settings import load_sort_settings

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SortConfig:
    """Block geometry, kernel and backend for one sort."""

    R: int = 16
    W: int = 4
    kernel: MergeKernel = MergeKernel.HYBRID
    backend: LaneMode = LaneMode.EMULATED
    network: NetworkKind = NetworkKind.BEST
    threads: int = 1
    hybrid_split: int = 1
    auto_kernel: bool = True
    hybrid_max_window: int = 32
    debug_checks: bool = True

    def __post_init__(self) -> None:
        R, W = self.R, self.W
        if W < 1 or R < 2:
            raise GeometryError(f"need R >= 2 and W >= 1, got R={R}, W={W}")
        if R % W:
            raise GeometryError(f"R={R} must be a multiple of W={W}")
        block = R * W
        if block & (block - 1):
            raise GeometryError(f"R*W={block} must be a power of two")
        if R > 64:
            raise GeometryError(f"R={R} exceeds the 64-channel network limit")
        # Accept plain strings for the enum fields.
        object.__setattr__(self, "kernel", MergeKernel.parse(self.kernel))
        object.__setattr__(self, "backend", LaneMode.parse(self.backend))
        if not isinstance(self.network, NetworkKind):
            object.__setattr__(self, "network", NetworkKind(str(self.network).lower()))

    @property
    def threshold(self) -> int:
        """Block size in elements, R*W."""
        return self.R * self.W

    @property
    def kernel_max_width(self) -> int:
        """Widest merge kernel this geometry may run (4 * R * W)."""
        return 4 * self.threshold

    @property
    def compiled(self) -> bool:
        """True when sorts go through the compiled native pipeline."""
        return self.backend is LaneMode.NATIVE and native.COMPILED_AVAILABLE

    def lanes(self) -> LaneBackend:
        return get_backend(self.backend)

    def column_network(self) -> ComparatorNetwork:
        return column_network(self.R, self.network)

    def with_(self, **changes: Any) -> "SortConfig":
        return replace(self, **changes)

    @classmethod
    def from_settings(cls, settings: Optional[Dict[str, Any]] = None, **overrides: Any) -> "SortConfig":
        s = dict(settings if settings is not None else load_sort_settings())
        cfg = cls(
            R=int(s.get("registers", 16)),
            W=int(s.get("lanes", 4)),
            kernel=s.get("kernel", "hybrid"),
            backend=s.get("backend", "emulated"),
            network=s.get("network", "best"),
            threads=int(s.get("threads", 1)),
            hybrid_split=int(s.get("hybrid_split", 1)),
            auto_kernel=bool(s.get("auto_kernel", True)),
            hybrid_max_window=int(s.get("hybrid_max_window", 32)),
            debug_checks=bool(s.get("debug_checks", True)),
        )
        return cfg.with_(**overrides) if overrides else cfg


@dataclass
class PassTiming:
    """Reported after the in-register stage and after every merge pass.

    ``extra`` carries ``kernel`` (the kernel the stage ran) plus ``blocks`` for
    the in-register stage or ``merges`` for a merge pass.
    """

    pass_index: int
    run_length: int
    elapsed_s: float
    extra: Dict[str, Any] = field(default_factory=dict)


PassHook = Callable[[PassTiming], None]


def check_elements(data: Sequence[int]) -> None:
    """Reject non-integer input and values outside the 32-bit signed range."""
    if len(data) == 0:
        return
    dtype = getattr(data, "dtype", None)
    if dtype is not None:
        if dtype.kind not in "iu":
            raise ElementTypeError(f"elements must be integers, got dtype {dtype}")
        if dtype.kind == "i" and dtype.itemsize <= 4:
            return
    else:
        bad = next((v for v in data if not isinstance(v, Integral)), None)
        if bad is not None:
            raise ElementTypeError(f"elements must be integers, got {type(bad).__name__} {bad!r}")
    lo, hi = min(data), max(data)
    if lo < ELEMENT_MIN or hi > ELEMENT_MAX:
        raise ElementRangeError(f"elements must fit in int32, got range [{lo}, {hi}]")


# ---------------------------------------------------------------------------
# In-register sort
# ---------------------------------------------------------------------------
def in_register_stage(data: Sequence[int], cfg: SortConfig, run_length: Optional[int] = None) -> Vector:
    """Sort one R*W block until every ``run_length`` elements are ascending.

    ``run_length`` must be a power of two between R and R*W; R is the state
    right after column sort + transpose, R*W is the fully sorted block.
    """
    R, W = cfg.R, cfg.W
    target = cfg.threshold if run_length is None else run_length
    if target < R or target > cfg.threshold or target & (target - 1):
        raise GeometryError(f"run length {target} outside {R}..{cfg.threshold} or not a power of two")
    if cfg.compiled:
        if len(data) != cfg.threshold:
            raise GeometryError(f"block {R}x{W} needs {cfg.threshold} elements, got {len(data)}")
        buf = np.array(data, dtype=np.int32)
        return native.in_register_blocks(
            buf, R, W, cfg.column_network(), target, cfg.kernel,
            cfg.hybrid_split, cfg.auto_kernel, cfg.hybrid_max_window,
        )
    lanes = cfg.lanes()
    block = transpose_rw(column_sort(Block.load(data, R, W, lanes), cfg.column_network()))
    flat = block.flatten()
    run = R
    while run < target:
        kind = select_kernel(cfg.kernel, 2 * run, cfg.auto_kernel, cfg.hybrid_max_window)
        merged = [
            merge_kernel(
                flat[s:s + run], flat[s + run:s + 2 * run], kind, lanes, W,
                cfg.hybrid_split, check=cfg.debug_checks, max_width=cfg.kernel_max_width,
            )
            for s in range(0, len(flat), 2 * run)
        ]
        flat = lanes.concat(merged)
        run *= 2
    return flat


def in_register_sort(data: Sequence[int], cfg: Optional[SortConfig] = None) -> Vector:
    """One R*W block to one ascending run."""
    cfg = cfg or SortConfig()
    if len(data) != cfg.threshold:
        raise GeometryError(f"in-register sort needs {cfg.threshold} elements, got {len(data)}")
    return in_register_stage(data, cfg, cfg.threshold)


# ---------------------------------------------------------------------------
# Full single-thread sort
# ---------------------------------------------------------------------------
def merge_pass(src: Vector, dst: Vector, width: int, cfg: SortConfig, start: int = 0, end: Optional[int] = None) -> int:
    """Merge adjacent ``width`` runs of src[start:end] into dst; an odd last run is copied.

    Returns the number of run pairs merged.
    """
    end = len(src) if end is None else end
    if cfg.compiled:
        return native.merge_pass(
            src, dst, width, cfg.W, cfg.kernel, cfg.hybrid_split,
            cfg.auto_kernel, cfg.hybrid_max_window, start, end,
        )
    lanes = cfg.lanes()
    merges = 0
    for left in range(start, end, 2 * width):
        mid = min(left + width, end)
        right = min(left + 2 * width, end)
        if mid >= right:
            lanes.store(dst, left, src[left:right])
            continue
        merge_runs(
            src[left:mid], src[mid:right], cfg.kernel, dst, left, lanes, cfg.W,
            cfg.hybrid_split, cfg.auto_kernel, cfg.hybrid_max_window,
        )
        merges += 1
    return merges


def _in_register_all(padded: Vector, cfg: SortConfig) -> Vector:
    block = cfg.threshold
    if cfg.compiled:
        return native.in_register_blocks(
            padded, cfg.R, cfg.W, cfg.column_network(), block, cfg.kernel,
            cfg.hybrid_split, cfg.auto_kernel, cfg.hybrid_max_window,
        )
    lanes = cfg.lanes()
    src = lanes.buffer(len(padded))
    for start in range(0, len(padded), block):
        lanes.store(src, start, in_register_sort(padded[start:start + block], cfg))
    return src


def sort_single(data: Sequence[int], cfg: Optional[SortConfig] = None, on_pass: Optional[PassHook] = None) -> Vector:
    """Sort ascending on the calling thread."""
    cfg = cfg or SortConfig()
    lanes = cfg.lanes()
    n = len(data)
    if n == 0:
        return lanes.vector([])
    check_elements(data)

    block = cfg.threshold
    pad = (-n) % block
    padded = lanes.concat([lanes.vector(data), lanes.fill(pad, ELEMENT_MAX)])
    total = n + pad

    t0 = time.perf_counter()
    src = _in_register_all(padded, cfg)
    if on_pass:
        kind = select_kernel(cfg.kernel, block, cfg.auto_kernel, cfg.hybrid_max_window)
        on_pass(PassTiming(0, block, time.perf_counter() - t0, {"kernel": kind.value, "blocks": total // block}))

    width, index = block, 0
    dst = lanes.buffer(total)
    window_kernel = select_kernel(cfg.kernel, 2 * cfg.W, cfg.auto_kernel, cfg.hybrid_max_window)
    while width < total:
        merges = merge_pass(src, dst, width, cfg)
        src, dst = dst, src
        width *= 2
        index += 1
        if on_pass:
            on_pass(PassTiming(index, min(width, total), time.perf_counter() - t0,
                               {"kernel": window_kernel.value, "merges": merges}))
    logger.debug("sorted %d elements (%d pad) in %d merge passes", n, pad, index)
    return src[:n]


def sort_in_place(buffer: MutableSequence[int], cfg: Optional[SortConfig] = None) -> MutableSequence[int]:
    """Sort a caller-owned buffer; internal scratch is N elements."""
    cfg = cfg or SortConfig()
    result = sort_single(buffer, cfg)
    buffer[:] = cfg.lanes().to_list(result) if isinstance(buffer, list) else result
    return buffer
