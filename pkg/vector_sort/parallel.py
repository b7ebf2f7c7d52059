"""
Multi-Thread Sort
-----------------
Load-balanced parallel merge sort over T workers.

    1. Split the input into T chunks whose sizes differ by at most one.
    2. Every worker runs ``sort_single`` on its chunk.
    3. ceil(log2 T) merge passes. In each pass, adjacent runs are paired and the
       merged output of every pair is cut into T equal segments with merge-path
       co-ranking; worker p merges segment p of every pair. An unpaired last run
       is copied forward, also split into T pieces.

Each pass is planned on the calling thread, then executed fork-join on a
thread pool; the join is the barrier between passes. Workers only write to
their own disjoint out-ranges of the destination buffer.

Ties in co-ranking favour ``a`` (the left run), which makes every segment
boundary a deterministic function of the data.

On the compiled native path the workers run GIL-free numba code, so the pool
gives real parallel speedup there.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from . import native
from .errors import CorankError
from .lanes import Vector
from .merge import merge_runs
from .sorter import SortConfig, check_elements, sort_single

logger = logging.getLogger(__name__)

Range = Tuple[int, int]


def corank_partition(a: Sequence[int], b: Sequence[int], k: int) -> Tuple[int, int]:
    """Split point (i, j), i + j = k, such that a[:i] and b[:j] hold the k smallest.

    Binary search over i in O(log(min(|a|, |b|))).
    """
    na, nb = len(a), len(b)
    if not 0 <= k <= na + nb:
        raise CorankError(f"rank {k} outside 0..{na + nb}")
    lo, hi = max(0, k - nb), min(k, na)
    while lo < hi:
        i = (lo + hi) // 2
        j = k - i
        # a[i] belongs in the first k while some taken b is not strictly smaller.
        if j > 0 and b[j - 1] >= a[i]:
            lo = i + 1
        else:
            hi = i
    return lo, k - lo


def chunk_bounds(n: int, T: int) -> List[int]:
    """T+1 offsets splitting n elements into chunks differing by at most one."""
    return [p * n // T for p in range(T + 1)]


@dataclass(frozen=True)
class Segment:
    """One worker's share of a pair merge (absolute offsets into the buffers)."""

    a: Range
    b: Range
    out: Range

    @property
    def length(self) -> int:
        return self.out[1] - self.out[0]


@dataclass
class ParallelPlan:
    T: int
    chunks: List[int]
    # pass -> worker -> segments
    passes: List[List[List[Segment]]] = field(default_factory=list)

    def check(self, total: int) -> None:
        """Assert chunk balance and per-pass output coverage/disjointness."""
        sizes = [hi - lo for lo, hi in zip(self.chunks, self.chunks[1:])]
        assert self.chunks[0] == 0 and self.chunks[-1] == total, "chunks must cover the input"
        assert not sizes or max(sizes) - min(sizes) <= 1, f"unbalanced chunks {sizes}"
        for index, workers in enumerate(self.passes):
            outs = sorted(seg.out for segs in workers for seg in segs if seg.length)
            cursor = 0
            for lo, hi in outs:
                assert lo == cursor, f"pass {index}: gap or overlap at {cursor}"
                cursor = hi
            assert cursor == total, f"pass {index}: output covers {cursor} of {total}"


def plan_merge_pass(src: Sequence[int], runs: List[Range], T: int) -> Tuple[List[List[Segment]], List[Range]]:
    """Segments for one pass over adjacent ``runs``, and the runs it produces."""
    workers: List[List[Segment]] = [[] for _ in range(T)]
    next_runs: List[Range] = []
    for p in range(0, len(runs), 2):
        s0, e0 = runs[p]
        if p + 1 == len(runs):
            length = e0 - s0
            for w in range(T):
                lo, hi = s0 + w * length // T, s0 + (w + 1) * length // T
                workers[w].append(Segment((lo, hi), (e0, e0), (lo, hi)))
            next_runs.append((s0, e0))
            continue
        s1, e1 = runs[p + 1]
        a, b = src[s0:e0], src[s1:e1]
        length = e1 - s0
        cuts = [corank_partition(a, b, w * length // T) for w in range(T + 1)]
        for w in range(T):
            (i0, j0), (i1, j1) = cuts[w], cuts[w + 1]
            out_lo = s0 + i0 + j0
            workers[w].append(Segment((s0 + i0, s0 + i1), (s1 + j0, s1 + j1), (out_lo, out_lo + (i1 - i0) + (j1 - j0))))
        next_runs.append((s0, e1))
    return workers, next_runs


def resolve_threads(T: Optional[int]) -> int:
    """0 means all available hardware threads; anything below 1 is clamped to 1."""
    if T == 0:
        return os.cpu_count() or 1
    return max(1, int(T or 1))


class ParallelSorter:
    """Fork-join sorter; keeps the last executed plan for inspection."""

    def __init__(self, cfg: Optional[SortConfig] = None, threads: Optional[int] = None):
        self.cfg = cfg or SortConfig()
        self.T = resolve_threads(self.cfg.threads if threads is None else threads)
        self.last_plan: Optional[ParallelPlan] = None

    def sort(self, data: Sequence[int]) -> Vector:
        cfg, T = self.cfg, self.T
        lanes = cfg.lanes()
        n = len(data)
        plan = ParallelPlan(T=T, chunks=chunk_bounds(n, T))
        self.last_plan = plan
        if n == 0:
            return lanes.vector([])
        check_elements(data)
        values = lanes.vector(data)
        src, dst = lanes.buffer(n), lanes.buffer(n)

        def local_sort(p: int) -> None:
            lo, hi = plan.chunks[p], plan.chunks[p + 1]
            lanes.store(src, lo, sort_single(values[lo:hi], cfg))

        def run_segments(segments: List[Segment]) -> None:
            for seg in segments:
                if cfg.compiled:
                    native.merge_into(
                        src[seg.a[0]:seg.a[1]], src[seg.b[0]:seg.b[1]], dst, seg.out[0], cfg.W,
                        cfg.kernel, cfg.hybrid_split, cfg.auto_kernel, cfg.hybrid_max_window,
                    )
                    continue
                merge_runs(
                    src[seg.a[0]:seg.a[1]], src[seg.b[0]:seg.b[1]], cfg.kernel, dst, seg.out[0],
                    lanes, cfg.W, cfg.hybrid_split, cfg.auto_kernel, cfg.hybrid_max_window,
                )

        runs = [(plan.chunks[p], plan.chunks[p + 1]) for p in range(T)]
        with ThreadPoolExecutor(max_workers=T) as executor:
            list(executor.map(local_sort, range(T)))
            while len(runs) > 1:
                workers, runs = plan_merge_pass(src, runs, T)
                plan.passes.append(workers)
                list(executor.map(run_segments, workers))
                src, dst = dst, src
        logger.debug("parallel sort of %d elements on %d workers, %d passes", n, T, len(plan.passes))
        return src[:n]


def sort_parallel(data: Sequence[int], cfg: Optional[SortConfig] = None, T: Optional[int] = None) -> Vector:
    """Sort on T workers (T=None uses cfg.threads, T=0 uses every hardware thread)."""
    return ParallelSorter(cfg, T).sort(data)
