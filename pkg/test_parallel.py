"""Co-rank partitioning and the multi-thread sort."""

import itertools
import os
import random

import pytest

from vector_sort.errors import CorankError
from vector_sort.lanes import LaneMode
from vector_sort.parallel import (
    ParallelSorter,
    chunk_bounds,
    corank_partition,
    plan_merge_pass,
    resolve_threads,
    sort_parallel,
)
from vector_sort.sorter import SortConfig, sort_single


def _oracle_corank(a, b, k):
    # Stable merge with ties to a; count how many of the first k came from a.
    tagged = sorted([(v, 0) for v in a] + [(v, 1) for v in b])
    i = sum(1 for _, side in tagged[:k] if side == 0)
    return i, k - i


def test_corank_examples():
    assert corank_partition([1, 3, 5], [2, 4, 6], 3) == (2, 1)
    assert corank_partition([1, 3, 5], [2, 4, 6], 0) == (0, 0)
    assert corank_partition([1, 3, 5], [2, 4, 6], 6) == (3, 3)
    assert corank_partition([], [1, 2], 1) == (0, 1)


def test_corank_ties_favour_a():
    assert corank_partition([1, 1], [1, 1], 2) == (2, 0)
    assert corank_partition([1, 1], [1, 1], 3) == (2, 1)


def test_corank_out_of_range():
    with pytest.raises(CorankError):
        corank_partition([1], [2], 3)
    with pytest.raises(CorankError):
        corank_partition([1], [2], -1)


def test_corank_matches_brute_force():
    rng = random.Random(16)
    for na, nb in itertools.product(range(0, 17, 3), range(0, 17, 2)):
        a = sorted(rng.randint(0, 5) for _ in range(na))
        b = sorted(rng.randint(0, 5) for _ in range(nb))
        for k in range(na + nb + 1):
            i, j = corank_partition(a, b, k)
            assert (i, j) == _oracle_corank(a, b, k)
            assert sorted(a[:i] + b[:j]) == sorted(a + b)[:k]


@pytest.mark.parametrize("n,T", [(0, 3), (10, 3), (64, 7), (5, 8)])
def test_chunk_bounds_balanced(n, T):
    bounds = chunk_bounds(n, T)
    sizes = [hi - lo for lo, hi in zip(bounds, bounds[1:])]
    assert len(sizes) == T and sum(sizes) == n
    assert max(sizes) - min(sizes) <= 1


def test_plan_merge_pass_covers_output():
    src = [1, 4, 6, 9, 2, 3, 5, 5, 10, 0, 7, 8]
    runs = [(0, 4), (4, 8), (8, 9), (9, 12)]
    workers, next_runs = plan_merge_pass(src, runs, 3)
    assert next_runs == [(0, 8), (8, 12)]
    outs = sorted(seg.out for segs in workers for seg in segs if seg.length)
    assert outs[0][0] == 0 and outs[-1][1] == 12
    for (_, hi), (lo, _) in zip(outs, outs[1:]):
        assert hi == lo
    for segs in workers:
        # one segment per pair, and every segment's share is at most ceil(L/T)
        assert len(segs) == 2
        assert segs[0].length <= 3 and segs[1].length <= 2


def test_plan_copies_odd_run():
    workers, next_runs = plan_merge_pass(list(range(10)), [(0, 5), (5, 8), (8, 10)], 2)
    assert next_runs == [(0, 8), (8, 10)]
    copies = [segs[-1] for segs in workers]
    assert [c.out for c in copies] == [(8, 9), (9, 10)]
    assert all(c.b[0] == c.b[1] for c in copies)


def test_resolve_threads():
    assert resolve_threads(0) == (os.cpu_count() or 1)
    assert resolve_threads(-3) == 1
    assert resolve_threads(None) == 1
    assert resolve_threads(5) == 5


def test_single_thread_matches_sort_single():
    rng = random.Random(1)
    data = [rng.randint(-(2 ** 31), 2 ** 31 - 1) for _ in range(1000)]
    cfg = SortConfig()
    assert sort_parallel(data, cfg, 1) == sort_single(data, cfg)


@pytest.mark.parametrize("backend", [LaneMode.EMULATED, LaneMode.NATIVE], ids=lambda m: m.value)
@pytest.mark.parametrize("T", [1, 2, 3, 7, 8, 64])
@pytest.mark.parametrize("n", [0, 1, 7, 200, 1023])
def test_sort_parallel_matches_oracle(backend, T, n):
    cfg = SortConfig(backend=backend)
    rng = random.Random(T * 10_000 + n)
    data = [rng.randint(-50, 50) for _ in range(n)]
    out = cfg.lanes().to_list(sort_parallel(data, cfg, T))
    assert out == sorted(data)


def test_many_threads_on_tiny_input():
    data = list(range(100, 0, -1))
    assert sort_parallel(data, SortConfig(), 64) == sorted(data)


def test_parallel_sorter_records_plan():
    rng = random.Random(3)
    data = [rng.randint(0, 10 ** 6) for _ in range(2000)]
    sorter = ParallelSorter(SortConfig(), threads=5)
    assert sorter.sort(data) == sorted(data)
    plan = sorter.last_plan
    assert plan.T == 5
    assert len(plan.passes) == 3
    plan.check(len(data))


def test_threads_default_from_config():
    sorter = ParallelSorter(SortConfig(threads=3))
    assert sorter.T == 3


def test_corank_is_monotone():
    rng = random.Random(8)
    a = sorted(rng.randint(0, 4) for _ in range(40))
    b = sorted(rng.randint(0, 4) for _ in range(25))
    cuts = [corank_partition(a, b, k) for k in range(66)]
    for (i0, j0), (i1, j1) in zip(cuts, cuts[1:]):
        assert i0 <= i1 and j0 <= j1


def test_segments_are_balanced():
    rng = random.Random(4)
    src = sorted(rng.randint(0, 3) for _ in range(50)) + sorted(rng.randint(0, 3) for _ in range(31))
    workers, _ = plan_merge_pass(src, [(0, 50), (50, 81)], 4)
    for segs in workers:
        assert abs(segs[0].length - 81 / 4) <= 1
