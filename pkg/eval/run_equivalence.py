#!/usr/bin/env python3
"""
Equivalence Harness
===================
Full acceptance grid for the sorter, too heavy for the unit tests.

Checks, grouped by area:

1. **Networks**: comparator counts per family, zero-one verification of the
   bitonic and odd-even sorters at n = 4, 8, 16 and of the 16-input best network.
2. **Kernels**: Serial = Vectorized = Hybrid on random sorted-run pairs per
   n in {8, 16, 32, 64}, plus every two-run binary input at n = 8.
3. **Co-rank**: brute-force oracle for all |a|, |b| <= 16 and every k.
4. **Sort oracle**: sort_single and sort_parallel (T in {1,2,3,7,8,64}) against
   ``sorted`` for every pattern and every length 0..max-length, plus random
   inputs up to the large size.
5. **Backend parity**: emulated vs native outputs bit-identical (when numpy
   native lanes are available).

The emulated backend is pure Python, so its share of the oracle and parity
groups is capped by ``--emulated-max-length`` and ``--emulated-large-size``;
the full grid runs on the native backend.

The report prints per-group totals; the exit code is nonzero on any mismatch.

Usage:
    python eval/run_equivalence.py                          # full grid
    python eval/run_equivalence.py --quick                  # reduced sizes
    python eval/run_equivalence.py --only kernels --pairs 1000
"""
from __future__ import annotations

import argparse
import itertools
import os
import random
import sys
import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Dict, List

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np

from vector_sort.bench import PATTERNS, gen_input
from vector_sort.lanes import NUMPY_AVAILABLE, LaneMode
from vector_sort.merge import MergeKernel, merge_kernel
from vector_sort.network import (
    best16_sorter,
    bitonic_sorter,
    odd_even_sorter,
    verify_zero_one,
)
from vector_sort.parallel import corank_partition, sort_parallel
from vector_sort.sorter import SortConfig, sort_single

GROUPS = ("networks", "kernels", "corank", "oracle", "parity")
THREAD_COUNTS = (1, 2, 3, 7, 8, 64)


@dataclass
class GroupResult:
    group: str
    checks: int = 0
    mismatches: int = 0
    elapsed_s: float = 0.0
    notes: List[str] = field(default_factory=list)

    def record(self, ok: bool, note: str) -> None:
        self.checks += 1
        if not ok:
            self.mismatches += 1
            if len(self.notes) < 10:
                self.notes.append(note)


# ---------------------------------------------------------------------------
# Groups
# ---------------------------------------------------------------------------
def check_networks(res: GroupResult, args) -> None:
    expected = {
        bitonic_sorter: {4: 6, 8: 24, 16: 80, 32: 240},
        odd_even_sorter: {4: 5, 8: 19, 16: 63, 32: 191},
    }
    for build, counts in expected.items():
        for n, count in counts.items():
            net = build(n)
            res.record(net.size == count, f"{build.__name__}({n}) has {net.size} comparators, expected {count}")
        for n in (4, 8, 16):
            res.record(verify_zero_one(build(n)), f"{build.__name__}({n}) fails zero-one")
    best = best16_sorter()
    res.record(best.size == 60, f"best16 has {best.size} comparators")
    res.record(verify_zero_one(best), "best16 fails zero-one")


def _kernel_outputs(a, b, cfg: SortConfig) -> Dict[str, List[int]]:
    lanes = cfg.lanes()
    return {
        kind.value: lanes.to_list(merge_kernel(a, b, kind, lanes, cfg.W, cfg.hybrid_split))
        for kind in MergeKernel
    }


def check_kernels(res: GroupResult, args) -> None:
    rng = random.Random(args.seed)
    for backend in args.backends:
        cfg = SortConfig(backend=backend)
        for n in (8, 16, 32, 64):
            h = n // 2
            for _ in range(args.pairs):
                a = sorted(rng.randint(-50, 50) for _ in range(h))
                b = sorted(rng.randint(-50, 50) for _ in range(h))
                outs = _kernel_outputs(a, b, cfg)
                expected = sorted(a + b)
                ok = all(o == expected for o in outs.values())
                res.record(ok, f"{backend} n={n} a={a} b={b}")
        for ones_a, ones_b in itertools.product(range(5), repeat=2):
            a = [0] * (4 - ones_a) + [1] * ones_a
            b = [0] * (4 - ones_b) + [1] * ones_b
            outs = _kernel_outputs(a, b, cfg)
            ok = all(o == sorted(a + b) for o in outs.values())
            res.record(ok, f"{backend} binary a={a} b={b}")


def check_corank(res: GroupResult, args) -> None:
    rng = random.Random(args.seed)
    for na in range(17):
        for nb in range(17):
            a = sorted(rng.randint(0, 6) for _ in range(na))
            b = sorted(rng.randint(0, 6) for _ in range(nb))
            for k in range(na + nb + 1):
                # Oracle: merge with ties to a, then count how many of the first k came from a.
                tagged = sorted([(v, 0, i) for i, v in enumerate(a)] + [(v, 1, j) for j, v in enumerate(b)])
                i_expected = sum(1 for t in tagged[:k] if t[1] == 0)
                got = corank_partition(a, b, k)
                res.record(got == (i_expected, k - i_expected), f"a={a} b={b} k={k} got={got}")


def _limits(args, backend: str):
    """(max length, large size, all-equal size) for one backend."""
    if backend == LaneMode.EMULATED.value:
        return (
            min(args.max_length, args.emulated_max_length),
            min(args.large_size, args.emulated_large_size),
            min(args.all_equal_size, args.emulated_large_size),
        )
    return args.max_length, args.large_size, args.all_equal_size


def check_oracle(res: GroupResult, args) -> None:
    for backend in args.backends:
        cfg = SortConfig(backend=backend)
        lanes = cfg.lanes()
        max_length, large_size, all_equal_size = _limits(args, backend)
        for pattern in PATTERNS:
            for n in range(0, max_length + 1, args.length_step):
                data = gen_input(pattern, n, args.seed + n)
                expected = sorted(data)
                res.record(lanes.to_list(sort_single(data, cfg)) == expected, f"{backend} single {pattern} n={n}")
                for T in THREAD_COUNTS:
                    got = lanes.to_list(sort_parallel(data, cfg, T))
                    res.record(got == expected, f"{backend} T={T} {pattern} n={n}")
        rng = np.random.default_rng(args.seed)
        for _ in range(args.large_count):
            n = int(rng.integers(1, large_size + 1))
            data = np.asarray(gen_input("random", n, int(rng.integers(1 << 30))), dtype=np.int32)
            T = int(rng.choice(THREAD_COUNTS))
            got = np.asarray(sort_parallel(data, cfg, T))
            res.record(np.array_equal(got, np.sort(data)), f"{backend} large n={n} T={T}")
        data = np.full(all_equal_size, 7, dtype=np.int32)
        got = np.asarray(sort_single(data, cfg))
        res.record(np.array_equal(got, data), f"{backend} all-equal n={len(data)}")


def check_parity(res: GroupResult, args) -> None:
    if not NUMPY_AVAILABLE:
        print("  ⚠️ numpy unavailable, skipping backend parity")
        return
    emulated = SortConfig(backend=LaneMode.EMULATED)
    native = SortConfig(backend=LaneMode.NATIVE)
    for pattern in PATTERNS:
        for n in range(0, min(args.max_length, args.emulated_max_length) + 1, max(1, args.length_step * 7)):
            data = gen_input(pattern, n, args.seed)
            for T in (1, 3, 8):
                left = emulated.lanes().to_list(sort_parallel(data, emulated, T))
                right = native.lanes().to_list(sort_parallel(data, native, T))
                res.record(left == right, f"parity {pattern} n={n} T={T}")


CHECKS: Dict[str, Callable] = {
    "networks": check_networks,
    "kernels": check_kernels,
    "corank": check_corank,
    "oracle": check_oracle,
    "parity": check_parity,
}


# ---------------------------------------------------------------------------
# Aggregate reporting
# ---------------------------------------------------------------------------
def report(results: List[GroupResult]) -> int:
    print(f"\n{'='*70}")
    print(f"EQUIVALENCE REPORT: {len(results)} groups")
    print(f"{'='*70}\n")
    print(f"{'Group':<12} {'Checks':>10} {'Mismatch':>10} {'Time(s)':>10}")
    print("-" * 70)
    total_checks = total_bad = 0
    for r in results:
        print(f"{r.group:<12} {r.checks:>10} {r.mismatches:>10} {r.elapsed_s:>10.1f}")
        total_checks += r.checks
        total_bad += r.mismatches
    print("-" * 70)
    print(f"{'TOTAL':<12} {total_checks:>10} {total_bad:>10}")

    failing = defaultdict(list)
    for r in results:
        failing[r.group].extend(r.notes)
    for group, notes in failing.items():
        if notes:
            print(f"\n❌ {group} mismatches (first {len(notes)}):")
            for note in notes:
                print(f"  {note[:160]}")
    if total_bad == 0:
        print("\n✅ All checks passed")
    return 1 if total_bad else 0


# ---------------------------------------------------------------------------
# Main
# ---------------------------------------------------------------------------
def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--only", choices=GROUPS, action="append", default=None)
    ap.add_argument("--quick", action="store_true", help="reduced grid for a fast smoke run")
    ap.add_argument("--pairs", type=int, default=10_000, help="random run pairs per kernel width")
    ap.add_argument("--max-length", type=int, default=4096)
    ap.add_argument("--length-step", type=int, default=1)
    ap.add_argument("--large-count", type=int, default=100)
    ap.add_argument("--large-size", type=int, default=1 << 22)
    ap.add_argument("--all-equal-size", type=int, default=1_000_003)
    ap.add_argument("--emulated-max-length", type=int, default=512)
    ap.add_argument("--emulated-large-size", type=int, default=1 << 15)
    ap.add_argument("--backend", choices=[m.value for m in LaneMode], action="append", default=None)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    if args.quick:
        args.pairs, args.max_length, args.length_step = 200, 512, 7
        args.large_count, args.large_size, args.all_equal_size = 3, 1 << 15, 10_003
    default_backends = [LaneMode.EMULATED.value] + ([LaneMode.NATIVE.value] if NUMPY_AVAILABLE else [])
    args.backends = args.backend or default_backends

    results: List[GroupResult] = []
    for group in args.only or GROUPS:
        print(f"▶ {group} ...")
        res = GroupResult(group)
        t0 = time.perf_counter()
        CHECKS[group](res, args)
        res.elapsed_s = time.perf_counter() - t0
        mark = "✓" if res.mismatches == 0 else "✗"
        print(f"  {mark} {res.checks} checks, {res.mismatches} mismatches ({res.elapsed_s:.1f}s)")
        results.append(res)
    return report(results)


if __name__ == "__main__":
    sys.exit(main())
