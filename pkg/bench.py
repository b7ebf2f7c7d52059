#!/usr/bin/env python3
"""
Vector Sort Benchmark
=====================
Times the sorter on this host and writes the results as CSV.

Suites:
    geometry   in-register sort per block geometry (R x 4) and run length X
    kernels    Serial / Vectorized / Hybrid merge kernels, 2x8->16 .. 2x32->64
    overall    neon-ms vs the host sort, 1 and T threads, sizes 2^9 .. 2^27

Defaults come from config/sort_settings.json (see vector_sort/settings.py).

Usage:
    python bench.py --suite kernels --backend native
    python bench.py --suite overall --size 4096 --size 32768 --threads 4 --csv out.csv
    python bench.py --suite geometry --pattern dup-8 --reps 3

Exit codes: 0 success, 1 usage/configuration error, 2 validation failure,
3 Hybrid not faster than Serial at 2x16->32 on the native backend.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from vector_sort.bench import (
    BenchOptions,
    PATTERNS,
    bench_geometry_sweep,
    bench_merge_kernels,
    bench_overall,
    hybrid_beats_serial,
    records_to_frame,
    speedup_table,
    write_csv,
)
from vector_sort.errors import BenchValidationError, SortError
from vector_sort.lanes import LaneMode
from vector_sort.merge import MergeKernel

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_DIRECTION = 3


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--suite", required=True, choices=["geometry", "kernels", "overall"])
    ap.add_argument("--size", type=int, action="append", default=None,
                    help="element count for the overall suite (repeatable)")
    ap.add_argument("--pattern", default=None, help=f"input pattern: {', '.join(PATTERNS)} or dup-<k>")
    ap.add_argument("--threads", type=int, default=None, help="worker count T (0 = all hardware threads)")
    ap.add_argument("--kernel", choices=[k.value for k in MergeKernel], default=None)
    ap.add_argument("--reps", type=int, default=None, help="timed repetitions per record (median reported)")
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--csv", default=None, help="write records to this CSV file")
    ap.add_argument("--backend", choices=[m.value for m in LaneMode], default=None)
    ap.add_argument("--verbose", action="store_true")
    return ap


def run(args: argparse.Namespace) -> int:
    try:
        opts = BenchOptions.from_settings(reps=args.reps, seed=args.seed, pattern=args.pattern,
                                          threads=args.threads)
        cfg_changes = {k: v for k, v in (("kernel", args.kernel), ("backend", args.backend)) if v}
        if cfg_changes:
            opts.config = opts.config.with_(**cfg_changes)
        if args.size and any(s < 0 for s in args.size):
            raise ValueError("sizes must be >= 0")
    except (SortError, ValueError) as exc:
        print(f"❌ {exc}")
        return EXIT_USAGE

    print(f"🚀 Running {args.suite} suite ({opts.config.backend.value} lanes, "
          f"{opts.config.kernel.value} kernel, reps={opts.reps}, seed={opts.seed})")
    try:
        if args.suite == "geometry":
            records = bench_geometry_sweep(opts)
        elif args.suite == "kernels":
            records = bench_merge_kernels(opts)
        else:
            records = bench_overall(args.size, opts.threads, opts)
    except BenchValidationError as exc:
        print(f"❌ {exc}")
        print(f"   Details appended to {opts.failure_log}")
        return EXIT_VALIDATION
    except SortError as exc:
        print(f"❌ {exc}")
        return EXIT_USAGE

    frame = records_to_frame(records)
    print(frame.to_string(index=False))

    if args.suite == "overall":
        table = speedup_table(records)
        if not table.empty:
            print("\nHost-relative speedup (baseline / neon-ms):")
            print(table.to_string(index=False))
        skipped = sum(1 for r in records if r.skipped)
        if skipped:
            print(f"⚠️ {skipped} rows skipped for lack of memory")

    if args.csv:
        write_csv(records, args.csv)
        print(f"✅ Wrote {len(records)} records to {args.csv}")

    if args.suite == "kernels":
        verdict = hybrid_beats_serial(records)
        native = opts.config.backend is LaneMode.NATIVE
        if verdict is not None:
            mark = "✅" if verdict else ("❌" if native else "⚠️")
            note = "" if native else " (emulated lanes, informational)"
            print(f"{mark} Hybrid faster than Serial at 2x16->32: {verdict}{note}")
            if native and not verdict:
                return EXIT_DIRECTION
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
