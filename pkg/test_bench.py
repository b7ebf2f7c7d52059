"""Benchmark harness: inputs, suites, validation, CSV output and the CLI."""

import json

import pytest

import bench as bench_cli
from vector_sort import bench
from vector_sort.bench import (
    BenchOptions,
    BenchRecord,
    baseline_sort,
    bench_geometry_sweep,
    bench_merge_kernels,
    bench_overall,
    gen_input,
    geometry_cells,
    hybrid_beats_serial,
    parse_pattern,
    read_csv,
    speedup_table,
    time_median,
    write_csv,
)
from vector_sort.errors import BenchValidationError, UnknownPatternError
from vector_sort.validation import SortValidator, ValidationError, multiset_hash


@pytest.fixture
def quick(tmp_path):
    return BenchOptions(reps=1, warmup=0, sample_size=256, kernel_pairs=16,
                        failure_log=str(tmp_path / "failures.txt"))


# ---------------------------------------------------------------------------
# Inputs
# ---------------------------------------------------------------------------
def test_gen_input_simple_patterns():
    assert gen_input("sorted", 5, 0) == [0, 1, 2, 3, 4]
    assert gen_input("reverse", 3, 0) == [2, 1, 0]
    assert gen_input("organ-pipe", 6, 0) == [0, 1, 2, 2, 1, 0]
    assert gen_input("random", 0, 1) == []


def test_gen_input_deterministic():
    assert gen_input("random", 65536, 42) == gen_input("random", 65536, 42)
    assert gen_input("random", 100, 42) != gen_input("random", 100, 43)


def test_gen_input_random_is_32_bit():
    data = gen_input("random", 5000, 7)
    assert min(data) >= -(2 ** 31) and max(data) <= 2 ** 31 - 1
    assert min(data) < 0 < max(data)


@pytest.mark.parametrize("pattern,k", [("dup-4", 4), ("dup-k", 16), ("dup-1", 1)])
def test_gen_input_dup_k(pattern, k):
    data = gen_input(pattern, 3000, 5)
    assert len(set(data)) <= k
    assert len(set(data)) >= 1


@pytest.mark.parametrize("pattern", ["zigzag", "dup-", "dup-0", ""])
def test_gen_input_unknown_pattern(pattern):
    with pytest.raises(UnknownPatternError):
        gen_input(pattern, 10, 0)


def test_gen_input_negative_size():
    with pytest.raises(ValueError):
        gen_input("sorted", -1, 0)


@pytest.mark.parametrize("pattern,expected", [
    ("Random", ("random", 0)),
    ("dup-8", ("dup-k", 8)),
    ("dup-k", ("dup-k", 16)),
    (" organ-pipe ", ("organ-pipe", 0)),
])
def test_parse_pattern(pattern, expected):
    assert parse_pattern(pattern) == expected


@pytest.mark.parametrize("threads", [1, 3, 8])
def test_baseline_sort_matches_sorted(threads):
    data = gen_input("random", 1001, 9)
    assert baseline_sort(data, threads) == sorted(data)
    assert baseline_sort([], threads) == []


def test_time_median_checks_every_rep():
    seen = []
    elapsed = time_median(lambda: 5, reps=3, warmup=2, check=seen.append)
    assert seen == [5, 5, 5]
    assert elapsed >= 0


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------
def test_multiset_hash_order_independent():
    assert multiset_hash([3, 1, 2]) == multiset_hash([1, 2, 3])
    assert multiset_hash([1, 1, 2]) != multiset_hash([1, 2, 2])
    assert multiset_hash([]) == 0
    assert multiset_hash([-(2 ** 31), 2 ** 31 - 1]) == multiset_hash([2 ** 31 - 1, -(2 ** 31)])


def test_validator_accepts_sorted_permutation():
    result = SortValidator([3, 1, 2]).validate([1, 2, 3])
    assert result.is_valid and result.errors == []


def test_validator_reports_each_failure():
    v = SortValidator([3, 1, 2])
    assert v.validate([1, 3, 2]).errors == [ValidationError.NOT_ASCENDING]
    assert v.validate([1, 3, 2]).first_violation == 1
    assert v.validate([1, 2, 4]).errors == [ValidationError.MULTISET_MISMATCH]
    assert ValidationError.LENGTH_MISMATCH in v.validate([1, 2]).errors


def test_validator_runs():
    v = SortValidator([4, 3, 2, 1])
    assert v.validate_runs([3, 4, 1, 2], 2).is_valid
    assert v.validate_runs([4, 3, 1, 2], 2).errors == [ValidationError.RUNS_NOT_ASCENDING]


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------
def test_geometry_cells_match_valid_table_entries():
    cells = {(label, X) for label, _, _, X in geometry_cells()}
    assert ("R=16*", 16) in cells
    assert ("R=4", 32) not in cells
    assert {X for label, X in cells if label == "R=4"} == {4, 8, 16}
    assert {X for label, X in cells if label == "R=32"} == {32, 64}
    assert len(cells) == 14


def test_geometry_sweep(quick):
    records = bench_geometry_sweep(quick)
    variants = {r.variant for r in records}
    assert "R=16*,X=16" in variants
    assert not any(v.startswith("R=4,X=32") for v in variants)
    assert all(r.runtime_us > 0 and r.reps == 1 for r in records)


def test_merge_kernel_suite(quick):
    records = bench_merge_kernels(quick)
    assert len(records) == 9
    pairs = {(r.kernel, r.variant) for r in records}
    assert ("hybrid", "2x16->32") in pairs
    assert ("serial", "2x32->64") in pairs
    assert all(r.rate_me_s > 0 and r.rate_me_s == r.size / r.runtime_us for r in records)
    assert hybrid_beats_serial(records) in (True, False)


def test_merge_kernel_suite_native_batches_pairs(quick):
    quick.config = quick.config.with_(backend="native")
    records = bench_merge_kernels(quick)
    assert len(records) == 9
    assert {r.size for r in records} == {16 * 16, 32 * 16, 64 * 16}
    assert hybrid_beats_serial(records) in (True, False)


def test_overall_suite(quick):
    records = bench_overall([512, 4096], threads=2, opts=quick)
    keys = [(r.algorithm, r.threads, r.size) for r in records]
    assert keys == sorted(keys)
    assert ("baseline", 1, 512) in keys
    assert len(records) == 2 * 2 * 2
    table = speedup_table(records)
    assert len(table) == 4
    assert (table["speedup"] > 0).all()


def test_overall_skips_sizes_that_do_not_fit(quick, monkeypatch):
    monkeypatch.setattr(bench, "available_memory_bytes", lambda: 1024)
    records = bench_overall([512], threads=1, opts=quick)
    assert len(records) == 2
    assert all(r.skipped and r.variant.startswith("skipped") for r in records)


def test_invalid_output_is_rejected(quick, monkeypatch, tmp_path):
    monkeypatch.setattr(bench, "sort_parallel", lambda data, cfg, T: list(data))
    with pytest.raises(BenchValidationError):
        bench_overall([512], threads=1, opts=quick)
    assert "VALIDATION FAILURE" in (tmp_path / "failures.txt").read_text()


def test_default_sizes_step_by_eight():
    assert bench.DEFAULT_SIZES == (2 ** 9, 2 ** 12, 2 ** 15, 2 ** 18, 2 ** 21, 2 ** 24, 2 ** 27)


def test_options_validate():
    with pytest.raises(ValueError):
        BenchOptions(reps=0)
    with pytest.raises(UnknownPatternError):
        BenchOptions(pattern="nope")


def test_options_from_settings():
    opts = BenchOptions.from_settings({"bench_reps": 7, "bench_seed": 1, "registers": 8}, reps=3)
    assert (opts.reps, opts.seed, opts.config.R) == (3, 1, 8)


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------
def test_csv_round_trip(tmp_path):
    records = [
        BenchRecord.timed("overall", "random", 4096, "neon-ms", "hybrid", 4, 5, 1234.5678901234),
        BenchRecord.timed("kernels", "random", 512, "hybrid-kernel", "hybrid", 1, 5, 0.1 + 0.2, "2x16->32"),
        BenchRecord("overall", "dup-8", 2 ** 27, "baseline", "host", 1, 0, 0.0, 0.0, "skipped: needs ~1 MB"),
    ]
    path = tmp_path / "out.csv"
    write_csv(records, str(path))
    header = path.read_text().splitlines()[0]
    assert header == "suite,pattern,size,algorithm,kernel,threads,reps,runtime_us,rate_me_s,variant"
    assert read_csv(str(path)) == records


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------
@pytest.fixture
def cli_home(tmp_path, monkeypatch):
    path = tmp_path / "settings.json"
    path.write_text(json.dumps({
        "kernel_bench_pairs": 8,
        "bench_warmup": 0,
        "geometry_sample_size": 256,
        "failure_log": str(tmp_path / "failures.txt"),
    }))
    monkeypatch.setenv("VECTOR_SORT_SETTINGS", str(path))
    monkeypatch.delenv("VECTOR_SORT_BACKEND", raising=False)
    return tmp_path


def test_cli_kernels_writes_readable_csv(cli_home):
    out = cli_home / "kernels.csv"
    assert bench_cli.main(["--suite", "kernels", "--reps", "1", "--csv", str(out)]) == bench_cli.EXIT_OK
    records = read_csv(str(out))
    assert len(records) == 9
    assert {r.algorithm for r in records} == {"serial-kernel", "vectorized-kernel", "hybrid-kernel"}


def test_cli_unknown_pattern_is_usage_error(cli_home):
    assert bench_cli.main(["--suite", "overall", "--pattern", "bogus"]) == bench_cli.EXIT_USAGE


def test_cli_invalid_sort_output_exits_nonzero(cli_home, monkeypatch):
    monkeypatch.setattr(bench, "sort_parallel", lambda data, cfg=None, T=None: sorted(data, reverse=True))
    code = bench_cli.main(["--suite", "overall", "--size", "512", "--reps", "1", "--threads", "1"])
    assert code == bench_cli.EXIT_VALIDATION
    assert "VALIDATION FAILURE" in (cli_home / "failures.txt").read_text()


def _kernel_rows(serial_us, hybrid_us):
    return [
        BenchRecord.timed("kernels", "random", 512, "serial-kernel", "serial", 1, 1, serial_us, "2x16->32"),
        BenchRecord.timed("kernels", "random", 512, "hybrid-kernel", "hybrid", 1, 1, hybrid_us, "2x16->32"),
    ]


@pytest.mark.parametrize("backend,expected", [("native", bench_cli.EXIT_DIRECTION), ("emulated", bench_cli.EXIT_OK)])
def test_cli_slow_hybrid_fails_only_on_native(cli_home, monkeypatch, backend, expected):
    monkeypatch.setattr(bench_cli, "bench_merge_kernels", lambda opts: _kernel_rows(10.0, 20.0))
    assert bench_cli.main(["--suite", "kernels", "--backend", backend]) == expected


def test_cli_fast_hybrid_passes_on_native(cli_home, monkeypatch):
    monkeypatch.setattr(bench_cli, "bench_merge_kernels", lambda opts: _kernel_rows(20.0, 10.0))
    assert bench_cli.main(["--suite", "kernels", "--backend", "native"]) == bench_cli.EXIT_OK
