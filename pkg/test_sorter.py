"""Single-thread sorter: config, in-register stage and full sort."""

import random

import numpy as np
import pytest

from vector_sort import native
from vector_sort.errors import ElementRangeError, ElementTypeError, GeometryError
from vector_sort.lanes import ELEMENT_MAX, ELEMENT_MIN, LaneMode
from vector_sort.merge import MergeKernel
from vector_sort.network import NetworkKind
from vector_sort.sorter import (
    SortConfig,
    in_register_sort,
    in_register_stage,
    sort_in_place,
    sort_single,
)


@pytest.fixture(params=[LaneMode.EMULATED, LaneMode.NATIVE], ids=lambda m: m.value)
def cfg(request):
    return SortConfig(backend=request.param)


def _as_list(cfg, out):
    return cfg.lanes().to_list(out)


def test_default_config():
    cfg = SortConfig()
    assert (cfg.R, cfg.W, cfg.threshold) == (16, 4, 64)
    assert cfg.kernel is MergeKernel.HYBRID
    assert cfg.column_network().size == 60


def test_config_accepts_strings():
    cfg = SortConfig(kernel="serial", backend="native", network="odd-even")
    assert cfg.kernel is MergeKernel.SERIAL
    assert cfg.backend is LaneMode.NATIVE
    assert cfg.network is NetworkKind.ODD_EVEN


@pytest.mark.parametrize("R,W", [(6, 4), (12, 4), (128, 4), (1, 1), (16, 0)])
def test_config_rejects_bad_geometry(R, W):
    with pytest.raises(GeometryError):
        SortConfig(R=R, W=W)


def test_config_from_settings_overrides():
    settings = {"registers": 8, "lanes": 4, "kernel": "vectorized", "backend": "emulated", "network": "bitonic"}
    cfg = SortConfig.from_settings(settings, threads=3)
    assert (cfg.R, cfg.kernel, cfg.network, cfg.threads) == (8, MergeKernel.VECTORIZED, NetworkKind.BITONIC, 3)


def test_in_register_sort_random_block(cfg):
    rng = random.Random(64)
    data = [rng.randint(ELEMENT_MIN, ELEMENT_MAX) for _ in range(64)]
    assert _as_list(cfg, in_register_sort(data, cfg)) == sorted(data)


def test_in_register_sort_fig2_block(cfg):
    small = cfg.with_(R=4, W=4)
    data = [9, 2, 14, 7, 3, 12, 1, 16, 11, 5, 8, 4, 15, 10, 6, 13]
    assert _as_list(small, in_register_sort(data, small)) == list(range(1, 17))


def test_in_register_sort_sorted_block(cfg):
    data = list(range(64))
    assert _as_list(cfg, in_register_sort(data, cfg)) == data


def test_in_register_sort_length_mismatch(cfg):
    with pytest.raises(GeometryError):
        in_register_sort(list(range(63)), cfg)


@pytest.mark.parametrize("run_length", [16, 32, 64])
def test_in_register_stage_runs(run_length, cfg):
    rng = random.Random(run_length)
    data = [rng.randint(-100, 100) for _ in range(64)]
    out = _as_list(cfg, in_register_stage(data, cfg, run_length))
    for s in range(0, 64, run_length):
        assert out[s:s + run_length] == sorted(out[s:s + run_length])
    assert sorted(out) == sorted(data)


def test_in_register_stage_rejects_bad_run_length(cfg):
    with pytest.raises(GeometryError):
        in_register_stage(list(range(64)), cfg, 8)
    with pytest.raises(GeometryError):
        in_register_stage(list(range(64)), cfg, 48)


@pytest.mark.parametrize("R,network", [(4, "odd-even"), (8, "odd-even"), (16, "best"), (16, "bitonic"), (32, "odd-even")])
def test_every_geometry_sorts(R, network):
    cfg = SortConfig(R=R, W=4, network=network)
    rng = random.Random(R)
    data = [rng.randint(-1000, 1000) for _ in range(3 * cfg.threshold + 5)]
    assert sort_single(data, cfg) == sorted(data)


def test_sort_single_empty(cfg):
    assert _as_list(cfg, sort_single([], cfg)) == []


@pytest.mark.parametrize("n", [1, 2, 3, 63, 64, 65, 127, 128, 129, 1000])
def test_sort_single_lengths(n, cfg):
    rng = random.Random(n)
    data = [rng.randint(ELEMENT_MIN, ELEMENT_MAX) for _ in range(n)]
    assert _as_list(cfg, sort_single(data, cfg)) == sorted(data)


def test_sort_single_keeps_sentinel_valued_elements(cfg):
    data = [ELEMENT_MAX, 5, ELEMENT_MAX, ELEMENT_MIN, 0] * 7
    assert _as_list(cfg, sort_single(data, cfg)) == sorted(data)


def test_sort_single_all_equal_with_tail(cfg):
    data = [42] * 10_003
    assert _as_list(cfg, sort_single(data, cfg)) == data


@pytest.mark.parametrize("kernel", list(MergeKernel))
def test_sort_single_every_kernel(kernel):
    cfg = SortConfig(kernel=kernel)
    rng = random.Random(9)
    data = [rng.randint(-5, 5) for _ in range(777)]
    assert sort_single(data, cfg) == sorted(data)


def test_sort_single_accepts_numpy_input(cfg):
    data = np.random.default_rng(1).integers(-1000, 1000, size=300, dtype=np.int32)
    assert _as_list(cfg, sort_single(data, cfg)) == sorted(data.tolist())


def test_sort_single_rejects_out_of_range():
    with pytest.raises(ElementRangeError):
        sort_single([1, 2 ** 31])
    with pytest.raises(ElementRangeError):
        sort_single([-(2 ** 31) - 1, 0])


def test_pass_hook_reports_every_pass():
    seen = []
    sort_single(list(range(300, 0, -1)), SortConfig(), on_pass=seen.append)
    assert [t.pass_index for t in seen] == [0, 1, 2, 3]
    assert [t.run_length for t in seen] == [64, 128, 256, 320]
    assert all(t.elapsed_s >= 0 for t in seen)
    assert seen[0].extra == {"kernel": "vectorized", "blocks": 5}
    assert [t.extra["merges"] for t in seen[1:]] == [2, 1, 1]
    assert all(t.extra["kernel"] == "hybrid" for t in seen[1:])


def test_sort_in_place_list():
    buf = [5, 3, 9, 1, 7] * 20
    expected = sorted(buf)
    result = sort_in_place(buf)
    assert result is buf
    assert buf == expected


def test_sort_in_place_numpy():
    buf = np.arange(200, 0, -1, dtype=np.int32)
    sort_in_place(buf, SortConfig(backend="native"))
    assert buf.tolist() == list(range(1, 201))


@pytest.mark.parametrize("R,W", [(32, 32), (64, 16), (64, 1), (8, 8), (2, 2)])
def test_wide_geometries_sort(R, W, cfg):
    wide = cfg.with_(R=R, W=W, network="odd-even")
    assert wide.kernel_max_width == 4 * R * W
    rng = random.Random(R * 100 + W)
    data = [rng.randint(-10 ** 6, 10 ** 6) for _ in range(2 * wide.threshold + 7)]
    assert _as_list(wide, sort_single(data, wide)) == sorted(data)


@pytest.mark.parametrize("data", [[1.5, 2, 3], [1, "2"], np.array([0.5, 1.0])], ids=["floats", "str", "float-array"])
def test_sort_single_rejects_non_integers(data, cfg):
    with pytest.raises(ElementTypeError):
        sort_single(data, cfg)


def test_sort_single_accepts_int64_arrays(cfg):
    wide = np.array([5, -7, 2 ** 31 - 1], dtype=np.int64)
    assert _as_list(cfg, sort_single(wide, cfg)) == [-7, 5, 2 ** 31 - 1]


def test_native_stages_match_emulated_lane_for_lane():
    rng = random.Random(21)
    for R, network in ((16, "best"), (8, "odd-even"), (32, "bitonic")):
        emulated = SortConfig(R=R, network=network)
        native_cfg = emulated.with_(backend="native")
        data = [rng.randint(-50, 50) for _ in range(emulated.threshold)]
        run = R
        while run <= emulated.threshold:
            got = _as_list(native_cfg, in_register_stage(data, native_cfg, run))
            assert got == in_register_stage(data, emulated, run)
            run *= 2


@pytest.mark.skipif(not native.COMPILED_AVAILABLE, reason="numba not installed")
@pytest.mark.parametrize("kernel", list(MergeKernel))
def test_compiled_native_every_kernel(kernel):
    cfg = SortConfig(backend="native", kernel=kernel)
    assert cfg.compiled
    data = np.random.default_rng(4).integers(-(2 ** 31), 2 ** 31 - 1, size=5000, endpoint=True)
    assert sort_single(data, cfg).tolist() == sorted(data.tolist())


def test_native_without_compiler_falls_back_to_lane_ops(monkeypatch):
    monkeypatch.setattr(native, "COMPILED_AVAILABLE", False)
    cfg = SortConfig(backend="native")
    assert not cfg.compiled
    rng = random.Random(77)
    data = [rng.randint(-999, 999) for _ in range(333)]
    assert sort_single(data, cfg).tolist() == sorted(data)
