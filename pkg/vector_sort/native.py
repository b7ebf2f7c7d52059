"""
Compiled Native Pipeline
------------------------
numba-compiled hot loops behind the native lane backend:

    in_register_blocks   column sort, transpose and row merges of every R*W block
    merge_pass           one bottom-up pass of streaming 2W-window merges
    merge_into           one streaming merge into a caller's buffer

Merge kernels run from the step tables of ``merge.kernel_program``. A serial
step executes its comparators one at a time in network order; a vector step
gathers W pairs into two lane buffers, takes lane-wise min/max and scatters
them back. Serial, Vectorized and Hybrid differ only in their tables.

The compiled functions release the GIL, so ParallelSorter workers run them
concurrently. Without numba the native backend runs on the numpy lane
operations alone (``COMPILED_AVAILABLE`` is False).
"""

from __future__ import annotations

import logging
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

from .merge import SERIAL_STEP, KernelProgram, MergeKernel, kernel_program, select_kernel
from .network import ComparatorNetwork

logger = logging.getLogger(__name__)

try:
    import numba

    COMPILED_AVAILABLE = True
except Exception:  # pragma: no cover - optional accelerator
    numba = None  # type: ignore[assignment]
    COMPILED_AVAILABLE = False


def _compiled(fn):
    if not COMPILED_AVAILABLE:
        return fn
    return numba.njit(nogil=True)(fn)


# ---------------------------------------------------------------------------
# Kernels (compiled)
# ---------------------------------------------------------------------------
@_compiled
def _run_steps(s, base, steps, lo, hi, first, last, width, xs, ys):
    for t in range(first, last):
        p0 = steps[t, 1]
        p1 = steps[t, 2]
        if steps[t, 0] == SERIAL_STEP:
            for p in range(p0, p1):
                i = base + lo[p]
                j = base + hi[p]
                x = s[i]
                y = s[j]
                s[i] = min(x, y)
                s[j] = max(x, y)
        else:
            for r in range(p0, p1, width):
                m = min(width, p1 - r)
                for q in range(m):
                    xs[q] = s[base + lo[r + q]]
                    ys[q] = s[base + hi[r + q]]
                for q in range(m):
                    x = xs[q]
                    y = ys[q]
                    xs[q] = min(x, y)
                    ys[q] = max(x, y)
                for q in range(m):
                    s[base + lo[r + q]] = xs[q]
                    s[base + hi[r + q]] = ys[q]


@_compiled
def _drain_into(x, y, out, pos):
    # ties take from x
    i = 0
    j = 0
    nx = x.shape[0]
    ny = y.shape[0]
    while i < nx and j < ny:
        if y[j] < x[i]:
            out[pos] = y[j]
            j += 1
        else:
            out[pos] = x[i]
            i += 1
        pos += 1
    while i < nx:
        out[pos] = x[i]
        i += 1
        pos += 1
    while j < ny:
        out[pos] = y[j]
        j += 1
        pos += 1
    return pos


@_compiled
def _merge_runs(a, b, out, pos, steps, lo, hi, w):
    na = a.shape[0]
    nb = b.shape[0]
    if na < w or nb < w:
        _drain_into(a, b, out, pos)
        return
    last = steps.shape[0]
    win = np.empty(2 * w, np.int32)
    xs = np.empty(w, np.int32)
    ys = np.empty(w, np.int32)
    for q in range(w):
        win[q] = a[q]
        win[w + q] = b[q]
    _run_steps(win, 0, steps, lo, hi, 0, last, w, xs, ys)
    ia = w
    ib = w
    while True:
        for q in range(w):
            out[pos + q] = win[q]
        pos += w
        if ia + w > na or ib + w > nb:
            break
        # carry moves down, the next block comes from the run with the smaller head
        for q in range(w):
            win[q] = win[w + q]
        if a[ia] <= b[ib]:
            for q in range(w):
                win[w + q] = a[ia + q]
            ia += w
        else:
            for q in range(w):
                win[w + q] = b[ib + q]
            ib += w
        _run_steps(win, 0, steps, lo, hi, 0, last, w, xs, ys)
    rest = np.empty(na - ia + nb - ib, np.int32)
    _drain_into(a[ia:], b[ib:], rest, 0)
    _drain_into(win[w:], rest, out, pos)


@_compiled
def _merge_pass(src, dst, run, start, end, steps, lo, hi, w):
    merges = 0
    left = start
    while left < end:
        mid = min(left + run, end)
        right = min(left + 2 * run, end)
        if mid >= right:
            for p in range(left, right):
                dst[p] = src[p]
        else:
            _merge_runs(src[left:mid], src[mid:right], dst, left, steps, lo, hi, w)
            merges += 1
        left += 2 * run
    return merges


@_compiled
def _in_register_blocks(buf, R, W, clo, chi, steps, lo, hi, bounds):
    B = R * W
    col = np.empty(B, np.int32)
    xs = np.empty(W, np.int32)
    ys = np.empty(W, np.int32)
    rounds = bounds.shape[0] - 1
    for base in range(0, buf.shape[0], B):
        # column sort: one comparator across all W lanes of two registers
        for t in range(clo.shape[0]):
            i = base + clo[t] * W
            j = base + chi[t] * W
            for c in range(W):
                x = buf[i + c]
                y = buf[j + c]
                buf[i + c] = min(x, y)
                buf[j + c] = max(x, y)
        # column c becomes run c
        for r in range(R):
            for c in range(W):
                col[c * R + r] = buf[base + r * W + c]
        for e in range(B):
            buf[base + e] = col[e]
        run = R
        for k in range(rounds):
            for s in range(0, B, 2 * run):
                _run_steps(buf, base + s, steps, lo, hi, bounds[k], bounds[k + 1], W, xs, ys)
            run *= 2


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------
@lru_cache(maxsize=None)
def network_arrays(net: ComparatorNetwork) -> Tuple[np.ndarray, np.ndarray]:
    """(lo, hi) channel arrays in network order."""
    pairs = net.pairs()
    lo = np.asarray([p[0] for p in pairs], dtype=np.int64)
    hi = np.asarray([p[1] for p in pairs], dtype=np.int64)
    return lo, hi


@lru_cache(maxsize=None)
def round_program(R: int, target: int, kind: MergeKernel, split: int,
                  auto_kernel: bool, hybrid_max_window: int) -> Tuple[KernelProgram, np.ndarray]:
    """Row-merge rounds R -> target chained into one program, plus per-round step bounds."""
    tables, los, his, bounds = [], [], [], [0]
    offset, run = 0, R
    while run < target:
        n = 2 * run
        prog = kernel_program(n, select_kernel(kind, n, auto_kernel, hybrid_max_window), split)
        table = prog.steps.copy()
        table[:, 1:] += offset
        tables.append(table)
        los.append(prog.lo)
        his.append(prog.hi)
        offset += prog.size
        bounds.append(bounds[-1] + len(table))
        run = n
    if not tables:
        empty = np.zeros(0, dtype=np.int64)
        return KernelProgram(np.zeros((0, 3), dtype=np.int64), empty, empty), np.zeros(1, dtype=np.int64)
    chained = KernelProgram(np.concatenate(tables), np.concatenate(los), np.concatenate(his))
    return chained, np.asarray(bounds, dtype=np.int64)


def _window_program(W: int, kind: MergeKernel, split: int, auto_kernel: bool, hybrid_max_window: int) -> KernelProgram:
    return kernel_program(2 * W, select_kernel(kind, 2 * W, auto_kernel, hybrid_max_window), split)


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------
def in_register_blocks(
    buf: np.ndarray,
    R: int,
    W: int,
    net: ComparatorNetwork,
    target: int,
    kind: MergeKernel = MergeKernel.HYBRID,
    split: int = 1,
    auto_kernel: bool = True,
    hybrid_max_window: int = 32,
) -> np.ndarray:
    """Sort every R*W block of the int32 ``buf`` in place until runs are ``target`` long."""
    prog, bounds = round_program(R, target, kind, split, auto_kernel, hybrid_max_window)
    clo, chi = network_arrays(net)
    _in_register_blocks(buf, R, W, clo, chi, prog.steps, prog.lo, prog.hi, bounds)
    return buf


def merge_pass(
    src: np.ndarray,
    dst: np.ndarray,
    run: int,
    W: int,
    kind: MergeKernel = MergeKernel.HYBRID,
    split: int = 1,
    auto_kernel: bool = True,
    hybrid_max_window: int = 32,
    start: int = 0,
    end: Optional[int] = None,
) -> int:
    """Merge adjacent ``run``-long runs of src[start:end] into dst; returns the merge count."""
    prog = _window_program(W, kind, split, auto_kernel, hybrid_max_window)
    end = len(src) if end is None else end
    return int(_merge_pass(src, dst, run, start, end, prog.steps, prog.lo, prog.hi, W))


def merge_into(
    a: np.ndarray,
    b: np.ndarray,
    out: np.ndarray,
    offset: int,
    W: int,
    kind: MergeKernel = MergeKernel.HYBRID,
    split: int = 1,
    auto_kernel: bool = True,
    hybrid_max_window: int = 32,
) -> None:
    prog = _window_program(W, kind, split, auto_kernel, hybrid_max_window)
    _merge_runs(a, b, out, offset, prog.steps, prog.lo, prog.hi, W)
