"""
Comparator Networks
-------------------
Construction, application and verification of the data-independent networks
the sorter is built from:

    bitonic_sorter(n)          (n/4)*k*(k+1) comparators   4:6  8:24  16:80  32:240
    odd_even_sorter(n)         Batcher merge-exchange       4:5  8:19  16:63  32:191
    best16_sorter()            60 comparators, 10 layers, 16 channels
    bitonic_merge_network(n)   (n/2)*k comparators in k layers, two ascending runs

All comparators are normalized to ascending orientation (lo < hi: min goes to
lo, max to hi). Descending output is obtained by reversing the result rather
than by storing an orientation per comparator.

Layers are explicit: within a layer no channel appears twice, so a vectorized
executor can issue one layer as one batch of lane-wise min/max operations.
``ComparatorNetwork`` checks this at construction.

Verification uses the zero-one principle: a network sorts every input iff it
sorts every binary input. Binary vectors are packed into integers and the whole
2^n input space is pushed through the network at once with numpy bit operations.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .errors import NetworkError

MAX_CHANNELS = 64
ZERO_ONE_LIMIT = 24

Pair = Tuple[int, int]


# ---------------------------------------------------------------------------
# Data model
# ---------------------------------------------------------------------------
@dataclass(frozen=True, order=True)
class Comparator:
    """Compare-exchange placing the min on ``lo`` and the max on ``hi``."""

    lo: int
    hi: int

    def __post_init__(self) -> None:
        if not 0 <= self.lo < self.hi:
            raise NetworkError(f"comparator ({self.lo},{self.hi}) must satisfy 0 <= lo < hi")


@dataclass(frozen=True)
class ComparatorNetwork:
    """Ordered layers of parallel comparators over ``n`` channels."""

    n: int
    layers: Tuple[Tuple[Comparator, ...], ...]
    name: str = ""

    def __post_init__(self) -> None:
        if self.n < 1:
            raise NetworkError(f"network needs at least one channel, got n={self.n}")
        for k, layer in enumerate(self.layers):
            used = set()
            for c in layer:
                if c.hi >= self.n:
                    raise NetworkError(f"layer {k}: comparator ({c.lo},{c.hi}) outside {self.n} channels")
                if c.lo in used or c.hi in used:
                    raise NetworkError(f"layer {k}: channel reused by ({c.lo},{c.hi})")
                used.update((c.lo, c.hi))

    # -- shape --------------------------------------------------------------
    @property
    def size(self) -> int:
        """Total comparator count."""
        return sum(len(layer) for layer in self.layers)

    @property
    def depth(self) -> int:
        return len(self.layers)

    def comparators(self) -> Iterator[Comparator]:
        for layer in self.layers:
            yield from layer

    def pairs(self) -> List[Pair]:
        return [(c.lo, c.hi) for c in self.comparators()]

    # -- builders -----------------------------------------------------------
    @classmethod
    def from_layers(cls, n: int, layers: Iterable[Iterable[Pair]], name: str = "") -> "ComparatorNetwork":
        return cls(
            n=n,
            layers=tuple(tuple(Comparator(lo, hi) for lo, hi in layer) for layer in layers),
            name=name,
        )

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[Pair], name: str = "") -> "ComparatorNetwork":
        """Layer an ordered comparator list as-soon-as-possible.

        Each comparator goes one layer after the latest layer touching either of
        its channels, which keeps every data dependency in order.
        """
        ready = [0] * n
        layers: List[List[Pair]] = []
        for lo, hi in pairs:
            if not (0 <= lo < hi < n):
                raise NetworkError(f"comparator ({lo},{hi}) invalid for {n} channels")
            k = max(ready[lo], ready[hi])
            if k == len(layers):
                layers.append([])
            layers[k].append((lo, hi))
            ready[lo] = ready[hi] = k + 1
        return cls.from_layers(n, layers, name)

    # -- text formats -------------------------------------------------------
    def dump(self) -> str:
        """Render as ``layer k: (lo,hi) ...`` lines (golden-file format)."""
        lines = [f"# {self.name or 'network'} n={self.n} size={self.size} depth={self.depth}"]
        for k, layer in enumerate(self.layers):
            lines.append(f"layer {k}: " + " ".join(f"({c.lo},{c.hi})" for c in layer))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_dump(cls, text: str) -> "ComparatorNetwork":
        """Parse the output of :meth:`dump`."""
        header = re.search(r"^#\s*(\S+)\s+n=(\d+)", text, re.MULTILINE)
        if not header:
            raise NetworkError("dump is missing its '# name n=..' header")
        name, n = header.group(1), int(header.group(2))
        layers = []
        for line in text.splitlines():
            if line.startswith("layer"):
                body = line.split(":", 1)[1]
                layers.append([(int(a), int(b)) for a, b in re.findall(r"\((\d+),(\d+)\)", body)])
        return cls.from_layers(n, layers, "" if name == "network" else name)

    def to_dot(self) -> str:
        """Graphviz rendering: channels as rows, one cluster per layer."""
        out = [f'digraph "{self.name or "network"}" {{', "  rankdir=LR;", "  node [shape=point];"]
        for k, layer in enumerate(self.layers):
            out.append(f"  subgraph cluster_{k} {{ label=\"layer {k}\";")
            for c in layer:
                out.append(f"    l{k}_{c.lo} -> l{k}_{c.hi} [arrowhead=none];")
            out.append("  }")
        out.append("}")
        return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------
def _check_channels(n: int, limit: Optional[int] = MAX_CHANNELS) -> int:
    if not isinstance(n, int) or n < 2 or n & (n - 1):
        raise NetworkError(f"channel count must be a power of two >= 2, got {n!r}")
    if limit is not None and n > limit:
        raise NetworkError(f"channel count {n} exceeds the {limit}-channel limit")
    return n.bit_length() - 1


def _half_cleaners(n: int, start_stride: int) -> List[List[Pair]]:
    layers = []
    stride = start_stride
    while stride >= 1:
        layers.append([(b + i, b + i + stride) for b in range(0, n, 2 * stride) for i in range(stride)])
        stride //= 2
    return layers


def _flip(n: int, size: int) -> List[Pair]:
    """Mirror layer: compares i with size-1-i inside each block of ``size``.

    Equivalent to reversing the upper half of the block and running a half
    cleaner, which is how two ascending runs become one bitonic sequence.
    """
    half = size // 2
    return [(b + i, b + size - 1 - i) for b in range(0, n, size) for i in range(half)]


@lru_cache(maxsize=None)
def bitonic_sorter(n: int) -> ComparatorNetwork:
    """Bitonic sorter in all-ascending form."""
    _check_channels(n)
    layers: List[List[Pair]] = []
    size = 2
    while size <= n:
        layers.append(_flip(n, size))
        layers.extend(_half_cleaners(n, size // 4))
        size *= 2
    return ComparatorNetwork.from_layers(n, layers, f"bitonic-{n}")


@lru_cache(maxsize=None)
def odd_even_sorter(n: int) -> ComparatorNetwork:
    """Batcher's merge-exchange sort; one layer per (p, d) step."""
    t = _check_channels(n)
    layers: List[List[Pair]] = []
    p = 1 << (t - 1)
    while p > 0:
        q, r, d = 1 << (t - 1), 0, p
        while d > 0:
            layers.append([(i, i + d) for i in range(n - d) if (i & p) == r])
            d, q, r = q - p, q // 2, p
        p //= 2
    return ComparatorNetwork.from_layers(n, [layer for layer in layers if layer], f"odd-even-{n}")


# Best known 16-input network by size: 60 comparators, 10 layers.
_BEST16_LAYERS: Tuple[Tuple[Pair, ...], ...] = (
    ((0, 13), (1, 12), (2, 15), (3, 14), (4, 8), (5, 6), (7, 11), (9, 10)),
    ((0, 5), (1, 7), (2, 9), (3, 4), (6, 13), (8, 14), (10, 15), (11, 12)),
    ((0, 1), (2, 3), (4, 5), (6, 8), (7, 9), (10, 11), (12, 13), (14, 15)),
    ((0, 2), (1, 3), (4, 10), (5, 11), (6, 7), (8, 9), (12, 14), (13, 15)),
    ((1, 2), (3, 12), (4, 6), (5, 7), (8, 10), (9, 11), (13, 14)),
    ((1, 4), (2, 6), (5, 8), (7, 10), (9, 13), (11, 14)),
    ((2, 4), (3, 6), (9, 12), (11, 13)),
    ((3, 5), (6, 8), (7, 9), (10, 12)),
    ((3, 4), (5, 6), (7, 8), (9, 10), (11, 12)),
    ((6, 7), (8, 9)),
)


@lru_cache(maxsize=None)
def best16_sorter() -> ComparatorNetwork:
    return ComparatorNetwork.from_layers(16, _BEST16_LAYERS, "best-16")


def bitonic_merge_pairs(n: int) -> List[List[Pair]]:
    """Layers of the n-input merger of two ascending runs (no channel cap).

    Layer 0 is the mirror layer, which folds the reversal of the second run
    into the comparator wiring; layers 1.. are half cleaners of stride n/4 .. 1.
    After layer 0 the two halves are independent.
    """
    _check_channels(n, limit=None)
    return [_flip(n, n)] + _half_cleaners(n, n // 4)


@lru_cache(maxsize=None)
def bitonic_merge_network(n: int) -> ComparatorNetwork:
    _check_channels(n)
    return ComparatorNetwork.from_layers(n, bitonic_merge_pairs(n), f"bitonic-merge-{n}")


class NetworkKind(Enum):
    """Column-sort network family."""

    BEST = "best"
    ODD_EVEN = "odd-even"
    BITONIC = "bitonic"


def column_network(channels: int, kind: NetworkKind = NetworkKind.BEST) -> ComparatorNetwork:
    """Network used to sort each column of an R-register block.

    ``BEST`` means the 16-input best network when R is 16 and odd-even
    otherwise.
    """
    if kind is NetworkKind.BITONIC:
        return bitonic_sorter(channels)
    if kind is NetworkKind.BEST and channels == 16:
        return best16_sorter()
    return odd_even_sorter(channels)


# ---------------------------------------------------------------------------
# Application
# ---------------------------------------------------------------------------
def apply_network(net: ComparatorNetwork, data: Sequence, descending: bool = False) -> List:
    """Scalar reference executor: each comparator in order, min to lo, max to hi."""
    if len(data) != net.n:
        raise NetworkError(f"network has {net.n} channels but data has {len(data)} elements")
    x = list(data)
    for layer in net.layers:
        for c in layer:
            a, b = x[c.lo], x[c.hi]
            x[c.lo], x[c.hi] = min(a, b), max(a, b)
    if descending:
        x.reverse()
    return x


# ---------------------------------------------------------------------------
# Zero-one verification
# ---------------------------------------------------------------------------
def _push_binary(net: ComparatorNetwork, vectors: np.ndarray) -> np.ndarray:
    """Apply the network to packed binary vectors (bit i = channel i)."""
    v = vectors.copy()
    one = np.uint64(1)
    for layer in net.layers:
        for c in layer:
            lo, hi = np.uint64(c.lo), np.uint64(c.hi)
            swap = ((v >> lo) & one) & ~((v >> hi) & one) & one
            v ^= (swap << lo) | (swap << hi)
    return v


def _sorted_mask(v: np.ndarray, n: int) -> np.ndarray:
    # Ascending binary output: zeros on the low channels, ones on the high ones,
    # i.e. the complement within n bits is of the form 2^m - 1.
    full = np.uint64((1 << n) - 1)
    u = ~v & full
    return (u & (u + np.uint64(1))) == 0


def _all_binary(n: int) -> np.ndarray:
    if n > ZERO_ONE_LIMIT:
        raise NetworkError(f"exhaustive zero-one check limited to n <= {ZERO_ONE_LIMIT}, got {n}")
    return np.arange(1 << n, dtype=np.uint64)


def _two_run_binary(n: int) -> np.ndarray:
    if n % 2:
        raise NetworkError(f"two-run inputs need an even channel count, got {n}")
    h = n // 2
    vectors = []
    for ones_a in range(h + 1):
        low = ((1 << ones_a) - 1) << (h - ones_a)
        for ones_b in range(h + 1):
            vectors.append(low | (((1 << ones_b) - 1) << (n - ones_b)))
    return np.array(vectors, dtype=np.uint64)


def verify_zero_one(net: ComparatorNetwork) -> bool:
    """True iff the network sorts every binary vector of length n."""
    if net.n == 1:
        return True
    return bool(_sorted_mask(_push_binary(net, _all_binary(net.n)), net.n).all())


def verify_merge_zero_one(net: ComparatorNetwork) -> bool:
    """Zero-one check restricted to inputs made of two ascending binary runs."""
    return bool(_sorted_mask(_push_binary(net, _two_run_binary(net.n)), net.n).all())


def zero_one_counterexample(net: ComparatorNetwork) -> Optional[List[int]]:
    """First binary input the network fails to sort, as a 0/1 list, or None."""
    if net.n == 1:
        return None
    vectors = _all_binary(net.n)
    bad = np.flatnonzero(~_sorted_mask(_push_binary(net, vectors), net.n))
    if bad.size == 0:
        return None
    v = int(vectors[bad[0]])
    return [(v >> i) & 1 for i in range(net.n)]
