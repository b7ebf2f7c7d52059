"""
Register Block
--------------
An R x W block models R vector registers of W lanes each. Two operations run
on it before any merging happens:

* column_sort   : one comparator network over the R registers, applied
                  lane-parallel, so all W columns are sorted at once.
* transpose_rw  : turns the W sorted columns into W sorted runs of length R.

Run layout after ``transpose_rw``: column j occupies rows
j*R/W .. (j+1)*R/W - 1, in order, so flattening the block gives W contiguous
runs. The R x W transpose is decomposed into R/W square W x W base transposes,
each a pure lane permutation.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import List, Sequence, Tuple

from .errors import GeometryError, NetworkError
from .lanes import LaneBackend, Vector, get_backend
from .network import ComparatorNetwork


@dataclass
class Block:
    rows: List[Vector]
    backend: LaneBackend

    def __post_init__(self) -> None:
        if not self.rows:
            raise GeometryError("block needs at least one register")
        width = len(self.rows[0])
        if width < 1:
            raise GeometryError("registers need at least one lane")
        for r, row in enumerate(self.rows):
            if len(row) != width:
                raise GeometryError(f"row {r} has {len(row)} lanes, expected {width}")

    @property
    def R(self) -> int:
        return len(self.rows)

    @property
    def W(self) -> int:
        return len(self.rows[0])

    @classmethod
    def load(cls, data: Sequence[int], R: int, W: int, backend: LaneBackend = None) -> "Block":
        """Load R*W contiguous elements, row-major, into R registers."""
        backend = backend or get_backend()
        if R < 1 or W < 1:
            raise GeometryError(f"R and W must be >= 1, got R={R}, W={W}")
        if len(data) != R * W:
            raise GeometryError(f"block {R}x{W} needs {R * W} elements, got {len(data)}")
        flat = backend.vector(data)
        return cls([flat[r * W:(r + 1) * W] for r in range(R)], backend)

    def flatten(self) -> Vector:
        return self.backend.concat(self.rows)

    def to_lists(self) -> List[List[int]]:
        return [self.backend.to_list(row) for row in self.rows]


def column_sort(block: Block, net: ComparatorNetwork) -> Block:
    """Sort every column by running ``net`` across the registers."""
    if net.n != block.R:
        raise NetworkError(f"network has {net.n} channels but block has {block.R} registers")
    lanes = block.backend
    rows = list(block.rows)
    for layer in net.layers:
        for c in layer:
            x, y = rows[c.lo], rows[c.hi]
            rows[c.lo] = lanes.vmin(x, y)
            rows[c.hi] = lanes.vmax(x, y)
    return Block(rows, lanes)


@lru_cache(maxsize=None)
def _transpose_index(w: int) -> Tuple[Tuple[int, ...], ...]:
    # Output row i gathers lane i of every input row.
    return tuple(tuple(j * w + i for j in range(w)) for i in range(w))


def transpose_base(block: Block) -> Block:
    """Square W x W transpose: out[i][j] = in[j][i]."""
    if block.R != block.W:
        raise GeometryError(f"base transpose needs a square block, got {block.R}x{block.W}")
    lanes = block.backend
    flat = lanes.concat(block.rows)
    return Block([lanes.permute(flat, idx) for idx in _transpose_index(block.W)], lanes)


def transpose_rw(block: Block) -> Block:
    """Asymmetric R x W transpose built from R/W base transposes."""
    R, W = block.R, block.W
    if R % W:
        raise GeometryError(f"R={R} must be a multiple of W={W}")
    per_column = R // W
    out: List[Vector] = [None] * R  # type: ignore[list-item]
    for q in range(per_column):
        square = transpose_base(Block(block.rows[q * W:(q + 1) * W], block.backend))
        for i, row in enumerate(square.rows):
            out[i * per_column + q] = row
    return Block(out, block.backend)
