"""
Lane Backends
-------------
Portability layer for the vector operations the sorter is written against.

A *vector* is a short sequence of 32-bit signed lanes. Kernels never touch a
concrete representation; they call the backend for the handful of operations
a 128-bit SIMD unit provides:

    vector / to_list      load and store lanes
    vmin / vmax           lane-wise min and max (the vectorized comparator)
    permute               lane gather by index (shuffles, zips, transposes)
    concat                join registers into one lane sequence
    buffer / store        allocate an output buffer and write a vector into it

Backends
--------
* Emulated : Python lists of ints. The default, runs anywhere, and is the
             reference the native backend is checked against.
* Native   : numpy ``int32`` arrays. Opt-in through the ``backend`` setting.
             The sorter runs its hot loops compiled (``native.py``) on this
             backend when numba is installed.

Both must produce bit-identical lanes for every operation.
"""

from __future__ import annotations

import threading
from abc import ABC, abstractmethod
from enum import Enum
from itertools import chain
from typing import Any, Dict, List, Sequence, Union

from .errors import BackendUnavailableError

try:
    import numpy as np

    NUMPY_AVAILABLE = True
except Exception:  # pragma: no cover - numpy is a hard requirement in practice
    np = None  # type: ignore[assignment]
    NUMPY_AVAILABLE = False

ELEMENT_MIN = -(2 ** 31)
ELEMENT_MAX = 2 ** 31 - 1

Vector = Any  # list[int] for Emulated, numpy.ndarray for Native


class LaneMode(Enum):
    EMULATED = "emulated"
    NATIVE = "native"

    @classmethod
    def parse(cls, value: Union[str, "LaneMode"]) -> "LaneMode":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise BackendUnavailableError(
                f"unknown lane backend {value!r}; expected one of {[m.value for m in cls]}"
            ) from None


class LaneBackend(ABC):
    """Abstract vector unit."""

    mode: LaneMode

    @property
    def name(self) -> str:
        return self.mode.value

    @abstractmethod
    def vector(self, values: Sequence[int]) -> Vector:
        """Load lanes from any int sequence."""

    @abstractmethod
    def to_list(self, vec: Vector) -> List[int]:
        """Store lanes as plain Python ints."""

    @abstractmethod
    def vmin(self, x: Vector, y: Vector) -> Vector:
        pass

    @abstractmethod
    def vmax(self, x: Vector, y: Vector) -> Vector:
        pass

    @abstractmethod
    def permute(self, x: Vector, index: Sequence[int]) -> Vector:
        """Gather: lane i of the result is lane index[i] of x."""

    @abstractmethod
    def concat(self, parts: Sequence[Vector]) -> Vector:
        pass

    @abstractmethod
    def buffer(self, n: int) -> Vector:
        """Zero-filled output buffer of n lanes."""

    def fill(self, n: int, value: int) -> Vector:
        return self.vector([value] * n)

    def store(self, buf: Vector, offset: int, vec: Vector) -> None:
        buf[offset:offset + len(vec)] = vec


class EmulatedLanes(LaneBackend):
    """Scalar lane emulation over Python lists."""

    mode = LaneMode.EMULATED

    def vector(self, values: Sequence[int]) -> List[int]:
        if NUMPY_AVAILABLE and isinstance(values, np.ndarray):
            return values.tolist()
        return list(values)

    def to_list(self, vec: Sequence[int]) -> List[int]:
        return list(vec)

    def vmin(self, x, y):
        return [min(a, b) for a, b in zip(x, y)]

    def vmax(self, x, y):
        return [max(a, b) for a, b in zip(x, y)]

    def permute(self, x, index):
        return [x[i] for i in index]

    def concat(self, parts):
        return list(chain.from_iterable(parts))

    def buffer(self, n: int) -> List[int]:
        return [0] * n


class NativeLanes(LaneBackend):
    """numpy int32 lanes."""

    mode = LaneMode.NATIVE

    def __init__(self) -> None:
        if not NUMPY_AVAILABLE:
            raise BackendUnavailableError("native lanes need numpy")

    def vector(self, values):
        return np.asarray(values, dtype=np.int32)

    def to_list(self, vec) -> List[int]:
        return np.asarray(vec).tolist()

    def vmin(self, x, y):
        return np.minimum(x, y)

    def vmax(self, x, y):
        return np.maximum(x, y)

    def permute(self, x, index):
        return x[np.asarray(index, dtype=np.intp)]

    def concat(self, parts):
        if not parts:
            return np.empty(0, dtype=np.int32)
        return np.concatenate(parts)

    def buffer(self, n: int):
        return np.zeros(n, dtype=np.int32)

    def fill(self, n: int, value: int):
        return np.full(n, value, dtype=np.int32)


class LaneRegistry:
    """Registry of lane backends, one shared instance per mode.

    Instances are built on first use under a lock, so worker threads asking
    for the same mode at once all get the same object.
    """

    def __init__(self):
        self._factories: Dict[LaneMode, type] = {}
        self._instances: Dict[LaneMode, LaneBackend] = {}
        self._lock = threading.Lock()

    def register(self, backend_cls: type) -> None:
        self._factories[backend_cls.mode] = backend_cls

    def get(self, mode: Union[str, LaneMode]) -> LaneBackend:
        mode = LaneMode.parse(mode)
        instance = self._instances.get(mode)
        if instance is not None:
            return instance
        with self._lock:
            if mode not in self._instances:
                factory = self._factories.get(mode)
                if factory is None:
                    raise BackendUnavailableError(f"no backend registered for {mode.value}")
                self._instances[mode] = factory()
            return self._instances[mode]

    def list_modes(self) -> List[str]:
        return [m.value for m in self._factories]


lane_registry = LaneRegistry()
lane_registry.register(EmulatedLanes)
lane_registry.register(NativeLanes)


def get_backend(mode: Union[str, LaneMode] = LaneMode.EMULATED) -> LaneBackend:
    return lane_registry.get(mode)
