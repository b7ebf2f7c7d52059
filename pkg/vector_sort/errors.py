"""
Sort Errors
-----------
Typed failures raised by the sorting library and the benchmark harness.

Everything derives from ``SortError`` so callers can catch the whole family;
the shape/contract errors also derive from ``ValueError`` because they are
bad-argument errors first.
"""


class SortError(Exception):
    """Base class for all vector_sort failures."""


class NetworkError(SortError, ValueError):
    """Invalid channel count, malformed comparator, or overlapping layer."""


class GeometryError(SortError, ValueError):
    """Block or SortConfig shape violates the R x W constraints."""


class MergeInputError(SortError, ValueError):
    """Kernel inputs are unsorted, mismatched in length, or the width is invalid."""


class MergeBufferError(SortError, ValueError):
    """Output buffer cannot hold the merged runs."""


class ElementRangeError(SortError, ValueError):
    """Input values fall outside the 32-bit signed element range."""


class ElementTypeError(SortError, TypeError):
    """Input holds non-integer values."""


class CorankError(SortError, ValueError):
    """Requested output rank is outside 0..|a|+|b|."""


class BackendUnavailableError(SortError):
    """The requested lane backend cannot be constructed on this host."""


class UnknownPatternError(SortError, ValueError):
    """Benchmark input pattern name is not recognised."""


class BenchValidationError(SortError):
    """A timed run produced an output that failed validation."""
