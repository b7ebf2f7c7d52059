"""
Vector Sort
-----------
Hybrid vectorized merge sort for 32-bit signed integers.

Pipeline: column sort of an R x W register block with a few-comparator
network, asymmetric transpose into W runs, in-register bitonic merging,
streaming merge passes, and a load-balanced multi-thread merge on top.

The lane operations go through ``lanes.LaneBackend``; the emulated backend
(Python lists) runs anywhere, the native one uses numpy int32 vectors and, with numba installed, a
compiled pipeline for the sort itself.
"""

from .errors import (
    BackendUnavailableError,
    BenchValidationError,
    CorankError,
    ElementRangeError,
    ElementTypeError,
    GeometryError,
    MergeBufferError,
    MergeInputError,
    NetworkError,
    SortError,
    UnknownPatternError,
)
from .lanes import LaneMode, get_backend, lane_registry
from .merge import MergeKernel, comparator_branchless, merge_kernel, merge_kernel_batch, merge_runs
from .network import (
    Comparator,
    ComparatorNetwork,
    NetworkKind,
    apply_network,
    best16_sorter,
    bitonic_merge_network,
    bitonic_sorter,
    odd_even_sorter,
    verify_zero_one,
)
from .parallel import ParallelSorter, corank_partition, sort_parallel
from .sorter import SortConfig, in_register_sort, sort_in_place, sort_single
from .validation import SortValidator, multiset_hash

__all__ = [
    "BackendUnavailableError", "BenchValidationError", "CorankError", "ElementRangeError", "ElementTypeError",
    "GeometryError", "MergeBufferError", "MergeInputError", "NetworkError", "SortError",
    "UnknownPatternError",
    "LaneMode", "get_backend", "lane_registry",
    "MergeKernel", "comparator_branchless", "merge_kernel", "merge_kernel_batch", "merge_runs",
    "Comparator", "ComparatorNetwork", "NetworkKind", "apply_network", "best16_sorter",
    "bitonic_merge_network", "bitonic_sorter", "odd_even_sorter", "verify_zero_one",
    "ParallelSorter", "corank_partition", "sort_parallel",
    "SortConfig", "in_register_sort", "sort_in_place", "sort_single",
    "SortValidator", "multiset_hash",
]
