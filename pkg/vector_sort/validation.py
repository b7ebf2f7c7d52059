"""
Sort Output Validation
----------------------
Checks a sort output against the input it came from:
- Length checking
- Ascending order (full output, or every run of a staged output)
- Permutation check through an order-independent multiset hash

The benchmark harness validates every timed run before emitting its record.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


class ValidationError(Enum):
    """Types of validation errors."""
    LENGTH_MISMATCH = "length_mismatch"
    NOT_ASCENDING = "not_ascending"
    RUNS_NOT_ASCENDING = "runs_not_ascending"
    MULTISET_MISMATCH = "multiset_mismatch"


@dataclass
class ValidationResult:
    """Result of validating one output."""
    is_valid: bool
    errors: List[ValidationError] = field(default_factory=list)
    first_violation: Optional[int] = None  # index i where out[i] > out[i+1]
    notes: List[str] = field(default_factory=list)

    def error_names(self) -> List[str]:
        return [e.value for e in self.errors]


def multiset_hash(values: Sequence[int]) -> int:
    """Order-independent 64-bit hash: wrapping sum of splitmix64(v)."""
    if len(values) == 0:
        return 0
    z = np.asarray(values, dtype=np.int64).astype(np.uint64)
    z = z + _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    z = z ^ (z >> np.uint64(31))
    return int(z.sum(dtype=np.uint64))


def _descent(values: np.ndarray, run_length: Optional[int] = None) -> Optional[int]:
    """Index of the first descent, ignoring run boundaries when run_length is set."""
    if len(values) < 2:
        return None
    bad = values[1:] < values[:-1]
    if run_length:
        # Position i compares i and i+1; boundaries fall where (i+1) % run_length == 0.
        boundary = (np.arange(1, len(values)) % run_length) == 0
        bad &= ~boundary
    hits = np.flatnonzero(bad)
    return int(hits[0]) if len(hits) else None


class SortValidator:
    """Validates outputs produced from one reference input."""

    def __init__(self, reference: Sequence[int]):
        self.length = len(reference)
        self.checksum = multiset_hash(reference)

    def validate(self, output: Sequence[int]) -> ValidationResult:
        return self._check(output, None)

    def validate_runs(self, output: Sequence[int], run_length: int) -> ValidationResult:
        """Every consecutive ``run_length`` elements ascending (in-register stages)."""
        if run_length < 1:
            raise ValueError(f"run_length must be >= 1, got {run_length}")
        return self._check(output, run_length)

    def _check(self, output: Sequence[int], run_length: Optional[int]) -> ValidationResult:
        result = ValidationResult(is_valid=True)
        values = np.asarray(output, dtype=np.int64)
        if len(values) != self.length:
            result.errors.append(ValidationError.LENGTH_MISMATCH)
            result.notes.append(f"expected {self.length} elements, got {len(values)}")
        descent = _descent(values, run_length)
        if descent is not None:
            result.errors.append(
                ValidationError.RUNS_NOT_ASCENDING if run_length else ValidationError.NOT_ASCENDING
            )
            result.first_violation = descent
            result.notes.append(f"out[{descent}]={values[descent]} > out[{descent + 1}]={values[descent + 1]}")
        if multiset_hash(values) != self.checksum:
            result.errors.append(ValidationError.MULTISET_MISMATCH)
        result.is_valid = not result.errors
        return result
