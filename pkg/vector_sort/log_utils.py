"""
Failure Log
-----------
Benchmark runs that fail validation are appended to a plain-text file as
separate entries, newest last. The file keeps at most ``max_entries`` entries;
older ones drop off the front, so a sweep that keeps failing cannot grow it
without bound.
"""

from __future__ import annotations

import logging
import os
from datetime import datetime
from typing import Iterable, List

logger = logging.getLogger(__name__)

_BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

ENTRY_SEPARATOR = "-" * 80
DEFAULT_MAX_ENTRIES = 200


def _resolve(path: str) -> str:
    # relative paths are anchored at the project root
    return path if os.path.isabs(path) else os.path.join(_BASE_DIR, path)


def read_entries(path: str) -> List[str]:
    """Entries currently in the log, oldest first ([] when the file is missing)."""
    full = _resolve(path)
    if not os.path.exists(full):
        return []
    with open(full, "r", encoding="utf-8", errors="replace") as fh:
        chunks = fh.read().split(f"{ENTRY_SEPARATOR}\n")
    return [chunk.rstrip("\n") for chunk in chunks if chunk.strip()]


def append_entry(path: str, entry: str, max_entries: int = DEFAULT_MAX_ENTRIES) -> int:
    """Add one entry, keep the newest ``max_entries``; returns the number kept.

    Never raises: an unwritable log is reported and the benchmark carries on.
    """
    full = _resolve(path)
    try:
        entries = (read_entries(full) + [entry.strip("\n")])[-max(1, max_entries):]
        os.makedirs(os.path.dirname(full) or ".", exist_ok=True)
        with open(full, "w", encoding="utf-8") as fh:
            fh.writelines(f"{e}\n{ENTRY_SEPARATOR}\n" for e in entries)
        return len(entries)
    except OSError as exc:
        logger.warning("could not write failure log %s: %s", path, exc)
        print(f"⚠️ Could not write log {path}: {exc}")
        return 0


def log_validation_failure(
    path: str,
    suite: str,
    algorithm: str,
    size: int,
    errors: Iterable[str],
    detail: str = "",
) -> None:
    ts = datetime.now().strftime("%Y-%m-%d %H:%M:%S")
    lines = [
        f"[{ts}] VALIDATION FAILURE",
        f"  Suite: {suite}",
        f"  Algorithm: {algorithm}",
        f"  Size: {size}",
        f"  Errors: {', '.join(errors)}",
    ]
    if detail:
        lines.append(f"  Detail: {detail}")
    append_entry(path, "\n".join(lines))
