"""
Sort Settings
-------------
Single place that resolves how the sorter is configured: block geometry,
merge kernel, lane backend, worker count and the benchmark defaults.

Resolution order (later wins):
    DEFAULT_SETTINGS  ->  config/sort_settings.json  ->  environment

Environment overrides
---------------------
* ``VECTOR_SORT_SETTINGS`` : alternate JSON file to read instead of
                             ``config/sort_settings.json``.
* ``VECTOR_SORT_BACKEND``  : ``emulated`` or ``native``; handy for running the
                             same suite against both lane backends.

Loading never raises. A missing or corrupt file falls back to the defaults so a
bad edit to the JSON cannot take the benchmark down.
"""

from __future__ import annotations

import json
import os
from typing import Any, Dict, Optional

_BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
_CONFIG_PATH = os.path.join(_BASE_DIR, "config", "sort_settings.json")

DEFAULT_SETTINGS: Dict[str, Any] = {
    "registers": 16,          # R: vector registers stacked per block
    "lanes": 4,               # W: 32-bit lanes per 128-bit register
    "kernel": "hybrid",       # "serial" | "vectorized" | "hybrid"
    "backend": "emulated",    # "emulated" | "native"
    "network": "best",        # "best" | "odd-even" | "bitonic"
    "threads": 1,             # 0 = use available hardware parallelism
    "hybrid_split": 1,        # leading merge layers run fully vectorized
    "auto_kernel": True,      # hybrid -> vectorized above hybrid_max_window
    "hybrid_max_window": 32,
    "debug_checks": True,     # sortedness assertions on kernel inputs
    # Benchmark harness
    "bench_reps": 5,
    "bench_warmup": 1,
    "bench_seed": 42,
    "geometry_sample_size": 65536,
    "kernel_bench_pairs": 2048,
    "failure_log": "bench_failures.txt",
}


def settings_path() -> str:
    """Path of the JSON file that will be read (env override aware)."""
    return os.getenv("VECTOR_SORT_SETTINGS", _CONFIG_PATH)


def load_sort_settings(path: Optional[str] = None) -> Dict[str, Any]:
    """Load settings merged with defaults. Never raises - returns defaults on error."""
    settings = dict(DEFAULT_SETTINGS)
    path = path or settings_path()
    try:
        if os.path.exists(path):
            with open(path, "r", encoding="utf-8") as fh:
                user = json.load(fh)
            if isinstance(user, dict):
                settings.update({k: v for k, v in user.items() if not k.startswith("_")})
    except Exception as exc:  # corrupted JSON etc.
        print(f"⚠️ Could not read {path}, using defaults: {exc}")

    backend = os.getenv("VECTOR_SORT_BACKEND")
    if backend:
        settings["backend"] = backend.strip().lower()
    return settings


def save_sort_settings(settings: Dict[str, Any], path: Optional[str] = None) -> None:
    """Persist only the keys that differ from the defaults."""
    path = path or settings_path()
    delta = {k: v for k, v in settings.items() if DEFAULT_SETTINGS.get(k) != v}
    try:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(delta, fh, indent=2)
    except Exception as exc:
        print(f"⚠️ Could not write {path}: {exc}")
