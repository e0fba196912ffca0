"""Shared test utilities."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
import pytest
from scipy.spatial.distance import cdist

REPO_ROOT = Path(__file__).resolve().parents[1]
SCHEMA_DIR = REPO_ROOT / "schema"


def reference_knn(points: np.ndarray, k: int) -> np.ndarray:
    """Independent k-NN oracle via scipy's cdist (tolerance comparisons only)."""
    dm = cdist(points, points)
    np.fill_diagonal(dm, np.inf)
    return np.sort(dm, axis=1)[:, :k]


def worker_count() -> int:
    env = os.environ.get("MINT_THREADS")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def mc_map(fn, args_list):
    """Run fn over args in a thread pool, preserving input order."""
    workers = worker_count()
    if workers == 1:
        return [fn(a) for a in args_list]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, args_list))


@pytest.fixture(scope="session")
def schema_dir() -> Path:
    return SCHEMA_DIR
