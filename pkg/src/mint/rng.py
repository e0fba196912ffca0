"""Deterministic random-number streams.

All randomness in the package flows from a single 64-bit seed through
named substreams. Substream b of a resampling loop can be generated
without drawing substreams 0..b-1 first, so resamples may be evaluated
in any order (or in parallel) with bit-identical results. Streams are
backed by Philox, a counter-based generator designed for this pattern.
"""

from __future__ import annotations

import numpy as np

# Substream namespaces. Streams whose paths differ in any component are
# statistically independent.
RESAMPLE = 1  # null-distribution resamples (permutations, pseudo-samples)
SELECTION = 2  # tuning-parameter selection draws
DATA = 3  # scenario data generation
REP = 4  # power-study repetitions


def stream(seed: int, *path: int) -> np.random.Generator:
    """Return the generator for substream ``path`` of ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def child_seeds(seed: int, *path: int, count: int = 1) -> list[int]:
    """Derive integer seeds for nested components (e.g. per-repetition runs)."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(p) for p in path))
    return [int(s) for s in ss.generate_state(count, np.uint64)]
