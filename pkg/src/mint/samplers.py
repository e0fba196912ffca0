"""Samplers for known marginal distributions and regression noise.

A marginal sampler produces arbitrarily many i.i.d. draws of a d_Y
dimensional vector given a generator; they feed the simulation-based
critical values of the known-marginal independence test. Noise models
are the one-dimensional analogue for regression error distributions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class NormalMarginal:
    """Independent per-coordinate normal draws."""

    mean: float = 0.0
    sd: float = 1.0
    dim: int = 1

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.normal(self.mean, self.sd, size=(n, self.dim))


@dataclass(frozen=True)
class UniformMarginal:
    """Independent per-coordinate uniform draws on [low, high]."""

    low: float = 0.0
    high: float = 1.0
    dim: int = 1

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.uniform(self.low, self.high, size=(n, self.dim))


@dataclass(frozen=True, eq=False)
class EmpiricalMarginal:
    """I.i.d. draws from the empirical distribution of a reference sample.

    Rows are resampled with replacement, so repeated rows are possible;
    duplicate draws will be rejected downstream by estimators that need
    distinct points (continuous families do not have this issue).
    """

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim == 1:
            data = data[:, None]
        if data.shape[0] < 1:
            raise ValueError("empirical sampler needs at least one row")
        object.__setattr__(self, "data", data)

    @property
    def dim(self) -> int:
        return self.data.shape[1]

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        rows = rng.integers(0, self.data.shape[0], size=n)
        return self.data[rows]


@dataclass(frozen=True, eq=False)
class StreamMarginal:
    """Draws produced by a user-supplied function of (rng, n)."""

    fn: Callable[[np.random.Generator, int], np.ndarray]
    dim: int = 1

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        out = np.asarray(self.fn(rng, n), dtype=np.float64)
        if out.ndim == 1:
            out = out[:, None]
        if out.shape != (n, self.dim):
            raise ValueError(
                f"user stream returned shape {out.shape}, expected ({n}, {self.dim})"
            )
        return out


_MARGINAL_RE = re.compile(r"^\s*(normal|uniform)\s*\(\s*([^,]+)\s*,\s*([^)]+)\s*\)\s*$")


def parse_marginal(spec: str, dim: int = 1):
    """Parse a marginal descriptor string.

    Accepts ``normal(mu,sigma)``, ``uniform(a,b)`` and
    ``empirical:PATH`` (a headerless or headered CSV of reference rows).
    """
    m = _MARGINAL_RE.match(spec)
    if m:
        family, a, b = m.group(1), float(m.group(2)), float(m.group(3))
        if family == "normal":
            if b <= 0:
                raise ValueError("normal marginal needs sigma > 0")
            return NormalMarginal(mean=a, sd=b, dim=dim)
        if b <= a:
            raise ValueError("uniform marginal needs a < b")
        return UniformMarginal(low=a, high=b, dim=dim)
    if spec.startswith("empirical:"):
        path = Path(spec[len("empirical:") :])
        rows = np.loadtxt(path, delimiter=",", skiprows=_csv_skiprows(path), ndmin=2)
        return EmpiricalMarginal(data=rows)
    raise ValueError(f"cannot parse marginal spec {spec!r}")


def _csv_skiprows(path: Path) -> int:
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
    try:
        [float(tok) for tok in first.strip().split(",") if tok]
        return 0
    except ValueError:
        return 1


@dataclass(frozen=True)
class NoiseModel:
    """Regression error distribution up to scale."""

    family: str = "normal"
    df: float | None = None

    def __post_init__(self):
        if self.family not in ("normal", "t", "logistic"):
            raise ValueError(f"unknown noise family {self.family!r}")
        if self.family == "t" and (self.df is None or self.df <= 0):
            raise ValueError("t noise needs df > 0")

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.family == "normal":
            return rng.standard_normal(n)
        if self.family == "t":
            return rng.standard_t(self.df, size=n)
        return rng.logistic(0.0, 1.0, size=n)


def parse_noise(spec: str) -> NoiseModel:
    """Parse ``normal``, ``logistic`` or ``t(df)``."""
    s = spec.strip()
    if s in ("normal", "logistic"):
        return NoiseModel(family=s)
    m = re.match(r"^t\s*\(\s*([^)]+)\s*\)$", s)
    if m:
        return NoiseModel(family="t", df=float(m.group(1)))
    raise ValueError(f"cannot parse noise spec {spec!r}")
