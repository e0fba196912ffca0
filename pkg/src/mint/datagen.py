"""Seeded generators for the simulation settings used in power studies.

Three dependence structures, each indexed by a parameter that localises
or weakens the dependence, plus Gaussian null/correlated baselines:

* sinusoidal(l): density proportional to 1 + sin(lx) sin(ly) on
  [-pi, pi]^2; uniform marginals for every l, and the same mutual
  information for every integer l (the frequency only localises the
  dependence). Sampled by rejection with acceptance rate 1/2.
* circular(l): a noisy ring mixture, X = L cos(T) + e1/4,
  Y = L sin(T) + e2/4 with L uniform on {1..l}, T uniform on [0, 2pi].
* multiplicative(rho): Y = |X|^rho * e with X uniform on [-1, 1];
  uncorrelated for every rho but dependent in scale for rho > 0.

All generators are pure functions of their seed; identical
specifications yield bit-identical samples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .independence import BlockedSample
from .rng import DATA, stream
from .samplers import NormalMarginal, StreamMarginal, UniformMarginal

SETTINGS = (
    "sinusoidal",
    "circular",
    "multiplicative",
    "gaussian-null",
    "gaussian-corr",
)


@dataclass(frozen=True)
class ScenarioSpec:
    """A fully-resolved data-generating scenario."""

    setting: str
    n: int
    param: float | None = None
    multivariate: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.setting not in SETTINGS:
            raise ValueError(f"unknown setting {self.setting!r}; choose from {SETTINGS}")
        if self.n < 4:
            raise ValueError("n must be at least 4")
        if self.setting in ("sinusoidal", "circular"):
            if self.param is None or int(self.param) < 1 or self.param != int(self.param):
                raise ValueError(f"{self.setting} needs an integer parameter l >= 1")
        if self.setting == "multiplicative" and (self.param is None or self.param < 0):
            raise ValueError("multiplicative needs rho >= 0")
        if self.setting == "gaussian-corr" and (
            self.param is None or not 0 <= self.param < 1
        ):
            raise ValueError("gaussian-corr needs rho in [0, 1)")


def gen_sinusoidal(l: int, n: int, seed: int) -> BlockedSample:
    """Rejection sampler for the sinusoidal density (acceptance rate 1/2)."""
    rng = stream(seed, DATA, 0)
    out = np.empty((n, 2))
    have = 0
    while have < n:
        m = 2 * (n - have) + 32
        xy = rng.uniform(-np.pi, np.pi, size=(m, 2))
        u = rng.uniform(size=m)
        acc = xy[u < 0.5 * (1.0 + np.sin(l * xy[:, 0]) * np.sin(l * xy[:, 1]))]
        take = min(len(acc), n - have)
        out[have : have + take] = acc[:take]
        have += take
    return BlockedSample(out, ((0, 1), (1, 2)))


def gen_circular(l: int, n: int, seed: int) -> BlockedSample:
    """Noisy ring mixture with l radii."""
    rng = stream(seed, DATA, 0)
    # U{1..l} as floor of l*U[0,1) shifted by one, clamped at the boundary.
    radius = np.minimum(np.floor(l * rng.uniform(size=n)).astype(np.int64) + 1, l)
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
    e1 = rng.standard_normal(n)
    e2 = rng.standard_normal(n)
    x = radius * np.cos(theta) + e1 / 4.0
    y = radius * np.sin(theta) + e2 / 4.0
    return BlockedSample(np.column_stack((x, y)), ((0, 1), (1, 2)))


def gen_multiplicative(rho: float, n: int, seed: int) -> BlockedSample:
    """Scale dependence: Y = |X|^rho * e; independent exactly when rho = 0."""
    rng = stream(seed, DATA, 0)
    x = rng.uniform(-1.0, 1.0, size=n)
    e = rng.standard_normal(n)
    y = np.abs(x) ** rho * e
    return BlockedSample(np.column_stack((x, y)), ((0, 1), (1, 2)))


def gen_gaussian(n: int, seed: int, rho: float = 0.0) -> BlockedSample:
    """Bivariate normal with correlation rho (rho = 0: independent null)."""
    rng = stream(seed, DATA, 0)
    z1 = rng.standard_normal(n)
    z2 = rng.standard_normal(n)
    y = rho * z1 + np.sqrt(1.0 - rho * rho) * z2
    return BlockedSample(np.column_stack((z1, y)), ((0, 1), (1, 2)))


def make_multivariate(sample: BlockedSample, seed: int) -> BlockedSample:
    """Append an independent U(0, 1) coordinate to each of two 1-d blocks.

    The added coordinates carry no dependence, so the mutual information
    between the enlarged blocks equals that of the originals.
    """
    if sample.blocks != ((0, 1), (1, 2)):
        raise ValueError("make_multivariate expects two one-dimensional blocks")
    rng = stream(seed, DATA, 1)
    n = sample.n
    x2 = rng.uniform(size=n)
    y2 = rng.uniform(size=n)
    pts = np.column_stack((sample.block(0)[:, 0], x2, sample.block(1)[:, 0], y2))
    return BlockedSample(pts, ((0, 2), (2, 4)))


def generate(spec: ScenarioSpec) -> BlockedSample:
    """Generate a sample for the scenario (bit-identical given the spec)."""
    if spec.setting == "sinusoidal":
        sample = gen_sinusoidal(int(spec.param), spec.n, spec.seed)
    elif spec.setting == "circular":
        sample = gen_circular(int(spec.param), spec.n, spec.seed)
    elif spec.setting == "multiplicative":
        sample = gen_multiplicative(float(spec.param), spec.n, spec.seed)
    elif spec.setting == "gaussian-null":
        sample = gen_gaussian(spec.n, spec.seed, 0.0)
    else:
        sample = gen_gaussian(spec.n, spec.seed, float(spec.param))
    if spec.multivariate:
        sample = make_multivariate(sample, spec.seed)
    return sample


def scenario_y_sampler(setting: str, param: float | None = None):
    """The (known) marginal distribution of Y under each scenario.

    Used to drive the known-marginal test on scenario data; the
    circular and multiplicative marginals have no standard closed form,
    so they are sampled through their defining constructions.
    """
    if setting == "sinusoidal":
        return UniformMarginal(low=-np.pi, high=np.pi, dim=1)
    if setting == "circular":
        l = int(param)

        def draw(rng: np.random.Generator, n: int) -> np.ndarray:
            radius = np.minimum(
                np.floor(l * rng.uniform(size=n)).astype(np.int64) + 1, l
            )
            theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
            return radius * np.sin(theta) + rng.standard_normal(n) / 4.0

        return StreamMarginal(fn=draw, dim=1)
    if setting == "multiplicative":
        rho = float(param)

        def draw(rng: np.random.Generator, n: int) -> np.ndarray:
            x = rng.uniform(-1.0, 1.0, size=n)
            return np.abs(x) ** rho * rng.standard_normal(n)

        return StreamMarginal(fn=draw, dim=1)
    if setting in ("gaussian-null", "gaussian-corr"):
        return NormalMarginal(mean=0.0, sd=1.0, dim=1)
    raise ValueError(f"unknown setting {setting!r}")
