"""Mutual-information independence tests with exact finite-sample size.

Each test compares an observed statistic T(0) against B resampled null
statistics T(1)..T(B) and reports

    p = (1/(B+1)) * #{b in 0..B : T(b) >= T(0)},

rejecting at level q iff p <= q, equivalently iff T(0) exceeds the
empirical (1-q) quantile of all B+1 values. Under independence the B+1
statistics are exchangeable, so the rejection probability is at most q
for every sample size: no asymptotics are involved. Ties are counted
with ">=", which can only make the test more conservative.

Two cancellation tricks keep the statistics cheap:

* permuting the second block leaves both marginal entropy estimates
  unchanged, so the permutation test only needs joint entropies
  (negated, so that larger means more dependent);
* simulating the second block from a known marginal leaves the first
  block's entropy unchanged, so that term is dropped.

Resample b draws from the dedicated stream (seed, b); results are
independent of evaluation order and thread count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .entropy import (
    WeightVector,
    entropy_from_logrho,
    solve_weights,
)
from .errors import KTooLargeError, SamplerDimensionMismatchError
from .knn import knn_distances, validate_points
from .rng import RESAMPLE, SELECTION, stream


@dataclass(frozen=True, eq=False)
class BlockedSample:
    """An n x d sample whose columns are partitioned into vector blocks.

    ``blocks`` lists contiguous, disjoint column ranges [start, stop)
    covering all columns; the first block plays the role of X, the
    second of Y.
    """

    points: np.ndarray
    blocks: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pts = validate_points(self.points)
        if pts.shape[0] < 4:
            raise ValueError("blocked samples need n >= 4")
        blocks = tuple((int(a), int(b)) for a, b in self.blocks)
        if not blocks:
            raise ValueError("at least one block required")
        pos = 0
        for a, b in blocks:
            if a != pos or b <= a:
                raise ValueError(
                    f"blocks must be contiguous, disjoint and ordered; got {blocks}"
                )
            pos = b
        if pos != pts.shape[1]:
            raise ValueError(f"blocks {blocks} do not cover all {pts.shape[1]} columns")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_xy(cls, x, y) -> "BlockedSample":
        x = np.atleast_2d(np.asarray(x, dtype=np.float64).T).T
        y = np.atleast_2d(np.asarray(y, dtype=np.float64).T).T
        if x.shape[0] != y.shape[0]:
            raise ValueError("x and y must have the same number of rows")
        dx, dy = x.shape[1], y.shape[1]
        return cls(np.hstack((x, y)), ((0, dx), (dx, dx + dy)))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    def block(self, i: int) -> np.ndarray:
        a, b = self.blocks[i]
        return self.points[:, a:b]

    def block_dim(self, i: int) -> int:
        a, b = self.blocks[i]
        return b - a


@dataclass(frozen=True)
class TestConfig:
    """Shared knobs for the resampling tests.

    ``k_joint`` and ``k_marginals`` default to max(3, floor(n^0.35)),
    clamped to the valid range; ``weight_mode`` is "unweighted" for the
    classical estimator or "auto-solve" for bias-cancelling weights
    (which coincide with unweighted in dimension <= 3).
    """

    k_joint: int | None = None
    k_marginals: int | tuple[int, ...] | None = None
    weight_mode: str = "unweighted"
    B: int = 99
    q: float = 0.05
    seed: int = 0
    brute: bool = False

    def __post_init__(self):
        if self.B < 1:
            raise ValueError("B must be >= 1")
        if not 0.0 < self.q < 1.0:
            raise ValueError("q must lie in (0, 1)")
        if self.weight_mode not in ("unweighted", "auto-solve"):
            raise ValueError(f"unknown weight_mode {self.weight_mode!r}")


@dataclass(frozen=True, eq=False)
class TestOutcome:
    """Observed statistic, null statistics and the decision at level q."""

    statistic: float
    null_stats: np.ndarray
    p_value: float
    critical_value: float
    reject: bool
    q: float
    seed: int
    k: int | tuple[int, ...]
    k_hat: int | None = None
    beta_hat: np.ndarray | None = None
    sigma_hat: float | None = None


def default_k(n: int) -> int:
    """Default neighbour order max(3, floor(n^0.35)), clamped to [1, n-1]."""
    return max(1, min(max(3, int(n**0.35)), n - 1))


def quantile_index(B: int, q: float) -> int:
    """Largest m with m/(B+1) <= q, using the same float comparisons as p <= q."""
    m = int(math.floor(q * (B + 1)))
    while m + 1 <= B + 1 and (m + 1) / (B + 1) <= q:
        m += 1
    while m > 0 and m / (B + 1) > q:
        m -= 1
    return m


def build_outcome(
    t0: float, null_stats: np.ndarray, q: float, seed: int, k, **extras
) -> TestOutcome:
    """Assemble a TestOutcome, cross-checking the three decision forms."""
    null_stats = np.asarray(null_stats, dtype=np.float64)
    b = null_stats.shape[0]
    count = 1 + int(np.count_nonzero(null_stats >= t0))
    p_value = count / (b + 1)
    m = quantile_index(b, q)
    desc = np.sort(np.concatenate(([t0], null_stats)))[::-1]
    critical_value = float(desc[m])
    reject = p_value <= q
    if reject != (t0 > critical_value):
        raise AssertionError(
            "inconsistent decision rules: "
            f"p={p_value}, q={q}, t0={t0}, critical={critical_value}"
        )
    return TestOutcome(
        statistic=float(t0),
        null_stats=null_stats,
        p_value=p_value,
        critical_value=critical_value,
        reject=reject,
        q=q,
        seed=seed,
        k=k,
        **extras,
    )


def _resolve_weights(k: int, d: int, mode: str) -> WeightVector | None:
    return solve_weights(k, d) if mode == "auto-solve" else None


def _marginal_k(config: TestConfig, block_index: int, n: int) -> int:
    km = config.k_marginals
    if km is None:
        return default_k(n)
    if isinstance(km, tuple):
        return km[block_index]
    return int(km)


def _check_k(k: int, n: int) -> int:
    if not 1 <= k <= n - 1:
        raise KTooLargeError(f"k must be <= n-1 = {n - 1} (and >= 1), got {k}")
    return k


def _logrho(points: np.ndarray, kmax: int, brute: bool) -> np.ndarray:
    return np.log(knn_distances(points, kmax, brute=brute))


def _joint_entropy(points: np.ndarray, k: int, w, brute: bool) -> float:
    return entropy_from_logrho(_logrho(points, k, brute), points.shape[1], k, w)


def mutual_information(sample: BlockedSample, config: TestConfig = TestConfig()) -> float:
    """Plug-in mutual information estimate: sum of block entropies minus joint.

    For two blocks this is H_hat(X) + H_hat(Y) - H_hat(X, Y); with more
    blocks the sum runs over all of them. Zero iff the blocks are
    independent (in population); the estimate fluctuates around that.
    """
    n = sample.n
    kj = _check_k(config.k_joint or default_k(n), n)
    wj = _resolve_weights(kj, sample.d, config.weight_mode)
    value = -_joint_entropy(sample.points, kj, wj, config.brute)
    for i in range(sample.n_blocks):
        km = _check_k(_marginal_k(config, i, n), n)
        wm = _resolve_weights(km, sample.block_dim(i), config.weight_mode)
        value += _joint_entropy(sample.block(i), km, wm, config.brute)
    return value


def _require_two_blocks(sample: BlockedSample, op: str) -> None:
    if sample.n_blocks != 2:
        raise ValueError(f"{op} needs a sample with exactly two blocks")


def mint_known(sample: BlockedSample, y_sampler, config: TestConfig) -> TestOutcome:
    """Independence test with a known second-block marginal.

    Null statistics replace the Y block by fresh draws from its known
    marginal; the X-block entropy is common to every statistic and is
    omitted, leaving T(b) = H_hat(Y(b)) - H_hat(X, Y(b)).
    """
    _require_two_blocks(sample, "mint_known")
    n, d = sample.n, sample.d
    x, y = sample.block(0), sample.block(1)
    dy = sample.block_dim(1)
    if getattr(y_sampler, "dim", None) != dy:
        raise SamplerDimensionMismatchError(
            f"sampler dimension {getattr(y_sampler, 'dim', None)} != Y-block width {dy}"
        )
    kz = _check_k(config.k_joint or default_k(n), n)
    wz = _resolve_weights(kz, d, config.weight_mode)
    ky = _check_k(_marginal_k(config, 1, n), n)
    wy = _resolve_weights(ky, dy, config.weight_mode)

    def stat(y_cur: np.ndarray) -> float:
        h_y = _joint_entropy(y_cur, ky, wy, config.brute)
        h_z = _joint_entropy(np.hstack((x, y_cur)), kz, wz, config.brute)
        return h_y - h_z

    t0 = stat(y)
    null = np.empty(config.B)
    for b in range(1, config.B + 1):
        y_b = y_sampler.sample(stream(config.seed, RESAMPLE, b), n)
        null[b - 1] = stat(y_b)
    return build_outcome(t0, null, config.q, config.seed, k=kz)


def mint_unknown(
    sample: BlockedSample, config: TestConfig, statistic_mode: str = "reduced"
) -> TestOutcome:
    """Permutation independence test (no marginal knowledge required).

    Null statistics pair X rows with uniformly permuted Y rows. Both
    marginal entropies are invariant under the permutation, so the
    reduced statistic is the negated joint entropy; ``statistic_mode=
    "full"`` recomputes the full mutual information instead (same
    decisions, kept for verification).
    """
    _require_two_blocks(sample, "mint_unknown")
    n = sample.n
    x, y = sample.block(0), sample.block(1)
    kj = _check_k(config.k_joint or default_k(n), n)
    wj = _resolve_weights(kj, sample.d, config.weight_mode)

    if statistic_mode == "reduced":
        def stat(pts: np.ndarray) -> float:
            return -_joint_entropy(pts, kj, wj, config.brute)
    elif statistic_mode == "full":
        def stat(pts: np.ndarray) -> float:
            return mutual_information(
                BlockedSample(pts, sample.blocks), config
            )
    else:
        raise ValueError(f"unknown statistic_mode {statistic_mode!r}")

    t0 = stat(sample.points)
    null = np.empty(config.B)
    for b in range(1, config.B + 1):
        tau = stream(config.seed, RESAMPLE, b).permutation(n)
        null[b - 1] = stat(np.hstack((x, y[tau])))
    return build_outcome(t0, null, config.q, config.seed, k=kj)


def mint_multi(sample: BlockedSample, config: TestConfig) -> TestOutcome:
    """Mutual independence test for two or more blocks.

    Resample b keeps the first block fixed and applies an independent
    uniform permutation to each remaining block; the statistic is the
    negated joint entropy (block marginals are permutation-invariant).
    With two blocks this reduces to ``mint_unknown`` draw for draw.
    """
    if sample.n_blocks < 2:
        raise ValueError("mint_multi needs at least two blocks")
    n = sample.n
    kj = _check_k(config.k_joint or default_k(n), n)
    wj = _resolve_weights(kj, sample.d, config.weight_mode)
    t0 = -_joint_entropy(sample.points, kj, wj, config.brute)
    null = np.empty(config.B)
    for b in range(1, config.B + 1):
        rng = stream(config.seed, RESAMPLE, b)
        parts = [sample.block(0)]
        for j in range(1, sample.n_blocks):
            parts.append(sample.block(j)[rng.permutation(n)])
        null[b - 1] = -_joint_entropy(np.hstack(parts), kj, wj, config.brute)
    return build_outcome(t0, null, config.q, config.seed, k=kj)


def _unweighted_profile_entropies(
    points: np.ndarray, k_grid: tuple[int, ...], brute: bool
) -> np.ndarray:
    """Unweighted joint entropies for every k in the grid, one neighbour query."""
    d = points.shape[1]
    logrho = _logrho(points, k_grid[-1], brute)
    return np.array([entropy_from_logrho(logrho, d, k) for k in k_grid])


def _sorted_grid(k_grid, n: int) -> tuple[int, ...]:
    grid = tuple(sorted({int(k) for k in k_grid}))
    if not grid:
        raise ValueError("k grid must be nonempty")
    _check_k(grid[0], n)
    _check_k(grid[-1], n)
    return grid


def mint_av(sample: BlockedSample, k_grid, config: TestConfig) -> TestOutcome:
    """Multiscale permutation test averaging entropies over a k grid.

    The statistic is the negated mean, over the grid, of unweighted
    joint entropy estimates; each permutation's neighbour distances are
    queried once and reused across all k. A singleton grid recovers
    ``mint_unknown`` decision for decision.
    """
    _require_two_blocks(sample, "mint_av")
    n = sample.n
    x, y = sample.block(0), sample.block(1)
    grid = _sorted_grid(k_grid, n)
    t0 = -float(np.mean(_unweighted_profile_entropies(sample.points, grid, config.brute)))
    null = np.empty(config.B)
    for b in range(1, config.B + 1):
        tau = stream(config.seed, RESAMPLE, b).permutation(n)
        h = _unweighted_profile_entropies(np.hstack((x, y[tau])), grid, config.brute)
        null[b - 1] = -float(np.mean(h))
    return build_outcome(t0, null, config.q, config.seed, k=grid)


def select_k(
    sample: BlockedSample, k_grid, n_pairs: int, config: TestConfig
) -> int:
    """Data-driven k: smallest minimiser of paired permutation differences.

    Draws 2*n_pairs permutations (independent of the test's resampling
    streams), computes unweighted joint entropies on each permuted
    dataset for every k in the grid, and picks the k minimising
    sum_j (H(2j) - H(2j-1))^2, breaking ties towards smaller k.
    """
    _require_two_blocks(sample, "select_k")
    n = sample.n
    x, y = sample.block(0), sample.block(1)
    grid = _sorted_grid(k_grid, n)
    h = np.empty((2 * n_pairs, len(grid)))
    for j in range(1, 2 * n_pairs + 1):
        tau = stream(config.seed, SELECTION, j).permutation(n)
        h[j - 1] = _unweighted_profile_entropies(
            np.hstack((x, y[tau])), grid, config.brute
        )
    crit = ((h[1::2] - h[0::2]) ** 2).sum(axis=0)
    return grid[int(np.argmin(crit))]


def mint_auto(
    sample: BlockedSample, k_grid, n_pairs: int, config: TestConfig
) -> TestOutcome:
    """Permutation test at a data-driven k chosen by ``select_k``."""
    k_hat = select_k(sample, k_grid, n_pairs, config)
    out = mint_unknown(sample, replace(config, k_joint=k_hat))
    return replace(out, k_hat=k_hat)
