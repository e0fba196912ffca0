"""Weighted nearest-neighbour differential entropy estimation.

The estimator averages log-volume corrections of nearest-neighbour balls
over sample points and neighbour orders:

    H_hat = (1/n) sum_i sum_j w_j [ d log rho_(j),i + log V_d + log(n-1) - psi(j) ]

where rho_(j),i is the Euclidean distance from point i to its j-th
nearest neighbour among the other n-1 points, V_d is the volume of the
unit d-ball and psi is the digamma function. All entropies are in nats.

With w = (0, ..., 0, 1) this is the classical unweighted estimator. For
d >= 4 the leading bias terms can be removed by choosing w to annihilate
the gamma-ratio moments

    sum_j w_j Gamma(j + 2l/d) / Gamma(j) = 0,   l = 1, ..., floor(d/4),

subject to sum_j w_j = 1, with w supported on the thinned index set
{floor(k/d), floor(2k/d), ..., k} so that the neighbour distances
entering the sum are not too strongly correlated. ``solve_weights``
returns the minimum-Euclidean-norm solution of this system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    IllConditionedError,
    InfeasibleSupportError,
)
from .knn import knn_distances, validate_points

_EULER_GAMMA = 0.5772156649015329

# Asymptotic series psi(x) ~ log x - 1/(2x) - sum_m c_m x^(-2m); the
# coefficients are B_{2m}/(2m). Truncation error at x = 6 is ~2e-13.
_PSI_TAIL = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)

_PSI_SHIFT = 6.0


def digamma(x):
    """Digamma function psi(x) for x > 0 (scalar or array).

    Uses the recurrence psi(x) = psi(x+1) - 1/x to shift the argument up
    to at least 6, then the asymptotic (de Moivre) series. Absolute error
    is below 1e-10 across [1e-3, 1e6].
    """
    arr = np.asarray(x, dtype=np.float64)
    scalar = arr.ndim == 0
    z = np.atleast_1d(arr).copy()
    if not np.isfinite(z).all() or (z <= 0.0).any():
        raise DomainError("digamma requires finite x > 0")
    acc = np.zeros_like(z)
    # Each pass advances the argument by one; at most ceil(6) passes needed.
    for _ in range(int(_PSI_SHIFT)):
        small = z < _PSI_SHIFT
        if not small.any():
            break
        acc[small] -= 1.0 / z[small]
        z[small] += 1.0
    u = 1.0 / (z * z)
    poly = np.zeros_like(z)
    for c in reversed(_PSI_TAIL):
        poly = u * (c + poly)
    out = acc + np.log(z) - 0.5 / z - poly
    return float(out[0]) if scalar else out.reshape(arr.shape)


def unit_ball_volume(d: int) -> float:
    """Volume of the unit Euclidean ball in R^d: pi^(d/2) / Gamma(1 + d/2)."""
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    return math.pi ** (d / 2.0) / math.gamma(1.0 + d / 2.0)


@dataclass(frozen=True)
class WeightVector:
    """Neighbour-order weights for a k-NN entropy estimator in R^d."""

    k: int
    d: int
    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=np.float64)
        if w.shape != (self.k,):
            raise ValueError(f"weight vector must have length k={self.k}")
        object.__setattr__(self, "w", w)

    @property
    def support(self) -> np.ndarray:
        """Neighbour orders (1-based) carrying nonzero weight."""
        return np.flatnonzero(self.w) + 1


def unweighted(k: int, d: int) -> WeightVector:
    """The classical estimator's weights: all mass on order k."""
    w = np.zeros(k)
    w[k - 1] = 1.0
    return WeightVector(k=k, d=d, w=w)


def weight_support(k: int, d: int) -> list[int]:
    """Thinned support {floor(ik/d) : i = 1..d}, deduplicated, without 0."""
    return sorted({(i * k) // d for i in range(1, d + 1)} - {0})


def _gamma_ratio(j: np.ndarray, shift: float) -> np.ndarray:
    """Gamma(j + shift) / Gamma(j), elementwise, via log-gamma."""
    return np.exp([math.lgamma(jj + shift) - math.lgamma(jj) for jj in j])


def constraint_matrix(k: int, d: int, support: list[int]) -> np.ndarray:
    """Rows: the sum-to-one constraint, then one gamma-ratio row per l."""
    levels = d // 4
    js = np.asarray(support, dtype=np.float64)
    a = np.empty((levels + 1, len(support)))
    a[0] = 1.0
    for level in range(1, levels + 1):
        a[level] = _gamma_ratio(js, 2.0 * level / d)
    return a


def solve_weights(k: int, d: int) -> WeightVector:
    """Minimum-norm weights satisfying the bias-cancellation constraints.

    For d <= 3 no gamma-ratio constraint binds and the convention is the
    unweighted estimator. Raises ``InfeasibleSupportError`` when the
    thinned support has fewer than floor(d/4)+1 points, and
    ``IllConditionedError`` when the constraint matrix has 2-norm
    condition number above 1e12.
    """
    if k < 1 or d < 1:
        raise DomainError(f"need k >= 1 and d >= 1, got k={k}, d={d}")
    levels = d // 4
    if levels == 0:
        return unweighted(k, d)
    support = weight_support(k, d)
    if len(support) < levels + 1:
        raise InfeasibleSupportError(
            f"support {support} has {len(support)} point(s); "
            f"k={k}, d={d} needs at least {levels + 1}"
        )
    a = constraint_matrix(k, d, support)
    cond = np.linalg.cond(a)
    if cond > 1e12:
        raise IllConditionedError(
            f"constraint matrix condition number {cond:.3e} exceeds 1e12"
        )
    b = np.zeros(levels + 1)
    b[0] = 1.0
    w_support = np.linalg.pinv(a) @ b
    w = np.zeros(k)
    w[np.asarray(support) - 1] = w_support
    wv = WeightVector(k=k, d=d, w=w)
    sum_err, constraint_err = weight_residuals(wv)
    if sum_err > 1e-10 or constraint_err > 1e-8:
        raise IllConditionedError(
            f"solution residuals too large (sum {sum_err:.2e}, "
            f"constraints {constraint_err:.2e})"
        )
    return wv


def weight_residuals(wv: WeightVector) -> tuple[float, float]:
    """(|sum w - 1|, worst gamma-constraint residual relative to its largest term)."""
    sum_err = abs(float(wv.w.sum()) - 1.0)
    levels = wv.d // 4
    worst = 0.0
    js = np.arange(1, wv.k + 1, dtype=np.float64)
    for level in range(1, levels + 1):
        terms = wv.w * _gamma_ratio(js, 2.0 * level / wv.d)
        scale = np.abs(terms).max()
        if scale > 0:
            worst = max(worst, abs(terms.sum()) / scale)
    return sum_err, worst


@dataclass(frozen=True)
class EntropyEstimate:
    """A differential entropy estimate and the configuration behind it."""

    value: float
    k: int
    n: int
    d: int
    weights: WeightVector


def entropy_from_logrho(
    logrho: np.ndarray, d: int, k: int, weights: WeightVector | None = None
) -> float:
    """Evaluate the estimator from precomputed log neighbour distances.

    ``logrho`` holds log rho_(j),i in column j-1 for at least k columns;
    this lets resampling procedures reuse one neighbour query across many
    values of k.
    """
    n = logrho.shape[0]
    if weights is None:
        support = np.array([k])
        wsup = np.array([1.0])
    else:
        if weights.k != k or weights.d != d:
            raise ValueError(
                f"weights built for (k={weights.k}, d={weights.d}), "
                f"estimator called with (k={k}, d={d})"
            )
        support = weights.support
        wsup = weights.w[support - 1]
    per_point = logrho[:, support - 1] @ wsup
    const = float(
        np.dot(wsup, math.log(unit_ball_volume(d)) + math.log(n - 1) - digamma(support))
    )
    return d * float(per_point.mean()) + const


def kl_entropy(
    points, k: int, weights: WeightVector | None = None, brute: bool = False
) -> EntropyEstimate:
    """Weighted Kozachenko-Leonenko entropy estimate of a sample.

    ``weights=None`` selects the classical unweighted estimator (all mass
    on neighbour order k). Raises ``DuplicatePointsError`` when two sample
    points coincide and ``KTooLargeError`` when k > n-1.
    """
    pts = validate_points(points)
    n, d = pts.shape
    logrho = np.log(knn_distances(pts, k, brute=brute))
    value = entropy_from_logrho(logrho, d, k, weights)
    return EntropyEstimate(
        value=value, k=k, n=n, d=d, weights=weights if weights is not None else unweighted(k, d)
    )
