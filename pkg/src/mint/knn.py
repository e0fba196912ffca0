"""Exact k-nearest-neighbour distances under the Euclidean metric.

The default index is a kd-tree (median splits, leaf size 16) via
``scipy.spatial.cKDTree``; a brute-force path over the full pairwise
distance matrix is kept behind a flag as a verification oracle. Both
paths evaluate distances with the same vectorised expression in double
precision (squared distances internally, one square root at output), so
their results agree bit for bit: the tree only decides *which* points
are neighbours, never what their distances evaluate to.

Exact duplicate rows are an error rather than being silently perturbed;
``jitter_points`` provides an opt-in deterministic perturbation for
dirty real data.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from .errors import DuplicatePointsError, KTooLargeError
from .rng import stream

LEAF_SIZE = 16

# Rows per chunk in the brute-force path; bounds peak memory at
# roughly CHUNK * n * d doubles.
_BRUTE_CHUNK = 256


def validate_points(points) -> np.ndarray:
    """Coerce to a finite float64 matrix with n >= 2 rows.

    One-dimensional input is interpreted as a single column.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2:
        raise ValueError(f"points must be a 2-d array, got shape {pts.shape}")
    n, d = pts.shape
    if n < 2:
        raise ValueError(f"need at least 2 points, got {n}")
    if d < 1:
        raise ValueError("points must have at least one coordinate")
    if not np.isfinite(pts).all():
        raise ValueError("points contain NaN or infinite coordinates")
    return pts


def find_duplicate_rows(points: np.ndarray) -> list[tuple[int, int]]:
    """Return index pairs (i, j), i < j, of exactly equal rows."""
    pts = np.asarray(points)
    n = pts.shape[0]
    order = np.lexsort(pts.T[::-1])
    pairs = []
    run_start = 0
    for a in range(1, n):
        if np.array_equal(pts[order[a]], pts[order[run_start]]):
            for b in range(run_start, a):
                i, j = sorted((int(order[b]), int(order[a])))
                pairs.append((i, j))
        else:
            run_start = a
    return sorted(pairs)


def _neighbour_distances(pts: np.ndarray, neigh_idx: np.ndarray) -> np.ndarray:
    """Sorted distances from each point to the given neighbour indices.

    Shared by the kd-tree and brute-force paths so that both produce
    identical floating-point output.
    """
    diff = pts[:, None, :] - pts[neigh_idx]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    rho = np.sqrt(d2)
    rho.sort(axis=1)
    return rho


class KDIndex:
    """Immutable exact k-NN index over a fixed point set.

    Safe for concurrent read-only queries; queries allocate their own
    scratch arrays.
    """

    def __init__(self, points: np.ndarray):
        pts = validate_points(points)
        dupes = find_duplicate_rows(pts)
        if dupes:
            raise DuplicatePointsError(dupes)
        self._points = pts
        self._points.setflags(write=False)
        self._tree = cKDTree(pts, leafsize=LEAF_SIZE, balanced_tree=True)

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def n(self) -> int:
        return self._points.shape[0]

    @property
    def d(self) -> int:
        return self._points.shape[1]

    def neighbour_distances(self, k: int) -> np.ndarray:
        """n x k matrix of distances to the 1st..k-th nearest neighbour."""
        n = self.n
        if not 1 <= k <= n - 1:
            raise KTooLargeError(f"k must be <= n-1 = {n - 1} (and >= 1), got {k}")
        _, idx = self._tree.query(self._points, k=k + 1, workers=1)
        # The self-match is at distance zero, hence always present; drop it.
        keep = idx != np.arange(n)[:, None]
        neigh = idx[keep].reshape(n, k)
        return _neighbour_distances(self._points, neigh)


def build_index(points) -> KDIndex:
    """Build the kd-tree index, rejecting exact duplicate rows."""
    return KDIndex(points)


def brute_force_knn_distances(points, k: int) -> np.ndarray:
    """O(n^2) reference path: full pairwise distances, sorted per row."""
    pts = validate_points(points)
    n, _ = pts.shape
    if not 1 <= k <= n - 1:
        raise KTooLargeError(f"k must be <= n-1 = {n - 1} (and >= 1), got {k}")
    rho = np.empty((n, k))
    for lo in range(0, n, _BRUTE_CHUNK):
        hi = min(lo + _BRUTE_CHUNK, n)
        diff = pts[lo:hi, None, :] - pts[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        d2[np.arange(lo, hi) - lo, np.arange(lo, hi)] = np.inf
        part = np.partition(d2, k - 1, axis=1)[:, :k]
        part.sort(axis=1)
        rho[lo:hi] = np.sqrt(part)
    if not (rho[:, 0] > 0.0).all():
        raise DuplicatePointsError(find_duplicate_rows(pts))
    return rho


def knn_distances(points, k: int, brute: bool = False) -> np.ndarray:
    """Distances from each point to its 1st..k-th nearest neighbour.

    Row i holds the j-th order statistics of {||z_m - z_i|| : m != i} for
    j = 1..k; rows are non-decreasing and strictly positive. Distance ties
    are harmless because values, not neighbour identities, are returned.
    """
    if brute:
        return brute_force_knn_distances(points, k)
    pts = validate_points(points)
    n = pts.shape[0]
    if not 1 <= k <= n - 1:
        raise KTooLargeError(f"k must be <= n-1 = {n - 1} (and >= 1), got {k}")
    _, idx = cKDTree(pts, leafsize=LEAF_SIZE, balanced_tree=True).query(
        pts, k=k + 1, workers=1
    )
    keep = idx != np.arange(n)[:, None]
    counts = keep.sum(axis=1)
    if (counts != k).any():
        # A row whose self-match is missing from its own neighbour list can
        # only mean another point at distance zero, i.e. a duplicate.
        raise DuplicatePointsError(find_duplicate_rows(pts))
    neigh = idx[keep].reshape(n, k)
    rho = _neighbour_distances(pts, neigh)
    if not (rho[:, 0] > 0.0).all():
        raise DuplicatePointsError(find_duplicate_rows(pts))
    return rho


def jitter_points(points, seed: int, rel_scale: float = 1e-10) -> np.ndarray:
    """Deterministically perturb points to break exact duplicates.

    Adds uniform noise of magnitude ``rel_scale`` times each coordinate's
    range (or 1 for constant coordinates). Opt-in, for dirty real data.
    """
    pts = validate_points(points).copy()
    rng = stream(seed, 0xD1CE)
    span = pts.max(axis=0) - pts.min(axis=0)
    span[span == 0.0] = 1.0
    pts += rng.uniform(-1.0, 1.0, size=pts.shape) * (rel_scale * span)
    return pts
