"""Partitioning algorithms: restarted k-means on feature rows, PAM on
dissimilarity matrices, and cluster-count detection via the transformed
distortion jump.

k-means runs Lloyd iterations from k-means++ seeding, restarted from
independent derived random streams; the minimum-cost restart wins, with
ties broken by restart index so results are reproducible for any thread
count. PAM is fully deterministic: a greedy BUILD initialization
followed by best-improvement SWAP steps until no single medoid/non-medoid
exchange lowers the total dissimilarity.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .rng import derived_rng

#: Lloyd iteration cap per restart.
MAX_ITER = 100

#: A swap must beat the current PAM cost by more than this to be taken.
SWAP_TOL = 1e-12


@dataclass
class Partition:
    """A clustering of n observations into K non-empty groups.

    Exactly one of ``centers`` (k-means: K x p array) and ``medoids``
    (PAM: K observation indices, ascending) is set. ``cost`` is the
    within-cluster total: squared Euclidean distances to centers, or
    dissimilarities to medoids.
    """

    labels: np.ndarray
    k: int
    cost: float
    centers: np.ndarray = None
    medoids: np.ndarray = None
    seed: int = 0
    restarts: int = 1
    method: str = "kmeans"

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=int)
        counts = np.bincount(self.labels, minlength=self.k)
        if counts.size > self.k or np.any(counts == 0):
            raise ValueError("every cluster must be non-empty")


def _feature_rows(features):
    values = getattr(features, "values", features)
    return np.atleast_2d(np.asarray(values, dtype=float))


def _plus_plus_seeding(rows, k, rng):
    """k-means++ style center initialization."""
    n = rows.shape[0]
    centers = np.empty((k, rows.shape[1]))
    centers[0] = rows[rng.integers(n)]
    d2 = cdist(rows, centers[:1], "sqeuclidean")[:, 0]
    for j in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = rng.choice(n, p=d2 / total)
        else:
            idx = rng.integers(n)
        centers[j] = rows[idx]
        d2 = np.minimum(d2, cdist(rows, centers[j : j + 1],
                                  "sqeuclidean")[:, 0])
    return centers


def _lloyd(rows, k, rng):
    """One k-means run: returns (cost, labels, centers, iterations)."""
    n = rows.shape[0]
    centers = _plus_plus_seeding(rows, k, rng)
    prev_labels = None
    prev_cost = np.inf
    for iteration in range(MAX_ITER):
        dists = cdist(rows, centers, "sqeuclidean")
        labels = dists.argmin(axis=1)
        if prev_labels is not None:
            # Keep the previous assignment on exact distance ties so that
            # duplicated points cannot oscillate between coincident
            # centers (which would re-empty a repaired cluster).
            old = dists[np.arange(n), prev_labels]
            labels = np.where(old <= dists[np.arange(n), labels],
                              prev_labels, labels)
        d1 = dists[np.arange(n), labels]
        counts = np.bincount(labels, minlength=k)
        reseeded = False
        for empty in np.flatnonzero(counts == 0):
            # Reseed the empty cluster at the farthest point whose own
            # cluster keeps at least one other member (pigeonhole: such
            # a point exists whenever a cluster is empty and k <= n).
            eligible = counts[labels] > 1
            far = int(np.argmax(np.where(eligible, d1, -np.inf)))
            counts[labels[far]] -= 1
            counts[empty] += 1
            centers[empty] = rows[far]
            labels[far] = empty
            d1[far] = 0.0
            reseeded = True
        cost = float(d1.sum())
        if not reseeded:
            assert cost <= prev_cost * (1 + 1e-12) + 1e-12
            if prev_labels is not None and np.array_equal(labels, prev_labels):
                return cost, labels, centers, iteration + 1
        prev_cost = cost
        prev_labels = labels
        frozen = centers.copy()
        for j in range(k):
            members = rows[labels == j]
            if members.size:
                centers[j] = members.mean(axis=0)
    # Iteration cap hit: report the state whose cost was last measured.
    return cost, labels, frozen, MAX_ITER


def kmeans(features, k, restarts=20, seed=0, threads=1):
    """Best-of-restarts k-means.

    Each restart draws from its own stream derived from ``seed`` and the
    restart index, so the result is identical whether restarts run
    sequentially or on a pool of ``threads`` workers; ties in cost go to
    the lowest restart index.
    """
    rows = _feature_rows(features)
    n = rows.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in 1..{n}, got {k}")
    if restarts < 1:
        raise ValueError("restarts must be at least 1")

    def run(r):
        return _lloyd(rows, k, derived_rng(seed, "kmeans", r))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(run, range(restarts)))
    else:
        outcomes = [run(r) for r in range(restarts)]
    best = min(range(restarts), key=lambda r: (outcomes[r][0], r))
    cost, labels, centers, _ = outcomes[best]
    return Partition(labels=labels, k=k, cost=cost, centers=centers,
                     seed=seed, restarts=restarts, method="kmeans")


@dataclass
class DistortionCurve:
    """Per-K distortions and their transform used by the jump rule.

    ``distortions[K-1]`` is the mean squared distance to the nearest
    center divided by the feature dimension p; ``transformed`` holds
    d_K ** (-p/2) with the convention Y_0 = 0 kept implicitly, and
    ``jump_k`` the K maximizing the increase Y_K - Y_{K-1}. Where the
    transform overflows (zero distortion), values are capped at ten
    times the largest finite transform and ``capped`` is set.
    """

    k_values: np.ndarray
    distortions: np.ndarray
    transformed: np.ndarray
    jump_k: int
    p: int
    capped: bool = False


def choose_k_by_jump(features, k_max, restarts=10, seed=0, threads=1):
    """Pick the cluster count at the largest jump of d_K ** (-p/2)."""
    rows = _feature_rows(features)
    if k_max < 2:
        raise ValueError("k_max must be at least 2")
    n, p = rows.shape
    distortions = np.empty(k_max)
    for k in range(1, k_max + 1):
        part = kmeans(rows, k, restarts=restarts, seed=seed, threads=threads)
        distortions[k - 1] = part.cost / (n * p)
    with np.errstate(over="ignore", divide="ignore"):
        transformed = distortions ** (-p / 2.0)
    finite = np.isfinite(transformed)
    capped = not finite.all()
    if capped:
        ceiling = 10.0 * transformed[finite].max() if finite.any() else 1.0
        transformed = np.where(finite, transformed, ceiling)
    jumps = np.diff(np.concatenate(([0.0], transformed)))
    jump_k = int(np.argmax(jumps)) + 1
    curve = DistortionCurve(
        k_values=np.arange(1, k_max + 1),
        distortions=distortions,
        transformed=transformed,
        jump_k=jump_k,
        p=p,
        capped=capped,
    )
    return jump_k, curve


def _pam_build(d, k):
    """Greedy BUILD initialization: argmin column sum first, then the
    candidate with the largest total cost reduction; ties to the lowest
    index."""
    n = d.shape[0]
    medoids = [int(np.argmin(d.sum(axis=0)))]
    nearest = d[:, medoids[0]].copy()
    while len(medoids) < k:
        gains = np.maximum(nearest[:, None] - d, 0.0).sum(axis=0)
        gains[medoids] = -np.inf
        best = int(np.argmax(gains))
        medoids.append(best)
        nearest = np.minimum(nearest, d[:, best])
    return medoids


def pam(dissimilarity, k, seed=0):
    """Partitioning around medoids, run to swap-optimality.

    BUILD greedily seeds the K medoids, then SWAP repeatedly applies the
    single (medoid, non-medoid) exchange that lowers the total cost the
    most, until no exchange improves it. Both phases are deterministic;
    ``seed`` is recorded for interface symmetry with k-means but unused.
    Labels assign each observation to its nearest medoid, ties to the
    smaller medoid index.
    """
    d = getattr(dissimilarity, "values", dissimilarity)
    d = np.asarray(d, dtype=float)
    n = d.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in 1..{n}, got {k}")
    medoids = _pam_build(d, k)
    while k < n:
        sub = d[:, medoids]
        order = np.argsort(sub, axis=1)
        d1 = sub[np.arange(n), order[:, 0]]
        d2 = sub[np.arange(n), order[:, 1]] if k > 1 else np.full(n, np.inf)
        nearest_pos = order[:, 0]
        non_medoids = np.setdiff1d(np.arange(n), medoids)
        best_delta, best_swap = -SWAP_TOL, None
        for pos in range(k):
            mine = nearest_pos == pos
            # Cost change of replacing medoid `pos` by each candidate h:
            # points losing their medoid fall back to min(second-nearest,
            # h); the rest may only improve by moving to h.
            gain_mine = (
                np.minimum(d2[mine, None], d[np.ix_(mine, non_medoids)]).sum(0)
                - d1[mine].sum()
            )
            gain_rest = np.minimum(
                d[np.ix_(~mine, non_medoids)] - d1[~mine, None], 0.0
            ).sum(0)
            deltas = gain_mine + gain_rest
            h = int(np.argmin(deltas))
            if deltas[h] < best_delta:
                best_delta, best_swap = float(deltas[h]), (pos, int(non_medoids[h]))
        if best_swap is None:
            break
        medoids[best_swap[0]] = best_swap[1]
    medoids = np.sort(np.asarray(medoids, dtype=int))
    labels = np.argmin(d[:, medoids], axis=1)
    cost = float(d[np.arange(n), medoids[labels]].sum())
    return Partition(labels=labels, k=k, cost=cost, medoids=medoids,
                     seed=seed, restarts=1, method="pam")
