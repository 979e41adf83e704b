"""Unsupervised screening and subset selection of clustering features.

The procedure has two stages. Screening scores each feature column with
a clusterability index -- one minus the ratio of the best 1-D 2-means
split error to the total sum of squares on the range-transformed column
-- and drops columns scoring below a quantile (default: the median) of
the same index measured on uniform-noise surrogates of equal length.
Selection then searches all non-empty subsets of the surviving columns:
k-means is run on each subset's columns (each standardized to [0, 1]),
the induced partition is scored by its within-cluster sum of squares
over *all* screened columns, and the subset minimizing
``SSE * (1 + penalty * size)`` wins. Scoring every candidate partition
in the common screened space keeps subset scores comparable, which is
what lets a genuinely informative pair beat either of its halves; the
per-size best scores are then nonincreasing in size whenever the larger
subset's partition is at least as good, and the multiplicative penalty
arbitrates the remaining ties in favor of fewer features.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .rng import derived_rng

#: Internal seed for the uniform-surrogate reference distribution.
_REFERENCE_SEED = 83230
#: Number of uniform surrogates behind the screening threshold.
_REFERENCE_COUNT = 200


def clusterability_index(column):
    """How well a single column splits into two groups, in [0, 1].

    The column is range-transformed to [0, 1]; the index is
    ``1 - SSE_best / TSS`` where SSE_best is the error of the best
    2-means split (found exactly by scanning all sorted split points)
    and TSS the total sum of squares. A constant column scores 0; a
    balanced two-point mass scores 1.
    """
    col = np.asarray(column, dtype=float)
    if col.ndim != 1:
        raise ValueError("column must be one-dimensional")
    n = col.size
    if n < 10:
        raise ValueError("need at least 10 observations per column")
    span = col.max() - col.min()
    if span == 0:
        return 0.0
    x = np.sort((col - col.min()) / span)
    tss = float(np.sum((x - x.mean()) ** 2))
    if tss == 0:
        return 0.0
    cum1 = np.cumsum(x)
    cum2 = np.cumsum(x * x)
    sizes = np.arange(1, n)
    left = cum2[:-1] - cum1[:-1] ** 2 / sizes
    right = (cum2[-1] - cum2[:-1]) - (cum1[-1] - cum1[:-1]) ** 2 / (n - sizes)
    best = float(np.min(left + right))
    return max(0.0, 1.0 - best / tss)


@lru_cache(maxsize=None)
def _reference_indices(n):
    """Sorted clusterability indices of uniform surrogates of length n.

    Seeded independently of callers so the cache never depends on call
    order; this is the null distribution features must beat.
    """
    rng = np.random.default_rng([_REFERENCE_SEED, int(n)])
    return tuple(
        sorted(clusterability_index(rng.random(n))
               for _ in range(_REFERENCE_COUNT))
    )


def screening_threshold(n, quantile=0.5):
    """The uniform-reference quantile a feature's index must reach."""
    return float(np.quantile(np.array(_reference_indices(int(n))), quantile))


@dataclass
class SelectionReport:
    """Outcome of screening plus exhaustive subset search.

    ``index`` holds every column's clusterability; columns at or above
    ``threshold`` form ``screened_in``. ``best_by_size`` maps subset
    size to the minimum-SSE subset of that size (feature indices refer
    to the original matrix). ``selected`` minimizes the penalized score;
    it is empty and ``no_structure`` is set when nothing survives
    screening.
    """

    index: np.ndarray
    threshold: float
    screened_in: tuple
    best_by_size: dict
    selected: tuple
    selected_sse: float
    k: int
    penalty: float
    screen_quantile: float
    seed: int
    no_structure: bool = False


def _batched_kmeans_labels(rows, k, restarts, rng, max_iter=40):
    """Labels of the best of ``restarts`` k-means runs, all vectorized.

    Runs every restart simultaneously via broadcasting; returns the
    labels of the minimum-cost restart (ties to the lowest index).
    """
    n, p = rows.shape
    centers = np.empty((restarts, k, p))
    idx = rng.integers(n, size=restarts)
    centers[:, 0] = rows[idx]
    d2 = ((rows[None, :, :] - centers[:, 0, None, :]) ** 2).sum(-1)
    for j in range(1, k):
        totals = d2.sum(axis=1)
        u = rng.random(restarts) * np.where(totals > 0, totals, 1.0)
        cum = np.cumsum(np.where(totals[:, None] > 0, d2, 1.0), axis=1)
        idx = np.minimum((cum < u[:, None]).sum(axis=1), n - 1)
        centers[:, j] = rows[idx]
        d2 = np.minimum(
            d2, ((rows[None, :, :] - centers[:, j, None, :]) ** 2).sum(-1)
        )
    labels = np.zeros((restarts, n), dtype=int)
    for _ in range(max_iter):
        dist = ((rows[None, :, None, :] - centers[:, None, :, :]) ** 2).sum(-1)
        new_labels = dist.argmin(axis=2)
        # Reseed any empty cluster at its restart's farthest point.
        d1 = np.take_along_axis(dist, new_labels[:, :, None], 2)[:, :, 0]
        for r in range(restarts):
            counts = np.bincount(new_labels[r], minlength=k)
            for empty in np.flatnonzero(counts == 0):
                far = int(np.argmax(d1[r]))
                centers[r, empty] = rows[far]
                new_labels[r, far] = empty
                d1[r, far] = 0.0
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        onehot = labels[:, None, :] == np.arange(k)[None, :, None]
        counts = onehot.sum(axis=2)
        sums = onehot @ rows
        np.divide(sums, counts[:, :, None], out=centers,
                  where=counts[:, :, None] > 0)
    dist = ((rows[None, :, None, :] - centers[:, None, :, :]) ** 2).sum(-1)
    labels = dist.argmin(axis=2)
    costs = np.take_along_axis(dist, labels[:, :, None], 2)[:, :, 0].sum(axis=1)
    best = int(np.argmin(costs))
    return labels[best]


def _partition_sse(rows, labels, k):
    """Within-cluster sum of squares of ``rows`` under given labels."""
    total = float(np.sum(rows * rows))
    counts = np.bincount(labels, minlength=k).astype(float)
    sums = np.zeros((k, rows.shape[1]))
    np.add.at(sums, labels, rows)
    nonzero = counts > 0
    centered = float(
        np.sum((sums[nonzero] ** 2).sum(axis=1) / counts[nonzero])
    )
    return total - centered


def select_features(features, k, screen_quantile=0.5, penalty=0.05,
                    restarts=6, seed=0):
    """Screen feature columns, then pick the subset best worth keeping.

    Parameters
    ----------
    features : FeatureMatrix or (n, J) array
    k : number of clusters the subsets are judged against.
    screen_quantile : quantile of the uniform-surrogate index
        distribution a column must reach to survive screening.
    penalty : size penalty; the winner minimizes
        ``SSE * (1 + penalty * |subset|)``.
    restarts, seed : k-means restarts per subset and the master seed.
    """
    values = np.atleast_2d(np.asarray(getattr(features, "values", features),
                                      dtype=float))
    n, n_features = values.shape
    if k < 2:
        raise ValueError("k must be at least 2")
    if n_features > 16:
        raise ValueError("exhaustive search supports at most 16 features")
    index = np.array([clusterability_index(values[:, j])
                      for j in range(n_features)])
    threshold = screening_threshold(n, screen_quantile)
    screened = tuple(int(j) for j in np.flatnonzero(index >= threshold))
    if not screened:
        return SelectionReport(
            index=index, threshold=threshold, screened_in=(),
            best_by_size={}, selected=(), selected_sse=float("nan"),
            k=k, penalty=penalty, screen_quantile=screen_quantile,
            seed=seed, no_structure=True,
        )
    cols = values[:, screened]
    standardized = (cols - cols.min(axis=0)) / (cols.max(axis=0)
                                                - cols.min(axis=0))
    position = {j: i for i, j in enumerate(screened)}

    best_by_size = {}
    selected, selected_sse, best_score = (), float("inf"), float("inf")
    for size in range(1, len(screened) + 1):
        for subset in combinations(screened, size):
            mask = np.fromiter((position[j] for j in subset), dtype=int)
            rng = derived_rng(seed, "select",
                              sum(1 << j for j in subset))
            labels = _batched_kmeans_labels(standardized[:, mask], k,
                                            restarts, rng)
            sse = _partition_sse(standardized, labels, k)
            if size not in best_by_size or sse < best_by_size[size][1]:
                best_by_size[size] = (subset, sse)
            score = sse * (1.0 + penalty * size)
            if score < best_score:
                best_score, selected, selected_sse = score, subset, sse
    return SelectionReport(
        index=index, threshold=threshold, screened_in=screened,
        best_by_size=best_by_size, selected=selected,
        selected_sse=selected_sse, k=k, penalty=penalty,
        screen_quantile=screen_quantile, seed=seed,
    )


def select_features_stable(features, k_max, screen_quantile=0.5,
                           penalty=0.05, restarts=6, seed=0):
    """Selection repeated for every K in 2..k_max, with the modal subset.

    Returns ``(final_subset, reports)`` where ``reports`` maps each K to
    its SelectionReport and ``final_subset`` is the most frequently
    selected subset (ties to the lexicographically smallest).
    """
    if k_max < 2:
        raise ValueError("k_max must be at least 2")
    reports = {
        k: select_features(features, k, screen_quantile=screen_quantile,
                           penalty=penalty, restarts=restarts, seed=seed)
        for k in range(2, k_max + 1)
    }
    tallies = {}
    for report in reports.values():
        tallies[report.selected] = tallies.get(report.selected, 0) + 1
    final = min(tallies, key=lambda s: (-tallies[s], s))
    return final, reports
