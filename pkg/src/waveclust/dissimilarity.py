"""Curve-pair dissimilarities built on continuous wavelet spectra.

Three spectral measures are provided. Wavelet coherence is a local
(time-scale resolved) correlation field in [0, 1]. The WER distance
collapses smoothed cross- and auto-spectra into the single similarity
WER^2 in [0, 1] and maps it to the distance sqrt(J_s * N * (1 - WER^2)).
The MCA distance decomposes the cross-spectral covariance Q = Wz Wx^H by
SVD and compares the curves' leading patterns, weighting each direction
by its share of squared singular value. Two plain Euclidean measures
(on normalized spectrum magnitudes and on raw curves) complete the set
so spectral measures can be benchmarked against naive ones.

All pair computations are pure; ``build_dissimilarity_matrix`` evaluates
the n(n-1)/2 pairs (optionally on a thread pool), mirrors them into a
symmetric matrix, and forces a zero diagonal.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cwt import ScaleGrid, cwt_morlet, smooth_spectrum
from .errors import DegenerateInputError

#: Smoothed auto-spectra at or below this are treated as identically zero.
_AUTO_FLOOR = 1e-300

#: Measure tags accepted by build_dissimilarity_matrix.
MEASURES = ("WER", "MCA", "euclid-features", "euclid-raw")


@dataclass
class CoherenceField:
    """Squared-coherence-style field R(a, tau) in [0, 1] on a scale grid."""

    values: np.ndarray
    grid: ScaleGrid


@dataclass
class DissimilarityMatrix:
    """Symmetric nonnegative n x n dissimilarities with a zero diagonal."""

    values: np.ndarray
    measure: str

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        n, m = self.values.shape
        if n != m:
            raise ValueError("dissimilarity matrix must be square")
        if np.any(np.abs(self.values - self.values.T) > 1e-9):
            raise ValueError("dissimilarity matrix must be symmetric")
        if np.any(np.diag(self.values) != 0):
            raise ValueError("dissimilarity matrix needs a zero diagonal")
        if np.any(self.values < 0):
            raise ValueError("dissimilarities must be nonnegative")

    @property
    def n(self):
        return self.values.shape[0]


def _check_same_layout(wz, wx):
    if wz.grid != wx.grid:
        raise ValueError("spectra must share one scale grid")
    if wz.n_samples != wx.n_samples:
        raise ValueError("spectra must share the sample count")


def wavelet_coherence(wz, wx):
    """Wavelet coherence field of two spectra on the same grid.

        R = |S(Wz * conj(Wx))| / (S(|Wz|^2)^(1/2) * S(|Wx|^2)^(1/2)),

    with S the time/scale smoother. Without smoothing the ratio would be
    identically 1; with it, R measures local co-oscillation and lies in
    [0, 1] (clipped; entries where either smoothed auto-spectrum
    vanishes are set to 0).
    """
    _check_same_layout(wz, wx)
    grid = wz.grid
    # The auto-spectra take the same product path as the cross term (not
    # abs()**2, which rounds differently) so that for x = z all three
    # smoothed fields are bitwise equal and the ratio is exactly 1.
    cross = np.abs(smooth_spectrum(wz.matrix * np.conj(wx.matrix), grid))
    auto_z = np.abs(smooth_spectrum(wz.matrix * np.conj(wz.matrix), grid))
    auto_x = np.abs(smooth_spectrum(wx.matrix * np.conj(wx.matrix), grid))
    ok = (auto_z > _AUTO_FLOOR) & (auto_x > _AUTO_FLOOR)
    r = np.zeros(cross.shape)
    np.divide(cross, np.sqrt(auto_z * auto_x), out=r, where=ok)
    return CoherenceField(values=np.clip(r, 0.0, 1.0), grid=grid)


def time_averaged_coherence(wz, wx):
    """Per-scale time average of the squared coherence field.

    A diagnostic profile over scales; not used by any distance here.
    """
    field = wavelet_coherence(wz, wx)
    return (field.values ** 2).mean(axis=1)


def wer_distance(wz, wx):
    """WER distance between two spectra.

    With S the smoother and sums running over the discrete scale and
    time grids,

        WER^2 = sum_a (sum_tau |S(Wz conj(Wx))|)^2
                / sum_a (sum_tau S(|Wz|^2) * sum_tau S(|Wx|^2)),

    which lies in [0, 1] (Cauchy-Schwarz, attained at x = z), and

        d(z, x) = sqrt(J_s * N * (1 - WER^2))  in  [0, sqrt(J_s * N)].
    """
    _check_same_layout(wz, wx)
    grid = wz.grid
    # Same product path for cross and auto terms as in wavelet_coherence:
    # for x = z the three fields agree bitwise, WER^2 is exactly 1 and the
    # distance exactly 0.
    cross = np.abs(smooth_spectrum(wz.matrix * np.conj(wx.matrix), grid))
    auto_z = np.abs(smooth_spectrum(wz.matrix * np.conj(wz.matrix), grid))
    auto_x = np.abs(smooth_spectrum(wx.matrix * np.conj(wx.matrix), grid))
    cross_sums = cross.sum(axis=1)
    num = (cross_sums * cross_sums).sum()
    den = (auto_z.sum(axis=1) * auto_x.sum(axis=1)).sum()
    if den <= 0:
        raise DegenerateInputError(
            "zero auto-spectra: the WER distance is undefined"
        )
    wer2 = num / den
    j_s, n = wz.n_scales, wz.n_samples
    return float(np.sqrt(j_s * n * max(0.0, 1.0 - wer2)))


@dataclass
class McaResult:
    """SVD of the cross-spectral covariance Q = Wz Wx^H, with patterns.

    ``lam`` holds the singular values in nonincreasing order; ``u`` and
    ``v`` their singular vectors as columns (phase-fixed: each u_j is
    rotated so its largest-modulus entry is real positive, v_j by the
    same compensating phase, which preserves Q = U Gamma V^H).
    ``retained`` is the smallest D whose squared singular values reach
    the inertia fraction ``theta``; ``pattern_z[j] = u_j^H Wz`` and
    ``pattern_x[j] = v_j^H Wx`` are the leading patterns for j < D.
    """

    lam: np.ndarray
    u: np.ndarray
    v: np.ndarray
    retained: int
    theta: float
    pattern_z: np.ndarray
    pattern_x: np.ndarray


def mca_analysis(wz, wx, theta=0.95):
    """Maximum-covariance decomposition of two spectra.

    Raises
    ------
    DegenerateInputError
        If Q is identically zero (an all-zero spectrum).
    FloatingPointError
        If the SVD violates the Frobenius identity
        ``sum lam^2 = ||Q||_F^2`` beyond 1e-8 relative -- a numerical
        failure, checked on every call.
    """
    _check_same_layout(wz, wx)
    if not 0.0 < theta <= 1.0:
        raise ValueError("theta must lie in (0, 1]")
    q = wz.matrix @ np.conj(wx.matrix.T)
    fro2 = float(np.sum(np.abs(q) ** 2))
    if fro2 <= 0:
        raise DegenerateInputError(
            "all-zero cross covariance: MCA is undefined"
        )
    u, lam, vh = np.linalg.svd(q)
    v = np.conj(vh.T)
    if abs(float(np.sum(lam ** 2)) - fro2) > 1e-8 * fro2:
        raise FloatingPointError(
            "SVD failed the Frobenius identity sum(lam^2) = ||Q||_F^2"
        )
    # Remove the joint phase indeterminacy of each (u_j, v_j) pair.
    anchor = np.argmax(np.abs(u), axis=0)
    phase = u[anchor, np.arange(u.shape[1])]
    phase = phase / np.abs(phase)
    u = u / phase[None, :]
    v = v / phase[None, :]
    inertia = np.cumsum(lam ** 2) / np.sum(lam ** 2)
    retained = int(np.searchsorted(inertia, theta - 1e-12) + 1)
    retained = min(retained, lam.size)
    pattern_z = np.conj(u[:, :retained].T) @ wz.matrix
    pattern_x = np.conj(v[:, :retained].T) @ wx.matrix
    return McaResult(lam=lam, u=u, v=v, retained=retained, theta=theta,
                     pattern_z=pattern_z, pattern_x=pattern_x)


def mca_distance(wz, wx, theta=0.95):
    """Leading-pattern distance from the maximum-covariance analysis.

    Each retained direction contributes
    ``d_j = || diff(pattern_z[j] - pattern_x[j]) ||_2`` (first forward
    difference along time), and the distance is the inertia-weighted
    combination ``sum_j lam_j^2 d_j^2 / sum_j lam_j^2`` over j < D.
    """
    res = mca_analysis(wz, wx, theta=theta)
    lam2 = res.lam[: res.retained] ** 2
    deltas = np.diff(res.pattern_z - res.pattern_x, axis=1)
    d2 = np.sum(np.abs(deltas) ** 2, axis=1)
    return float(np.sum(lam2 * d2) / np.sum(lam2))


def _spectrum_feature_rows(spectra):
    """Per-curve magnitude signatures for the euclid-features measure.

    Each |CWT| row is mean-centered in time (dropping the vertical
    offset the Morlet barely sees anyway) and the whole field is scaled
    to squared norm J_s * N, so amplitude is factored out and only the
    shape of the time-scale energy distribution is compared.
    """
    rows = []
    for spec in spectra:
        mag = np.abs(spec.matrix)
        mag = mag - mag.mean(axis=1, keepdims=True)
        rms = np.sqrt(np.mean(mag ** 2))
        if rms <= 0:
            raise DegenerateInputError(
                "flat spectrum magnitude: features are undefined"
            )
        rows.append((mag / rms).ravel())
    return np.vstack(rows)


def _pair_indices(n):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def build_dissimilarity_matrix(dataset, measure="WER", grid=None,
                               omega0=6.0, normalization="L1", theta=0.95,
                               threads=1):
    """All-pairs dissimilarity matrix for a dataset of curves.

    Parameters
    ----------
    dataset : FunctionalDataset or array_like
    measure : {"WER", "MCA", "euclid-features", "euclid-raw"}
    grid, omega0, normalization : CWT settings for spectral measures.
    theta : inertia threshold for MCA.
    threads : size of the worker pool over curve pairs. The result is
        identical for any thread count (pairs are independent and each
        lands in its own slot).
    """
    if measure not in MEASURES:
        raise ValueError(f"unknown measure {measure!r}; pick from {MEASURES}")
    curves = np.atleast_2d(getattr(dataset, "curves", dataset))
    n = curves.shape[0]
    if n < 2:
        raise ValueError("need at least two curves")
    values = np.zeros((n, n))

    if measure == "euclid-raw":
        diff = curves[:, None, :] - curves[None, :, :]
        values = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        np.fill_diagonal(values, 0.0)
        return DissimilarityMatrix(values=values, measure=measure)

    grid = grid if grid is not None else ScaleGrid()
    spectra = [cwt_morlet(c, grid=grid, omega0=omega0,
                          normalization=normalization) for c in curves]

    if measure == "euclid-features":
        rows = _spectrum_feature_rows(spectra)
        diff = rows[:, None, :] - rows[None, :, :]
        values = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        np.fill_diagonal(values, 0.0)
        return DissimilarityMatrix(values=values, measure=measure)

    if measure == "WER":
        def pair(i, j):
            return wer_distance(spectra[i], spectra[j])
    else:
        def pair(i, j):
            return mca_distance(spectra[i], spectra[j], theta=theta)

    def compute(ij):
        i, j = ij
        try:
            return i, j, pair(i, j)
        except DegenerateInputError as exc:
            raise DegenerateInputError(f"pair ({i}, {j}): {exc}") from exc

    pairs = _pair_indices(n)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(compute, pairs))
    else:
        results = [compute(ij) for ij in pairs]
    for i, j, d in results:
        values[i, j] = d
        values[j, i] = d
    return DissimilarityMatrix(values=values, measure=measure)
