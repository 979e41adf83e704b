"""Sampled signals, curve datasets, and the slicing/resampling front end.

A long equally sampled record is cut into consecutive non-overlapping
segments of ``delta`` samples; each segment becomes one curve of a
:class:`FunctionalDataset`. Curves live on the normalized abscissa
``[0, 1]`` and can be resampled onto a dyadic grid of ``2**J`` points with
a natural cubic spline so that the pyramidal wavelet transform applies.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline


@dataclass
class SampledSignal:
    """A finite, equally sampled record of an underlying continuous process.

    Parameters
    ----------
    values : array_like
        Sample values, one per grid point.
    sampling_step : float
        Time units per sample; must be positive.
    """

    values: np.ndarray
    sampling_step: float = 1.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or self.values.size == 0:
            raise ValueError("signal must be a non-empty one-dimensional sequence")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("signal values must all be finite")
        if not self.sampling_step > 0:
            raise ValueError("sampling_step must be positive")

    def __len__(self):
        return self.values.size


@dataclass
class FunctionalDataset:
    """Ordered collection of curves sampled on a shared grid.

    ``curves`` is an (n, N) array, one curve per row. ``origin_index``
    records, per curve, the position of its first sample in the source
    signal when the dataset was produced by slicing. ``remainder`` is the
    number of trailing source samples the slicer dropped.
    """

    curves: np.ndarray
    segment_length: int | None = None
    origin_index: np.ndarray | None = None
    remainder: int = 0

    def __post_init__(self):
        self.curves = np.atleast_2d(np.asarray(self.curves, dtype=float))
        n, width = self.curves.shape
        if n < 1:
            raise ValueError("dataset needs at least one curve")
        if width < 2:
            raise ValueError("curves need at least two samples")
        if not np.all(np.isfinite(self.curves)):
            raise ValueError("curve values must all be finite")
        if self.segment_length is None:
            self.segment_length = width
        if self.origin_index is not None:
            self.origin_index = np.asarray(self.origin_index, dtype=int)
            if self.origin_index.shape != (n,):
                raise ValueError("origin_index must hold one entry per curve")

    @property
    def n_curves(self):
        return self.curves.shape[0]

    @property
    def n_samples(self):
        return self.curves.shape[1]


def slice_series(signal, delta):
    """Cut a signal into consecutive non-overlapping segments of length delta.

    Parameters
    ----------
    signal : SampledSignal
    delta : int
        Segment length in samples, at least 2 and at most ``len(signal)``.

    Returns
    -------
    FunctionalDataset
        ``len(signal) // delta`` curves in temporal order. A trailing
        remainder shorter than ``delta`` is dropped, never padded; its
        length is reported in ``remainder``.
    """
    delta = int(delta)
    if delta < 2:
        raise ValueError("delta must be at least 2")
    if delta > len(signal):
        raise ValueError(
            f"delta ({delta}) exceeds the signal length ({len(signal)})"
        )
    n = len(signal) // delta
    used = n * delta
    curves = signal.values[:used].reshape(n, delta)
    return FunctionalDataset(
        curves=curves.copy(),
        segment_length=delta,
        origin_index=np.arange(n) * delta,
        remainder=len(signal) - used,
    )


def resample_dyadic(curve, J):
    """Resample a curve onto ``2**J`` equispaced points of [0, 1].

    A natural cubic spline is fit through the N input samples placed at
    ``i / (N - 1)`` and evaluated at ``k / (2**J - 1)``. When the input
    length already equals ``2**J`` the curve is returned unchanged (the
    grids coincide). Downsampling (``2**J < N``) is allowed but flagged
    with a warning because detail is discarded.
    """
    curve = np.asarray(curve, dtype=float)
    if curve.ndim != 1:
        raise ValueError("curve must be one-dimensional")
    n = curve.size
    if n < 4:
        raise ValueError("need at least 4 samples for the cubic spline")
    J = int(J)
    if J < 1:
        raise ValueError("J must be a positive integer")
    target = 2 ** J
    if target == n:
        return curve.copy()
    if target < n:
        warnings.warn(
            f"resampling {n} samples down to {target} discards detail",
            stacklevel=2,
        )
    x = np.arange(n) / (n - 1)
    spline = CubicSpline(x, curve, bc_type="natural")
    return spline(np.arange(target) / (target - 1))


def resample_dataset(dataset, J):
    """Apply :func:`resample_dyadic` to every curve of a dataset."""
    rows = [resample_dyadic(c, J) for c in dataset.curves]
    return FunctionalDataset(
        curves=np.vstack(rows),
        segment_length=dataset.segment_length,
        origin_index=dataset.origin_index,
        remainder=dataset.remainder,
    )
