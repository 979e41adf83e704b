"""Slice a long record into daily curves and summarize their scale energies.

A month of synthetic half-hourly measurements (48 samples per day) mixes a
daily cycle, a weekly amplitude swing, and noise whose level drifts over
the month. Slicing turns the record into one curve per day; a dyadic
resampling puts each curve on 64 points so the pyramidal transform
applies; the scale-energy features then show where each day's variance
lives across scales.

Run:  python demos/01_slice_and_features.py
"""

import numpy as np

from waveclust import (
    SampledSignal,
    feature_matrix,
    resample_dataset,
    slice_series,
)

SAMPLES_PER_DAY = 48
DAYS = 30

rng = np.random.default_rng(1)
t = np.arange(DAYS * SAMPLES_PER_DAY)
day_phase = 2 * np.pi * t / SAMPLES_PER_DAY
week_swing = 1.0 + 0.5 * np.sin(2 * np.pi * t / (7 * SAMPLES_PER_DAY))
noise_level = 0.2 + 0.6 * t / t.size  # noise grows over the month
values = week_swing * np.sin(day_phase) + noise_level * rng.normal(size=t.size)

signal = SampledSignal(values, sampling_step=0.5)  # hours per sample
dataset = slice_series(signal, SAMPLES_PER_DAY)
print(f"sliced {dataset.n_curves} daily curves of {dataset.n_samples} samples"
      f" (remainder {dataset.remainder})")

# 48 is not a power of two; interpolate every day onto 2**6 = 64 points.
dyadic = resample_dataset(dataset, 6)
print(f"resampled onto {dyadic.n_samples} points per curve\n")

relative = feature_matrix(dyadic, kind="RC")
print(f"feature matrix: {relative.n_curves} curves x {relative.n_scales} "
      f"scales ({relative.kind}, {relative.wavelet})")
print("columns:", " ".join(relative.column_names()))

print("\nmean relative contribution per scale (column s0 is the coarsest):")
for name, mean in zip(relative.column_names(), relative.values.mean(axis=0)):
    print(f"  {name:8s} {mean:6.3f}  {'#' * int(round(60 * mean))}")

# The daily sine concentrates in a couple of mid scales; the drifting noise
# spreads over the fine ones. Compare the first and the last week:
first_week = relative.values[:7].mean(axis=0)
last_week = relative.values[-7:].mean(axis=0)
print("\nfine-scale share (three finest columns):")
print(f"  first week {first_week[-3:].sum():.3f}   "
      f"last week {last_week[-3:].sum():.3f}   (noise grew over the month)")

# logitRC maps the same shares onto the real line and ignores any affine
# change of the raw record -- the representation used for clustering.
logit = feature_matrix(dyadic, kind="logitRC")
rescaled = feature_matrix(
    type(dyadic)(curves=3.0 * dyadic.curves - 2.0), kind="logitRC")
print(f"\nlogit features unchanged under 3*z - 2: "
      f"max |difference| = {np.max(np.abs(rescaled.values - logit.values)):.2e}")
