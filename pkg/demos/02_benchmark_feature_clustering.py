"""Cluster one benchmark replicate: selected scale features versus raw curves.

The benchmark draws three groups of 25 curves -- a noisy sinus and two
functional autoregressions (diagonal and full persistence kernels) -- that
overlap heavily in the raw sample space. Logit-relative scale energies
compress each 1024-point curve to ten numbers; an SSE-penalty selection,
voted over a range of cluster counts, keeps the scales that actually
separate the groups. k-means on those few columns recovers the partition
better than k-means on the raw curves.

Run:  python demos/02_benchmark_feature_clustering.py
"""

import numpy as np

from waveclust import (
    feature_matrix,
    gen_benchmark,
    kmeans,
    select_features_stable,
    validation_report,
)

SEED = 7

dataset, truth = gen_benchmark(seed=SEED)
print(f"benchmark replicate: {dataset.n_curves} curves x "
      f"{dataset.n_samples} samples, 3 groups of 25\n")

features = feature_matrix(dataset, kind="logitRC")
selected, reports = select_features_stable(features, k_max=20, seed=SEED)
names = features.column_names()
print("feature selection (mode over K = 2..20):",
      ", ".join(names[j] for j in selected))
votes = {j: sum(j in r.selected for r in reports.values()) for j in selected}
print("votes per kept column:",
      ", ".join(f"{names[j]}:{votes[j]}/19" for j in selected))

sel_part = kmeans(features.values[:, list(selected)], 3, restarts=20,
                  seed=SEED)
raw_part = kmeans(dataset.curves, 3, restarts=20, seed=SEED)

for label, part in (("selected logit-RC features", sel_part),
                    ("raw 1024-point curves", raw_part)):
    report = validation_report(part.labels, truth)
    print(f"\nk-means on {label}:")
    print(f"  misclassified {report.misclassified}/75 "
          f"(rate {report.rate:.3f}), ARI {report.adjusted_rand:.3f}")
    print("  contingency (rows = found clusters; columns = true "
          "sinus/diagonal/full):")
    for row in report.contingency:
        print("   ", " ".join(f"{int(c):3d}" for c in row))

sel_mis = validation_report(sel_part.labels, truth).misclassified
raw_mis = validation_report(raw_part.labels, truth).misclassified
print(f"\nfeature route beats raw route by "
      f"{raw_mis - sel_mis} curves on this replicate; most confusions sit "
      f"between the two autoregressive groups.")

# Where the errors live: mean coarse-scale profile per true group.
coarse = features.values[:, :3]
print("\nmean of the three coarsest logit columns per true group:")
for g, name in enumerate(("sinus", "far-diagonal", "far-full")):
    mean = coarse[truth == g].mean(axis=0)
    print(f"  {name:12s} " + " ".join(f"{v:7.3f}" for v in mean))
