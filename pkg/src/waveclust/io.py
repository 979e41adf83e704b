"""File formats for every artifact the toolkit reads or writes.

Text artifacts are CSV with '\\n' line endings and floats rendered by
``repr`` (the shortest string that round-trips the exact double), so a
rerun with the same inputs produces byte-identical files. Spectra use a
compact binary layout: two little-endian int32 header words (row count,
column count) followed by row-major float64 pairs (real, imaginary).
JSON artifacts are written with sorted keys for the same reason.
"""

import hashlib
import json

import numpy as np

from .data import FunctionalDataset, SampledSignal
from .dissimilarity import DissimilarityMatrix
from .dwt import FeatureMatrix, canonical_kind


def _fmt(value):
    return repr(float(value))


def _write_rows(handle, rows):
    for row in rows:
        handle.write(",".join(_fmt(v) for v in row))
        handle.write("\n")


def _data_lines(path):
    """Non-comment lines; a leading row that fails float parsing is
    treated as a header and skipped."""
    with open(path, "r", encoding="utf-8") as handle:
        lines = [ln.strip() for ln in handle
                 if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValueError(f"{path}: no data rows")
    try:
        [float(f) for f in lines[0].split(",")]
    except ValueError:
        lines = lines[1:]
    if not lines:
        raise ValueError(f"{path}: no data rows after the header")
    return lines


def _comment_fields(path):
    """key=value pairs from leading '#' comment lines."""
    fields = {}
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            if not line.lstrip().startswith("#"):
                break
            for token in line.lstrip("# \t").split():
                if "=" in token:
                    key, value = token.split("=", 1)
                    fields[key] = value
    return fields


def write_dataset(path, dataset):
    """One curve per row."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        _write_rows(handle, dataset.curves)


def read_dataset(path):
    rows = [np.array([float(f) for f in ln.split(",")])
            for ln in _data_lines(path)]
    widths = {r.size for r in rows}
    if len(widths) != 1:
        raise ValueError(f"{path}: rows have differing lengths {widths}")
    return FunctionalDataset(curves=np.vstack(rows))


def read_signal(path, sampling_step=1.0):
    """A long signal: one value per row, or one row of values."""
    rows = [[float(f) for f in ln.split(",")] for ln in _data_lines(path)]
    values = np.concatenate([np.asarray(r) for r in rows])
    return SampledSignal(values=values, sampling_step=sampling_step)


def write_labels(path, labels):
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for label in np.asarray(labels, dtype=int):
            handle.write(f"{int(label)}\n")


def read_labels(path):
    return np.array([int(float(ln)) for ln in _data_lines(path)], dtype=int)


def write_features(path, features):
    """Feature CSV: a comment naming kind and wavelet, then labeled
    columns (scale index counted from the coarsest side, resolution
    level from the finest), then one row per curve."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(f"# kind={features.kind} wavelet={features.wavelet}\n")
        handle.write(",".join(features.column_names()) + "\n")
        _write_rows(handle, features.values)


def read_features(path):
    fields = _comment_fields(path)
    kind = canonical_kind(fields.get("kind", "logitRC"))
    wavelet = fields.get("wavelet", "symmlet6")
    rows = [np.array([float(f) for f in ln.split(",")])
            for ln in _data_lines(path)]
    return FeatureMatrix(values=np.vstack(rows), kind=kind, wavelet=wavelet)


def write_dissimilarity(path, matrix):
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(f"# measure={matrix.measure}\n")
        _write_rows(handle, matrix.values)


def read_dissimilarity(path):
    fields = _comment_fields(path)
    rows = [np.array([float(f) for f in ln.split(",")])
            for ln in _data_lines(path)]
    return DissimilarityMatrix(values=np.vstack(rows),
                               measure=fields.get("measure", "WER"))


def write_complex_binary(path, matrix):
    """Binary layout: int32 rows, int32 cols (little-endian), then
    row-major float64 (real, imag) pairs."""
    matrix = np.asarray(matrix, dtype=complex)
    rows, cols = matrix.shape
    interleaved = np.empty((rows, cols, 2))
    interleaved[:, :, 0] = matrix.real
    interleaved[:, :, 1] = matrix.imag
    with open(path, "wb") as handle:
        handle.write(np.array([rows, cols], dtype="<i4").tobytes())
        handle.write(interleaved.astype("<f8").tobytes(order="C"))


def read_complex_binary(path):
    with open(path, "rb") as handle:
        header = np.frombuffer(handle.read(8), dtype="<i4")
        if header.size != 2:
            raise ValueError(f"{path}: truncated header")
        rows, cols = int(header[0]), int(header[1])
        body = np.frombuffer(handle.read(), dtype="<f8")
    if body.size != rows * cols * 2:
        raise ValueError(f"{path}: expected {rows * cols * 2} floats, "
                         f"found {body.size}")
    body = body.reshape(rows, cols, 2)
    return body[:, :, 0] + 1j * body[:, :, 1]


def write_spectrum(path, spectrum):
    write_complex_binary(path, spectrum.matrix)


def write_spectrum_magnitude(path, spectrum):
    """CSV of |W| with the scale in the first column, for plotting."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        n = spectrum.n_samples
        handle.write("scale," + ",".join(f"t{j}" for j in range(n)) + "\n")
        magnitude = np.abs(spectrum.matrix)
        for scale, row in zip(spectrum.grid.scales, magnitude):
            handle.write(_fmt(scale) + "," +
                         ",".join(_fmt(v) for v in row) + "\n")


def write_partition(path, partition, distances):
    """CSV of (observation, label, distance to its center or medoid)."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("observation,label,distance\n")
        for i, (label, dist) in enumerate(zip(partition.labels, distances)):
            handle.write(f"{i},{int(label)},{_fmt(dist)}\n")


def read_partition(path):
    labels, distances = [], []
    for line in _data_lines(path):
        obs, label, dist = line.split(",")
        labels.append(int(label))
        distances.append(float(dist))
    return np.asarray(labels, dtype=int), np.asarray(distances)


def write_distortion(path, curve):
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(f"# jump_k={curve.jump_k} p={curve.p} "
                     f"capped={curve.capped}\n")
        handle.write("k,distortion,transformed\n")
        for k, d, y in zip(curve.k_values, curve.distortions,
                           curve.transformed):
            handle.write(f"{int(k)},{_fmt(d)},{_fmt(y)}\n")


def _json_dump(path, payload):
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        json.dump(payload, handle, sort_keys=True, indent=2)
        handle.write("\n")


def _json_safe(value):
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


def selection_payload(report):
    """A SelectionReport as plain JSON-ready data."""
    return {
        "index": [float(v) for v in report.index],
        "threshold": float(report.threshold),
        "screened_in": list(report.screened_in),
        "best_by_size": {
            str(size): {"subset": list(subset), "sse": _json_safe(float(sse))}
            for size, (subset, sse) in sorted(report.best_by_size.items())
        },
        "selected": list(report.selected),
        "selected_sse": _json_safe(float(report.selected_sse)),
        "k": int(report.k),
        "penalty": float(report.penalty),
        "screen_quantile": float(report.screen_quantile),
        "seed": int(report.seed),
        "no_structure": bool(report.no_structure),
    }


def write_selection(path, report):
    _json_dump(path, selection_payload(report))


def write_selection_stable(path, final, reports):
    """Per-K selection reports plus the modal final subset."""
    _json_dump(path, {
        "final": list(final),
        "per_k": {str(k): selection_payload(r) for k, r in reports.items()},
    })


def write_validation(path, report):
    payload = {
        "misclassified": int(report.misclassified),
        "rate": float(report.rate),
        "contingency": report.contingency.tolist(),
        "rand": float(report.rand),
        "adjusted_rand": float(report.adjusted_rand),
        "matching": [list(pair) for pair in report.matching],
    }
    _json_dump(path, payload)


def write_graph_dot(path, graph):
    """The center graph in DOT form: positioned nodes, weighted edges."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("graph neighborhood {\n")
        for k, (x, y) in enumerate(graph.center_coords):
            handle.write(f'  c{k} [pos="{_fmt(x)},{_fmt(y)}"];\n')
        for (k, l) in sorted(graph.edges):
            weight = graph.edges[(k, l)]
            handle.write(f"  c{k} -- c{l} [weight={_fmt(weight)}];\n")
        handle.write("}\n")


def write_graph_csv(path, graph, labels):
    """Projected observation coordinates with hull-vertex memberships."""
    labels = np.asarray(labels, dtype=int)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("observation,cluster,x,y,inner_hull,outer_hull\n")
        for i, ((x, y), label) in enumerate(zip(graph.point_coords, labels)):
            inner = int(i in graph.inner_hull.get(int(label), ()))
            outer = int(i in graph.outer_hull.get(int(label), ()))
            handle.write(f"{i},{int(label)},{_fmt(x)},{_fmt(y)},"
                         f"{inner},{outer}\n")


def file_digest(path):
    """SHA-256 of a file's bytes, as a hex string."""
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(path, manifest):
    _json_dump(path, manifest)
