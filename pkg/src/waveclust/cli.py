"""Command-line front end.

Every subcommand reads its settings from flags, optionally underlaid by
a JSON config file (flags win), writes its declared artifacts, and
drops a manifest next to the primary output recording the resolved
configuration, the seed, and SHA-256 digests of all inputs and outputs.
Manifests contain no timestamps and the math is deterministic for a
fixed seed, so identical invocations produce byte-identical artifacts
regardless of the worker-pool size.

Exit codes: 0 success, 1 usage error (unknown flags, bad values),
2 data error (missing or malformed files, inconsistent configuration).
"""

import argparse
import json
import sys

import numpy as np
import scipy

from . import __version__
from . import io
from .clustering import Partition, choose_k_by_jump, kmeans, pam
from .cwt import make_scale_grid
from .data import resample_dataset, slice_series
from .dissimilarity import MEASURES, build_dissimilarity_matrix
from .dwt import feature_matrix
from .errors import DegenerateInputError
from .evaluation import neighborhood_graph, shadow_values, validation_report
from .feature_selection import select_features, select_features_stable
from .simulation import FarModel, gen_benchmark, gen_far, gen_sinus


class _Parser(argparse.ArgumentParser):
    """argparse variant that exits with status 1 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"usage error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _resolve_config(args, defaults, required=()):
    """Merge defaults, the optional JSON config file, and flags.

    Flags beat the config file, which beats defaults. Unknown config
    keys and missing required settings are data errors.
    """
    config = dict(defaults)
    path = getattr(args, "config", None)
    if path:
        try:
            with open(path, "r", encoding="utf-8") as handle:
                loaded = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ValueError(f"config file {path}: invalid JSON ({exc})")
        for key, value in loaded.items():
            if key not in config:
                raise ValueError(f"config file {path}: unknown field {key!r}")
            config[key] = value
    for key in config:
        flag = getattr(args, key, None)
        if flag is not None:
            config[key] = flag
    for key in required:
        if config.get(key) is None:
            raise ValueError(f"missing required setting {key!r}")
    return config


def _manifest(command, config, inputs, outputs):
    drop = {"threads"}  # execution detail; results do not depend on it
    recorded = {k: v for k, v in config.items() if k not in drop}
    return {
        "command": command,
        "config": recorded,
        "seed": config.get("seed"),
        "inputs": {name: io.file_digest(path)
                   for name, path in inputs.items()},
        "outputs": {name: io.file_digest(path)
                    for name, path in outputs.items()},
        "versions": {
            "waveclust": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
    }


def _finish(command, config, inputs, outputs):
    manifest_path = outputs[next(iter(outputs))] + ".manifest.json"
    io.write_manifest(manifest_path,
                      _manifest(command, config, inputs, outputs))
    return 0


def cmd_slice(args):
    config = _resolve_config(args, {"input": None, "output": None,
                                    "delta": None},
                             required=("input", "output", "delta"))
    signal = io.read_signal(config["input"])
    dataset = slice_series(signal, config["delta"])
    io.write_dataset(config["output"], dataset)
    print(f"sliced {dataset.n_curves} curves of length "
          f"{dataset.n_samples} (remainder {dataset.remainder})")
    return _finish("slice", config, {"signal": config["input"]},
                   {"dataset": config["output"]})


def cmd_features(args):
    config = _resolve_config(
        args,
        {"input": None, "output": None, "features": "logit-rc",
         "wavelet": "symmlet6", "resample_j": None},
        required=("input", "output"),
    )
    dataset = io.read_dataset(config["input"])
    if config["resample_j"] is not None:
        dataset = resample_dataset(dataset, config["resample_j"])
    features = feature_matrix(dataset, kind=config["features"],
                              wavelet=config["wavelet"])
    io.write_features(config["output"], features)
    print(f"wrote {features.n_curves} x {features.n_scales} "
          f"{features.kind} features")
    return _finish("features", config, {"dataset": config["input"]},
                   {"features": config["output"]})


def cmd_select(args):
    config = _resolve_config(
        args,
        {"input": None, "output": None, "k": 3, "kmax": None,
         "screen_quantile": 0.5, "penalty": 0.05, "restarts": 6, "seed": 0},
        required=("input", "output"),
    )
    features = io.read_features(config["input"])
    if config["kmax"] is not None:
        final, reports = select_features_stable(
            features, config["kmax"],
            screen_quantile=config["screen_quantile"],
            penalty=config["penalty"], restarts=config["restarts"],
            seed=config["seed"])
        io.write_selection_stable(config["output"], final, reports)
        print(f"selected features (mode over K=2..{config['kmax']}): "
              f"{list(final)}")
    else:
        report = select_features(
            features, config["k"],
            screen_quantile=config["screen_quantile"],
            penalty=config["penalty"], restarts=config["restarts"],
            seed=config["seed"])
        io.write_selection(config["output"], report)
        if report.no_structure:
            print("no structure: every feature was screened out")
        else:
            print(f"selected features: {list(report.selected)}")
    return _finish("select", config, {"features": config["input"]},
                   {"selection": config["output"]})


def cmd_choose_k(args):
    config = _resolve_config(
        args,
        {"input": None, "output": None, "kmax": 10, "restarts": 10,
         "seed": 0, "threads": 1},
        required=("input", "output"),
    )
    features = io.read_features(config["input"])
    k_star, curve = choose_k_by_jump(features, config["kmax"],
                                     restarts=config["restarts"],
                                     seed=config["seed"],
                                     threads=config["threads"])
    io.write_distortion(config["output"], curve)
    print(f"jump method selects K = {k_star}")
    return _finish("choose-k", config, {"features": config["input"]},
                   {"distortion": config["output"]})


def _grid_from(config):
    return make_scale_grid(config["omin"], config["omax"], config["voices"])


def cmd_dissim(args):
    config = _resolve_config(
        args,
        {"input": None, "output": None, "measure": "wer", "omin": 1,
         "omax": 6, "voices": 8, "omega0": 6.0, "normalization": "L1",
         "theta": 0.95, "threads": 1, "binary_output": None},
        required=("input", "output"),
    )
    dataset = io.read_dataset(config["input"])
    measure = _canonical_measure(config["measure"])
    matrix = build_dissimilarity_matrix(
        dataset, measure=measure, grid=_grid_from(config),
        omega0=config["omega0"], normalization=config["normalization"],
        theta=config["theta"], threads=config["threads"])
    io.write_dissimilarity(config["output"], matrix)
    outputs = {"dissimilarity": config["output"]}
    if config["binary_output"]:
        io.write_complex_binary(config["binary_output"], matrix.values)
        outputs["dissimilarity_binary"] = config["binary_output"]
    print(f"wrote {matrix.n} x {matrix.n} {measure} dissimilarities")
    return _finish("dissim", config, {"dataset": config["input"]}, outputs)


def _canonical_measure(name):
    mapping = {m.lower(): m for m in MEASURES}
    key = str(name).lower()
    if key not in mapping:
        raise ValueError(f"measure must be one of "
                         f"{sorted(mapping)}, got {name!r}")
    return mapping[key]


def cmd_cluster(args):
    config = _resolve_config(
        args,
        {"input": None, "output": None, "pipeline": "features", "k": None,
         "restarts": 20, "seed": 0, "threads": 1, "measure": None,
         "omin": 1, "omax": 6, "voices": 8, "omega0": 6.0,
         "normalization": "L1", "theta": 0.95, "dissim_input": None},
        required=("input", "output", "k"),
    )
    if config["pipeline"] == "features":
        if config["measure"] is not None:
            raise ValueError("field 'measure' applies only to "
                             "pipeline='spectrum'")
        features = io.read_features(config["input"])
        part = kmeans(features, config["k"], restarts=config["restarts"],
                      seed=config["seed"], threads=config["threads"])
        diffs = features.values - part.centers[part.labels]
        distances = np.sqrt((diffs ** 2).sum(axis=1))
        inputs = {"features": config["input"]}
    elif config["pipeline"] == "spectrum":
        if config["dissim_input"]:
            matrix = io.read_dissimilarity(config["dissim_input"])
            inputs = {"dissimilarity": config["dissim_input"]}
        else:
            dataset = io.read_dataset(config["input"])
            measure = _canonical_measure(config["measure"] or "wer")
            matrix = build_dissimilarity_matrix(
                dataset, measure=measure, grid=_grid_from(config),
                omega0=config["omega0"],
                normalization=config["normalization"],
                theta=config["theta"], threads=config["threads"])
            inputs = {"dataset": config["input"]}
        part = pam(matrix, config["k"], seed=config["seed"])
        distances = matrix.values[np.arange(matrix.n),
                                  part.medoids[part.labels]]
    else:
        raise ValueError("field 'pipeline' must be 'features' or 'spectrum'")
    io.write_partition(config["output"], part, distances)
    sizes = np.bincount(part.labels, minlength=part.k).tolist()
    print(f"{part.method} cost {part.cost:.6g}, cluster sizes {sizes}")
    return _finish("cluster", config, inputs,
                   {"partition": config["output"]})


def cmd_diagnose(args):
    config = _resolve_config(
        args,
        {"input": None, "partition": None, "truth": None,
         "output_prefix": None},
        required=("input", "partition", "output_prefix"),
    )
    features = io.read_features(config["input"])
    labels, _ = io.read_partition(config["partition"])
    if labels.size != features.n_curves:
        raise ValueError("partition length does not match the feature rows")
    k = int(labels.max()) + 1
    centers = np.vstack([features.values[labels == j].mean(axis=0)
                         for j in range(k)])
    part = Partition(labels=labels, k=k, cost=0.0, centers=centers,
                     method="kmeans")
    shadows = shadow_values(features.values, part)
    graph = neighborhood_graph(features.values, part)
    prefix = config["output_prefix"]
    shadow_path = prefix + ".shadows.csv"
    with open(shadow_path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("observation,shadow\n")
        for i, s in enumerate(shadows):
            handle.write(f"{i},{repr(float(s))}\n")
    dot_path, csv_path = prefix + ".graph.dot", prefix + ".graph.csv"
    io.write_graph_dot(dot_path, graph)
    io.write_graph_csv(csv_path, graph, labels)
    inputs = {"features": config["input"],
              "partition": config["partition"]}
    outputs = {"shadows": shadow_path, "graph_dot": dot_path,
               "graph_csv": csv_path}
    if config["truth"]:
        truth = io.read_labels(config["truth"])
        report = validation_report(labels, truth)
        validation_path = prefix + ".validation.json"
        io.write_validation(validation_path, report)
        inputs["truth"] = config["truth"]
        outputs["validation"] = validation_path
        print(f"misclassified {report.misclassified} "
              f"(rate {report.rate:.4f}), ARI {report.adjusted_rand:.4f}")
    else:
        print(f"mean shadow {float(np.mean(shadows)):.4f} over "
              f"{labels.size} observations")
    return _finish("diagnose", config, inputs, outputs)


def _run_simulation(command, args):
    config = _resolve_config(
        args,
        {"output": None, "labels_output": None, "model": "benchmark",
         "n": 25, "length": 1024, "sigma": 1.0, "rho": 0.8, "seed": 0},
        required=("output",),
    )
    model = "benchmark" if command == "benchmark" else config["model"]
    if model == "benchmark":
        dataset, labels = gen_benchmark(
            seed=config["seed"], n_per_cluster=config["n"],
            length=config["length"], rho=config["rho"],
            sigma=config["sigma"])
    elif model == "sinus":
        dataset, labels = gen_sinus(config["n"], length=config["length"],
                                    sigma=config["sigma"],
                                    seed=config["seed"])
    elif model in ("far-diagonal", "far-full"):
        far = FarModel(kernel=model.split("-", 1)[1], rho=config["rho"],
                       m=config["length"], sigma=config["sigma"])
        dataset, labels = gen_far(config["n"], length=config["length"],
                                  model=far, seed=config["seed"])
    else:
        raise ValueError("field 'model' must be benchmark, sinus, "
                         "far-diagonal or far-full")
    config["model"] = model
    io.write_dataset(config["output"], dataset)
    outputs = {"dataset": config["output"]}
    if config["labels_output"]:
        io.write_labels(config["labels_output"], labels)
        outputs["labels"] = config["labels_output"]
    print(f"generated {dataset.n_curves} curves of length "
          f"{dataset.n_samples} ({model})")
    return _finish(command, config, {}, outputs)


def cmd_simulate(args):
    return _run_simulation("simulate", args)


def cmd_benchmark(args):
    return _run_simulation("benchmark", args)


def _add_common(sub):
    sub.add_argument("--config", help="JSON config file; flags override it")
    sub.add_argument("--seed", type=int)


def build_parser():
    parser = _Parser(prog="waveclust",
                     description="Wavelet-based clustering of sampled "
                                 "functional time series")
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("slice",
                            help="cut a long signal into fixed-length curves")
    p.add_argument("--input")
    p.add_argument("--output")
    p.add_argument("--delta", type=int)
    p.add_argument("--config")
    p.set_defaults(func=cmd_slice)

    p = commands.add_parser("features", help="scale-energy features per curve")
    p.add_argument("--input")
    p.add_argument("--output")
    p.add_argument("--features", choices=["ac", "rc", "logit-rc"])
    p.add_argument("--wavelet", choices=["symmlet6", "haar"])
    p.add_argument("--resample-j", dest="resample_j", type=int)
    p.add_argument("--config")
    p.set_defaults(func=cmd_features)

    p = commands.add_parser("select", help="screen and pick feature subsets")
    p.add_argument("--input")
    p.add_argument("--output")
    p.add_argument("--k", type=int)
    p.add_argument("--kmax", type=int)
    p.add_argument("--screen-quantile", dest="screen_quantile", type=float)
    p.add_argument("--penalty", type=float)
    p.add_argument("--restarts", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_select)

    p = commands.add_parser("choose-k", help="distortion-jump cluster count")
    p.add_argument("--input")
    p.add_argument("--output")
    p.add_argument("--kmax", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--threads", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_choose_k)

    def add_spectral_flags(sub):
        sub.add_argument("--measure", choices=["wer", "mca",
                                               "euclid-features",
                                               "euclid-raw"])
        sub.add_argument("--omin", type=int)
        sub.add_argument("--omax", type=int)
        sub.add_argument("--voices", type=int)
        sub.add_argument("--omega0", type=float)
        sub.add_argument("--normalization", choices=["L1", "L2"])
        sub.add_argument("--theta", type=float)
        sub.add_argument("--threads", type=int)

    p = commands.add_parser("cluster", help="k-means on features or PAM on "
                            "spectral dissimilarities")
    p.add_argument("--input")
    p.add_argument("--output")
    p.add_argument("--pipeline", choices=["features", "spectrum"])
    p.add_argument("--k", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--dissim-input", dest="dissim_input")
    add_spectral_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_cluster)

    p = commands.add_parser("dissim", help="all-pairs dissimilarity matrix")
    p.add_argument("--input")
    p.add_argument("--output")
    p.add_argument("--binary-output", dest="binary_output")
    add_spectral_flags(p)
    p.add_argument("--config")
    p.set_defaults(func=cmd_dissim)

    p = commands.add_parser("diagnose", help="shadow values, neighborhood "
                            "graph, optional validation")
    p.add_argument("--input")
    p.add_argument("--partition")
    p.add_argument("--truth")
    p.add_argument("--output-prefix", dest="output_prefix")
    p.add_argument("--config")
    p.set_defaults(func=cmd_diagnose)

    for name, fn, help_text in (
        ("simulate", cmd_simulate, "generate model curves"),
        ("benchmark", cmd_benchmark, "generate the 3-cluster benchmark"),
    ):
        p = commands.add_parser(name, help=help_text)
        p.add_argument("--output")
        p.add_argument("--labels-output", dest="labels_output")
        if name == "simulate":
            p.add_argument("--model", choices=["benchmark", "sinus",
                                               "far-diagonal", "far-full"])
        p.add_argument("--n", type=int)
        p.add_argument("--length", type=int)
        p.add_argument("--sigma", type=float)
        p.add_argument("--rho", type=float)
        _add_common(p)
        p.set_defaults(func=fn)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code or 0
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError, DegenerateInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
