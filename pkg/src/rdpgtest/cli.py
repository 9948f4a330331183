"""Command line interface.

Subcommands::

    rdpgtest test A.edges B.edges --d 2 --variant identity --seed 7
    rdpgtest embed G.edges --d 2 --output emb.csv
    rdpgtest simulate-power power.ini
    rdpgtest w-compare wcomp.ini
    rdpgtest dissim manifest.txt --d 2 --output dissim.csv
    rdpgtest classify dissim.csv --labels labels.txt --k 3

All numeric output is written in full precision; the exit code is 0 on
success and nonzero with a diagnostic on error.
"""

import argparse
import sys

from . import harness, io, mmd
from .testing import TestConfig, two_sample_test


def _add_kernel_args(parser):
    parser.add_argument("--kernel", default="gaussian", choices=["gaussian", "imq", "energy"])
    parser.add_argument("--sigma", default="0.5", help="gaussian bandwidth, or 'median'")
    parser.add_argument("--c", type=float, default=1.0, help="inverse multiquadric offset")
    parser.add_argument("--beta", type=float, default=0.5, help="inverse multiquadric exponent")
    parser.add_argument("--q", type=float, default=1.0, help="energy kernel exponent")


def _kernel_from_args(args):
    if args.kernel == "gaussian":
        return mmd.GaussianKernel(None if args.sigma == "median" else float(args.sigma))
    if args.kernel == "imq":
        return mmd.InverseMultiquadricKernel(c=args.c, beta=args.beta)
    return mmd.EnergyKernel(exponent=args.q)


def _cmd_test(args):
    config = TestConfig(
        variant=args.variant,
        d=args.d,
        kernel=_kernel_from_args(args),
        permutations=args.B,
        alpha_level=args.alpha,
        seed=args.seed,
        sparsity_x=args.sparsity_a,
        sparsity_y=args.sparsity_b,
        eps_floor=args.eps_floor,
        align_reflections=not args.no_align,
    )
    graph_a = io.read_edge_list(args.graph_a)
    graph_b = io.read_edge_list(args.graph_b)
    report = two_sample_test(graph_a, graph_b, config)
    print(report.format_kv())
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(report.to_json() + "\n")
    return 0


def _cmd_embed(args):
    graph = io.read_edge_list(args.graph)
    from .embed import ase

    embedding = ase(graph.dense(), args.d)
    io.write_embedding_csv(embedding.coordinates, args.output)
    print(f"wrote {embedding.n} x {embedding.d} embedding to {args.output}")
    return 0


def _cmd_simulate_power(args):
    config = harness.load_power_config(args.config)
    if args.output:
        config.output_path = args.output
    table = harness.run_power_experiment(config)
    for cell in table.cells:
        print(
            f"n={cell.n} m={cell.m} sweep={cell.sweep} "
            f"power={cell.power:.17g} se={cell.se:.17g}"
        )
    if config.output_path:
        table.to_csv(config.output_path)
        print(f"wrote {config.output_path}")
    return 0


def _cmd_w_compare(args):
    cfg = harness.load_wcompare_config(args.config)
    output = args.output or cfg.pop("output")
    if not output:
        raise ValueError("an output path is required (--output or 'output =' in the config)")
    cfg.pop("output", None)
    result = harness.w_comparison_experiment(**cfg)
    result.to_csv(output)
    import numpy as np

    print(
        f"median |delta| random alignment: {np.median(np.abs(result.delta_random)):.17g}\n"
        f"median |delta| fixed alignment:  {np.median(np.abs(result.delta_fixed)):.17g}\n"
        f"wrote {output}"
    )
    return 0


def _read_manifest(path):
    paths, labels = [], []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            if "," in text:
                p, label = text.rsplit(",", 1)
                paths.append(p.strip())
                labels.append(label.strip())
            else:
                paths.append(text)
                labels.append(None)
    if any(l is None for l in labels):
        labels = None
    return paths, labels


def _cmd_dissim(args):
    paths, labels = _read_manifest(args.manifest)
    graphs = [io.read_edge_list(p) for p in paths]
    matrix = harness.pairwise_dissimilarity(
        graphs, args.d, _kernel_from_args(args), floor=not args.raw, labels=labels
    )
    io.write_matrix_csv(matrix.values, args.output, labels=matrix.labels)
    print(f"wrote {len(graphs)} x {len(graphs)} dissimilarity matrix to {args.output}")
    return 0


def _cmd_classify(args):
    matrix, labels = io.read_matrix_csv(args.matrix)
    if args.labels:
        labels = io.read_labels(args.labels)
    if labels is None:
        raise ValueError("no labels: pass --labels or embed them in the matrix CSV")
    report = harness.knn_classify(matrix, labels, args.k, folds=args.folds, seed=args.seed)
    print(report.format())
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rdpgtest",
        description="Nonparametric two-sample hypothesis tests for random dot product graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="two-sample test between two edge-list graphs")
    p.add_argument("graph_a")
    p.add_argument("graph_b")
    p.add_argument("--d", type=int, required=True, help="embedding dimension")
    p.add_argument("--variant", default="identity", choices=["identity", "scaling", "projection", "sparse"])
    _add_kernel_args(p)
    p.add_argument("--B", type=int, default=200, help="permutation count")
    p.add_argument("--alpha", type=float, default=0.05, help="significance level")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sparsity-a", type=float, default=None, help="known sparsity of graph A")
    p.add_argument("--sparsity-b", type=float, default=None, help="known sparsity of graph B")
    p.add_argument("--eps-floor", type=float, default=1e-6)
    p.add_argument("--no-align", action="store_true", help="skip the reflection alignment search")
    p.add_argument("--output", default=None, help="write the report as JSON")
    p.set_defaults(func=_cmd_test)

    p = sub.add_parser("embed", help="spectral embedding of an edge-list graph")
    p.add_argument("graph")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("simulate-power", help="Monte Carlo power study from a config file")
    p.add_argument("config")
    p.add_argument("--output", default=None, help="override the config output path")
    p.set_defaults(func=_cmd_simulate_power)

    p = sub.add_parser("w-compare", help="alignment comparison experiment from a config file")
    p.add_argument("config")
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_w_compare)

    p = sub.add_parser("dissim", help="pairwise dissimilarity matrix for a graph manifest")
    p.add_argument("manifest", help="text file: one edge-list path per line, optionally ',label'")
    p.add_argument("--d", type=int, required=True)
    _add_kernel_args(p)
    p.add_argument("--raw", action="store_true", help="keep negative statistics instead of flooring at 0")
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_dissim)

    p = sub.add_parser("classify", help="k-NN classification from a dissimilarity CSV")
    p.add_argument("matrix")
    p.add_argument("--labels", default=None, help="label file, one per line")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_classify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
