"""Monte Carlo experiments: power studies, alignment comparisons,
graph-collection dissimilarities and nearest-neighbor classification.

Replicates are seeded through :func:`rdpgtest.streams.substream` with the
path ``(master_seed, grid_index, replicate_index)``, so grid cells can be
evaluated in any order (or in parallel) with bit-identical results.
"""

import configparser
from dataclasses import dataclass, field, replace
from itertools import product

import numpy as np

from . import io as _io
from . import mmd
from .embed import ase, fix_signs, second_moment_rotation
from .model import (
    LatentDistribution,
    UniformBox,
    sample_latent,
    sample_rdpg,
    sbm_to_latent,
    second_moment_matrix,
)
from .streams import substream
from .testing import TestConfig, two_sample_point_test, two_sample_test

__all__ = [
    "two_block_pair",
    "uniform_box_pair",
    "ExperimentConfig",
    "PowerCell",
    "PowerTable",
    "run_power_experiment",
    "WComparison",
    "w_comparison_experiment",
    "DissimilarityMatrix",
    "pairwise_dissimilarity",
    "KnnReport",
    "knn_classify",
    "load_power_config",
    "load_wcompare_config",
]


def two_block_pair(epsilon, base=0.5, cross=0.2, weights=(0.4, 0.6)):
    """Two-block blockmodel pair: the base model against an offset one.

    ``F`` comes from block probabilities ``[[base, cross], [cross, base]]``
    and ``G`` from ``base + epsilon`` on the diagonal; ``epsilon = 0``
    gives the null configuration ``F = G``.
    """
    f = sbm_to_latent([[base, cross], [cross, base]], weights)
    g = sbm_to_latent([[base + epsilon, cross], [cross, base + epsilon]], weights)
    return f, g


def uniform_box_pair(epsilon, f_upper=1.0 / np.sqrt(2.0), g_upper=1.0 / np.sqrt(3.0), dim=2):
    """Uniform-box pair for scale-equivalence testing.

    ``F`` is uniform on ``[epsilon, f_upper]^dim`` and ``G`` uniform on
    ``[0, g_upper]^dim``; at ``epsilon = 0`` the two differ exactly by a
    global scale factor.
    """
    f = UniformBox([epsilon] * dim, [f_upper] * dim)
    g = UniformBox([0.0] * dim, [g_upper] * dim)
    return f, g


@dataclass
class ExperimentConfig:
    """Grid specification for a power study.

    ``pairs`` holds ``(sweep_label, F, G)`` triples; ``n_grid`` the first
    sample sizes (``m`` defaults to ``n`` unless ``m_grid`` is given, one
    entry per ``n_grid`` entry). When ``oracle_arm`` is set, each replicate
    also runs the test on the true latent positions for side-by-side
    comparison.
    """

    pairs: list
    n_grid: list
    replicates: int
    test: TestConfig
    master_seed: int
    m_grid: list | None = None
    oracle_arm: bool = False
    sparsity: float = 1.0
    output_path: str | None = None

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError(f"replicates must be >= 1, got {self.replicates}")
        if not self.pairs or not self.n_grid:
            raise ValueError("pairs and n_grid must be nonempty")
        if self.m_grid is not None and len(self.m_grid) != len(self.n_grid):
            raise ValueError("m_grid must pair with n_grid entry by entry")
        if not 0.0 < self.sparsity <= 1.0:
            raise ValueError(f"sparsity must lie in (0, 1], got {self.sparsity}")


@dataclass
class PowerCell:
    """Rejection frequency for one (n, sweep) grid cell."""

    n: int
    m: int
    sweep: object
    replicates: int
    rejections: int
    power: float
    se: float
    oracle_rejections: int | None = None
    oracle_power: float | None = None
    oracle_se: float | None = None


@dataclass
class PowerTable:
    """Collected power estimates plus the configuration that produced them."""

    cells: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    _COLUMNS = ("n", "m", "sweep", "replicates", "rejections", "power", "se")
    _ORACLE_COLUMNS = ("oracle_rejections", "oracle_power", "oracle_se")

    def to_csv(self, path):
        oracle = any(c.oracle_power is not None for c in self.cells)
        columns = self._COLUMNS + (self._ORACLE_COLUMNS if oracle else ())
        rows = []
        for c in self.cells:
            row = [c.n, c.m, c.sweep, c.replicates, c.rejections, c.power, c.se]
            if oracle:
                row += [c.oracle_rejections, c.oracle_power, c.oracle_se]
            rows.append(row)
        comments = [f"{k}={v}" for k, v in sorted(self.metadata.items())]
        _io.write_table_csv(path, columns, rows, comments=comments)


def _binomial_se(successes, trials):
    p = successes / trials
    return float(np.sqrt(p * (1.0 - p) / trials))


def run_power_experiment(config):
    """Estimate rejection frequencies over a (n, sweep) grid.

    Each replicate samples latent positions for both distributions, draws
    one graph from each, runs the configured test, and records the
    decision at ``alpha_level``. Partial results are flushed to
    ``config.output_path`` (when set) after every grid cell.

    Returns
    -------
    PowerTable
    """
    test_cfg = config.test
    if test_cfg.variant == "sparse" and test_cfg.sparsity_x is None:
        test_cfg = replace(test_cfg, sparsity_x=config.sparsity, sparsity_y=config.sparsity)
    m_grid = config.m_grid if config.m_grid is not None else list(config.n_grid)

    table = PowerTable(
        metadata={
            "master_seed": config.master_seed,
            "replicates": config.replicates,
            "variant": test_cfg.variant,
            "d": test_cfg.d,
            "kernel": test_cfg.kernel.describe(),
            "B": test_cfg.permutations,
            "alpha_level": test_cfg.alpha_level,
            "sparsity": config.sparsity,
            "oracle_arm": config.oracle_arm,
            "n_grid": " ".join(str(n) for n in config.n_grid),
            "sweep": " ".join(str(p[0]) for p in config.pairs),
        }
    )
    grid = list(product(zip(config.n_grid, m_grid), config.pairs))
    for gi, ((n, m), (label, f_dist, g_dist)) in enumerate(grid):
        rejections = 0
        oracle_rejections = 0
        for ri in range(config.replicates):
            rng = substream(config.master_seed, gi, ri)
            x = sample_latent(f_dist, n, rng)
            y = sample_latent(g_dist, m, rng)
            graph_a = sample_rdpg(x, config.sparsity, rng)
            graph_b = sample_rdpg(y, config.sparsity, rng)
            report = two_sample_test(graph_a, graph_b, test_cfg, rng=rng)
            rejections += int(report.reject)
            if config.oracle_arm:
                oracle = two_sample_point_test(x.X, y.X, test_cfg, rng=rng)
                oracle_rejections += int(oracle.reject)
        cell = PowerCell(
            n=n,
            m=m,
            sweep=label,
            replicates=config.replicates,
            rejections=rejections,
            power=rejections / config.replicates,
            se=_binomial_se(rejections, config.replicates),
        )
        if config.oracle_arm:
            cell.oracle_rejections = oracle_rejections
            cell.oracle_power = oracle_rejections / config.replicates
            cell.oracle_se = _binomial_se(oracle_rejections, config.replicates)
        table.cells.append(cell)
        if config.output_path:
            table.to_csv(config.output_path)
    return table


def _moment_frame(dist, rng, surrogate_size=10**6):
    moment = second_moment_matrix(dist, rng=rng, surrogate_size=surrogate_size)
    _, vecs = np.linalg.eigh(moment)
    return fix_signs(vecs[:, ::-1])


@dataclass(eq=False)
class WComparison:
    """Paired scaled differences between embedded and true-position statistics.

    ``delta_random`` uses the replicate-specific alignment built from the
    second moments of the realized latent positions; ``delta_fixed`` uses
    the single population-level alignment ``w_fixed``. Histogramming the
    two columns shows how much faster the data-driven alignment tracks the
    embedded statistic.
    """

    delta_random: np.ndarray
    delta_fixed: np.ndarray
    w_fixed: np.ndarray
    n: int
    m: int

    def to_csv(self, path):
        rows = [
            [r, self.n, self.m, dr, df]
            for r, (dr, df) in enumerate(zip(self.delta_random, self.delta_fixed))
        ]
        _io.write_table_csv(
            path,
            ("replicate", "n", "m", "delta_random_alignment", "delta_fixed_alignment"),
            rows,
        )


def w_comparison_experiment(
    f_dist,
    g_dist,
    n,
    d,
    spec,
    replicates,
    master_seed,
    m=None,
    surrogate_size=10**6,
):
    """Compare replicate-specific against population-level alignments.

    Per replicate, both graphs are embedded and the scaled difference
    ``(m+n) * (U(embedded) - U(true, aligned))`` is recorded twice: once
    aligning by the realized second-moment rotations, once by the fixed
    population rotation (computed analytically where possible, otherwise
    from a ``surrogate_size`` Monte Carlo draw).
    """
    if m is None:
        m = n
    t1 = _moment_frame(f_dist, substream(master_seed, replicates), surrogate_size)
    t2 = _moment_frame(g_dist, substream(master_seed, replicates + 1), surrogate_size)
    w_fixed = t2 @ t1.T
    delta_random = np.empty(replicates)
    delta_fixed = np.empty(replicates)
    for r in range(replicates):
        rng = substream(master_seed, r)
        x = sample_latent(f_dist, n, rng).X
        y = sample_latent(g_dist, m, rng).X
        xhat = ase(sample_rdpg(x, 1.0, rng).dense(), d).coordinates
        yhat = ase(sample_rdpg(y, 1.0, rng).dense(), d).coordinates
        w_random = second_moment_rotation(y) @ second_moment_rotation(x).T
        u_embedded = mmd.u_statistic(spec, xhat, yhat)
        scale = n + m
        delta_random[r] = scale * (u_embedded - mmd.u_statistic(spec, x, y @ w_random))
        delta_fixed[r] = scale * (u_embedded - mmd.u_statistic(spec, x, y @ w_fixed))
    return WComparison(delta_random, delta_fixed, w_fixed, n, m)


@dataclass(eq=False)
class DissimilarityMatrix:
    """Pairwise two-sample statistics between embedded graphs.

    By default entries are the positive part of the unbiased statistic
    (negative values mean "indistinguishable" and a nearest-neighbor
    classifier needs a nonnegative dissimilarity); construct with
    ``floor=False`` to keep raw values. The diagonal is exactly zero.
    """

    values: np.ndarray
    labels: list | None = None
    floored: bool = True


def pairwise_dissimilarity(graphs, d, spec, floor=True, labels=None):
    """Embed each graph once and fill the matrix of pairwise statistics.

    Parameters
    ----------
    graphs : sequence of Graph or adjacency arrays, length >= 2
    d : int
        Embedding dimension; every graph needs at least ``max(d, 2)``
        vertices.
    spec : KernelSpec
    floor : bool
        Replace negative statistics by zero (default).
    labels : sequence, optional
        Carried through for classification.
    """
    if len(graphs) < 2:
        raise ValueError(f"need at least 2 graphs, got {len(graphs)}")
    if labels is not None and len(labels) != len(graphs):
        raise ValueError(f"{len(labels)} labels for {len(graphs)} graphs")
    embeddings = []
    for idx, graph in enumerate(graphs):
        dense = graph.dense() if hasattr(graph, "dense") else np.asarray(graph, dtype=float)
        if dense.shape[0] < max(d, 2):
            raise ValueError(f"graph {idx} has {dense.shape[0]} vertices, need >= {max(d, 2)}")
        try:
            embeddings.append(ase(dense, d).coordinates)
        except Exception as exc:
            raise ValueError(f"embedding graph {idx} failed: {exc}") from exc
    count = len(embeddings)
    values = np.zeros((count, count))
    for g in range(count):
        for h in range(g + 1, count):
            u = mmd.u_statistic(spec, embeddings[g], embeddings[h])
            if floor:
                u = max(u, 0.0)
            values[g, h] = values[h, g] = u
    return DissimilarityMatrix(values, labels=list(labels) if labels is not None else None, floored=floor)


@dataclass(eq=False)
class KnnReport:
    """Cross-validated nearest-neighbor accuracy."""

    accuracy: float
    fold_accuracies: list
    k: int
    folds: int
    seed: int
    n_items: int

    def format(self):
        folds = ", ".join(f"{a:.3f}" for a in self.fold_accuracies)
        return (
            f"k-NN accuracy: {self.accuracy:.4f} "
            f"(k={self.k}, {self.folds}-fold, n={self.n_items})\n"
            f"per fold: {folds}"
        )


def knn_classify(dissimilarity, labels, k, folds=10, seed=0):
    """Leave-fold-out k-nearest-neighbor classification on a dissimilarity.

    Folds are stratified by label with a seeded shuffle. Each held-out
    item is assigned the majority label among its ``k`` smallest
    dissimilarity training items; vote ties break by the smaller summed
    dissimilarity of the tied class, then by the lower index in sorted
    label order. Neighbor ties at equal dissimilarity resolve by training
    index (stable sort).
    """
    d = dissimilarity.values if isinstance(dissimilarity, DissimilarityMatrix) else dissimilarity
    d = np.asarray(d, dtype=float)
    labels = list(labels)
    n = d.shape[0]
    if d.shape != (n, n):
        raise ValueError(f"dissimilarity must be square, got shape {d.shape}")
    if len(labels) != n:
        raise ValueError(f"{len(labels)} labels for {n} items")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if folds < 2:
        raise ValueError(f"folds must be >= 2, got {folds}")

    rng = substream(seed)
    classes = sorted(set(labels))
    class_index = {c: i for i, c in enumerate(classes)}
    fold_of = np.empty(n, dtype=int)
    for c in classes:
        idx = np.array([i for i, l in enumerate(labels) if l == c])
        rng.shuffle(idx)
        for pos, i in enumerate(idx):
            fold_of[i] = pos % folds
    fold_sizes = np.bincount(fold_of, minlength=folds)
    smallest_training = n - int(fold_sizes.max())
    if k > smallest_training:
        raise ValueError(f"k={k} exceeds the smallest training fold size {smallest_training}")

    labels_arr = np.array([class_index[l] for l in labels])
    fold_accuracies = []
    correct_total = 0
    for f in range(folds):
        test_idx = np.nonzero(fold_of == f)[0]
        train_idx = np.nonzero(fold_of != f)[0]
        if test_idx.size == 0:
            fold_accuracies.append(float("nan"))
            continue
        correct = 0
        for t in test_idx:
            row = d[t, train_idx]
            order = np.argsort(row, kind="stable")[:k]
            neighbor_labels = labels_arr[train_idx[order]]
            neighbor_dist = row[order]
            counts = np.bincount(neighbor_labels, minlength=len(classes))
            top = counts.max()
            tied = np.nonzero(counts == top)[0]
            if tied.size > 1:
                sums = [neighbor_dist[neighbor_labels == c].sum() for c in tied]
                tied = tied[np.lexsort((tied, np.asarray(sums)))]
            predicted = int(tied[0])
            correct += int(predicted == labels_arr[t])
        fold_accuracies.append(correct / test_idx.size)
        correct_total += correct
    return KnnReport(
        accuracy=correct_total / n,
        fold_accuracies=fold_accuracies,
        k=k,
        folds=folds,
        seed=seed,
        n_items=n,
    )


_FAMILIES = ("two_block", "uniform_box", "custom")


def _kernel_from_section(section):
    name = section.get("kernel", "gaussian").strip()
    if name == "gaussian":
        sigma = section.get("sigma", "0.5").strip()
        return mmd.GaussianKernel(None if sigma == "median" else float(sigma))
    if name in ("inverse_multiquadric", "imq"):
        return mmd.InverseMultiquadricKernel(
            c=float(section.get("c", 1.0)), beta=float(section.get("beta", 0.5))
        )
    if name == "energy":
        return mmd.EnergyKernel(exponent=float(section.get("q", 1.0)))
    raise ValueError(f"unknown kernel {name!r}")


def _test_config_from_section(section, seed):
    cfg = TestConfig(
        variant=section.get("variant", "identity").strip(),
        d=int(section.get("d", 2)),
        kernel=_kernel_from_section(section),
        permutations=int(section.get("b", section.get("permutations", 200))),
        alpha_level=float(section.get("alpha_level", 0.05)),
        seed=seed,
        eps_floor=float(section.get("eps_floor", 1e-6)),
        align_reflections=section.get("align_reflections", "true").strip().lower() != "false",
        sparsity_x=float(section["sparsity_x"]) if "sparsity_x" in section else None,
        sparsity_y=float(section["sparsity_y"]) if "sparsity_y" in section else None,
    )
    return cfg


def _pairs_from_config(parser, experiment):
    family = experiment.get("family", "custom").strip()
    if family not in _FAMILIES:
        raise ValueError(f"family must be one of {_FAMILIES}, got {family!r}")
    if family == "custom":
        f = _io.parse_distribution(parser["F"])
        g = _io.parse_distribution(parser["G"])
        return [("custom", f, g)]
    sweep = [float(t) for t in experiment.get("sweep", "0").split()]
    pairs = []
    for eps in sweep:
        if family == "two_block":
            f, g = two_block_pair(
                eps,
                base=float(experiment.get("base", 0.5)),
                cross=float(experiment.get("cross", 0.2)),
                weights=_io._parse_vector(experiment.get("weights", "0.4 0.6")),
            )
        else:
            f, g = uniform_box_pair(
                eps,
                f_upper=float(experiment.get("f_upper", 1.0 / np.sqrt(2.0))),
                g_upper=float(experiment.get("g_upper", 1.0 / np.sqrt(3.0))),
                dim=int(experiment.get("dim", 2)),
            )
        pairs.append((eps, f, g))
    return pairs


def load_power_config(path):
    """Read a power-study configuration file (INI format, see README)."""
    parser = configparser.ConfigParser()
    if not parser.read(path):
        raise FileNotFoundError(path)
    experiment = parser["experiment"]
    seed = int(experiment.get("seed", 0))
    test_cfg = _test_config_from_section(
        parser["test"] if parser.has_section("test") else {}, seed
    )
    n_grid = [int(t) for t in experiment.get("n", "").split()]
    m_grid = [int(t) for t in experiment.get("m", "").split()] or None
    return ExperimentConfig(
        pairs=_pairs_from_config(parser, experiment),
        n_grid=n_grid,
        m_grid=m_grid,
        replicates=int(experiment.get("replicates", 100)),
        test=test_cfg,
        master_seed=seed,
        oracle_arm=experiment.get("oracle_arm", "false").strip().lower() == "true",
        sparsity=float(experiment.get("sparsity", 1.0)),
        output_path=experiment.get("output", "").strip() or None,
    )


def load_wcompare_config(path):
    """Read an alignment-comparison configuration file (INI format)."""
    parser = configparser.ConfigParser()
    if not parser.read(path):
        raise FileNotFoundError(path)
    experiment = parser["experiment"]
    test = parser["test"] if parser.has_section("test") else {}
    family = experiment.get("family", "custom").strip()
    if family == "custom":
        f = _io.parse_distribution(parser["F"])
        g = _io.parse_distribution(parser["G"])
    else:
        eps = float(experiment.get("epsilon", 0.0))
        row = _pairs_from_config(
            parser, dict(experiment, family=family, sweep=str(eps))
        )[0]
        f, g = row[1], row[2]
    n = int(experiment["n"])
    return {
        "f_dist": f,
        "g_dist": g,
        "n": n,
        "m": int(experiment.get("m", n)),
        "d": int(test.get("d", 2)) if test else 2,
        "spec": _kernel_from_section(test),
        "replicates": int(experiment.get("replicates", 100)),
        "master_seed": int(experiment.get("seed", 0)),
        "surrogate_size": int(experiment.get("surrogate_size", 10**6)),
        "output": experiment.get("output", "").strip() or None,
    }
