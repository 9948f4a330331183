"""File formats: edge lists, full-precision CSV tables, config sections.

Graphs travel as line-oriented edge lists::

    # vertices: 5
    0 1
    0 2

One undirected edge per line, 0-indexed, whitespace separated, listed
once; the header records the vertex count so isolated vertices survive a
round trip. Numeric tables are written with 17 significant digits so that
re-running an experiment reproduces byte-identical files.
"""

import numpy as np

from .errors import EdgeListFormatError
from .model import (
    DegreeCorrected,
    DirichletLatent,
    Graph,
    LogitNormalMixture,
    PointMassMixture,
    UniformBox,
)

__all__ = [
    "read_edge_list",
    "write_edge_list",
    "write_embedding_csv",
    "write_table_csv",
    "write_matrix_csv",
    "read_matrix_csv",
    "read_labels",
    "parse_distribution",
]


def read_edge_list(path):
    """Parse an edge-list file into a :class:`Graph`.

    Duplicate edge lines are accepted idempotently. Self-loops, vertex
    indices outside ``[0, n)``, and malformed lines raise
    :class:`EdgeListFormatError` with the offending line number.
    """
    with open(path, "r", encoding="utf-8") as handle:
        lines = handle.readlines()
    n = None
    header_line = 0
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text:
            continue
        if not text.startswith("#"):
            raise EdgeListFormatError("missing '# vertices: n' header", lineno)
        parts = text[1:].split(":")
        if len(parts) != 2 or parts[0].strip() != "vertices":
            raise EdgeListFormatError(f"bad header {text!r}", lineno)
        try:
            n = int(parts[1])
        except ValueError:
            raise EdgeListFormatError(f"vertex count {parts[1].strip()!r} is not an integer", lineno)
        if n < 0:
            raise EdgeListFormatError(f"vertex count must be >= 0, got {n}", lineno)
        header_line = lineno
        break
    if n is None:
        raise EdgeListFormatError("empty file, expected '# vertices: n' header", 1)

    adjacency = np.zeros((n, n), dtype=np.int8)
    for lineno, raw in enumerate(lines[header_line:], start=header_line + 1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        tokens = text.split()
        if len(tokens) != 2:
            raise EdgeListFormatError(f"expected 'u v', got {text!r}", lineno)
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise EdgeListFormatError(f"non-integer vertex in {text!r}", lineno)
        if u == v:
            raise EdgeListFormatError(f"self-loop '{u} {v}' is not allowed", lineno)
        if not (0 <= u < n and 0 <= v < n):
            raise EdgeListFormatError(f"vertex out of range in {text!r} (n={n})", lineno)
        adjacency[u, v] = 1
        adjacency[v, u] = 1
    return Graph(adjacency)


def write_edge_list(graph, path):
    """Write a graph in the edge-list format read by :func:`read_edge_list`."""
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(f"# vertices: {graph.n}\n")
        for u, v in graph.edges():
            handle.write(f"{u} {v}\n")


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def write_embedding_csv(coordinates, path):
    """One row per vertex, one column per dimension, full precision."""
    coordinates = np.atleast_2d(np.asarray(coordinates, dtype=float))
    with open(path, "w", encoding="utf-8") as handle:
        for row in coordinates:
            handle.write(",".join(f"{v:.17g}" for v in row) + "\n")


def write_table_csv(path, columns, rows, comments=()):
    """Write a CSV table with optional '#' comment lines before the header."""
    with open(path, "w", encoding="utf-8") as handle:
        for comment in comments:
            handle.write(f"# {comment}\n")
        handle.write(",".join(columns) + "\n")
        for row in rows:
            handle.write(",".join(_fmt(v) for v in row) + "\n")


def write_matrix_csv(matrix, path, labels=None):
    """Write a square numeric matrix, optionally tagged with row labels."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    with open(path, "w", encoding="utf-8") as handle:
        if labels is not None:
            handle.write("# labels: " + ",".join(str(l) for l in labels) + "\n")
        for row in matrix:
            handle.write(",".join(f"{v:.17g}" for v in row) + "\n")


def read_matrix_csv(path):
    """Read a matrix written by :func:`write_matrix_csv`.

    Returns
    -------
    (ndarray, list[str] | None)
    """
    labels = None
    rows = []
    with open(path, "r", encoding="utf-8") as handle:
        for raw in handle:
            text = raw.strip()
            if not text:
                continue
            if text.startswith("#"):
                if "labels:" in text:
                    labels = [t.strip() for t in text.split("labels:", 1)[1].split(",")]
                continue
            rows.append([float(t) for t in text.split(",")])
    return np.asarray(rows, dtype=float), labels


def read_labels(path):
    """One label per line; blank lines are skipped."""
    with open(path, "r", encoding="utf-8") as handle:
        return [line.strip() for line in handle if line.strip()]


def _parse_vector(text):
    return np.array([float(t) for t in text.replace(",", " ").split()])


def _parse_matrix(text):
    return np.array([_parse_vector(row) for row in text.split(";")])


def parse_distribution(section):
    """Build a latent distribution from a key-value config section.

    ``section`` is any mapping of strings (for example a ``configparser``
    section). The key ``kind`` selects the variant; vectors are whitespace
    or comma separated, matrix rows are separated by ``;`` and stacked
    matrices by ``|``::

        kind = point_mass_mixture
        atoms = 0.59 0.39 ; 0.59 -0.39
        weights = 0.4 0.6
    """
    kind = section.get("kind", "").strip()
    if kind == "point_mass_mixture":
        return PointMassMixture(_parse_matrix(section["atoms"]), _parse_vector(section["weights"]))
    if kind == "dirichlet":
        return DirichletLatent(_parse_vector(section["concentration"]))
    if kind == "uniform_box":
        return UniformBox(_parse_vector(section["lower"]), _parse_vector(section["upper"]))
    if kind == "logit_normal_mixture":
        covs = np.array([_parse_matrix(block) for block in section["covs"].split("|")])
        scale = float(section["scale"]) if "scale" in section else None
        return LogitNormalMixture(
            _parse_matrix(section["means"]), covs, _parse_vector(section["weights"]), scale=scale
        )
    if kind == "degree_corrected":
        directions = PointMassMixture(
            _parse_matrix(section["atoms"]), _parse_vector(section["weights"])
        )
        return DegreeCorrected(
            directions,
            theta_low=float(section.get("theta_low", 1.0)),
            theta_high=float(section.get("theta_high", 1.0)),
        )
    raise ValueError(f"unknown distribution kind {kind!r}")
