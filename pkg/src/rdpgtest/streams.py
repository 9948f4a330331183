"""Seeded random-number streams for reproducible, parallelizable simulation.

A master seed plus an integer path (for example ``(grid_index,
replicate_index)``) identifies a statistically independent generator.
Work units keyed by distinct paths can therefore run in any order, or in
parallel, and still produce bit-identical results.
"""

import numpy as np

__all__ = ["substream"]


def substream(seed, *path):
    """Return an independent ``numpy.random.Generator`` for ``(seed, *path)``.

    Parameters
    ----------
    seed : int
        Master seed of the experiment or test.
    *path : int
        Optional indices identifying the work unit (grid cell, replicate,
        stage). Distinct paths give independent streams.
    """
    entropy = (int(seed),) + tuple(int(p) for p in path)
    return np.random.default_rng(np.random.SeedSequence(entropy))
