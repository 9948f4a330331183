"""Shared test helpers: brute-force oracles and random geometry."""

import numpy as np
from scipy.stats import ortho_group

from rdpgtest.mmd import kernel_eval


def loop_u(spec, x, y):
    """Triple-loop unbiased statistic, independent of the vectorized path."""
    n, m = len(x), len(y)
    sxx = sum(kernel_eval(spec, x[i], x[j]) for i in range(n) for j in range(n) if i != j)
    sxy = sum(kernel_eval(spec, x[i], y[k]) for i in range(n) for k in range(m))
    syy = sum(kernel_eval(spec, y[k], y[l]) for k in range(m) for l in range(m) if k != l)
    return sxx / (n * (n - 1)) - 2.0 * sxy / (n * m) + syy / (m * (m - 1))


def loop_v(spec, x, y):
    """Triple-loop plug-in statistic."""
    n, m = len(x), len(y)
    sxx = sum(kernel_eval(spec, x[i], x[j]) for i in range(n) for j in range(n))
    sxy = sum(kernel_eval(spec, x[i], y[k]) for i in range(n) for k in range(m))
    syy = sum(kernel_eval(spec, y[k], y[l]) for k in range(m) for l in range(m))
    return sxx / n**2 - 2.0 * sxy / (n * m) + syy / m**2


def random_orthogonal(d, rng):
    if d == 1:
        return np.array([[1.0 if rng.random() < 0.5 else -1.0]])
    return ortho_group.rvs(d, random_state=rng)


def random_cloud(n, d, rng, scale=None):
    """Points in the nonnegative orthant with pairwise inner products in [0, 1]."""
    if scale is None:
        scale = 1.0 / np.sqrt(d)
    return scale * rng.random((n, d))
