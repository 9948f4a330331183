"""Adjacency spectral embedding and alignment diagnostics.

The spectral embedding of a symmetric matrix ``M`` into ``R^d`` keeps the
``d`` eigenpairs of largest absolute eigenvalue and returns
``U |S|^(1/2)``, one row per vertex. Because eigenvectors are determined
only up to sign, a fixed sign convention is applied so that independent
runs (and independently embedded graphs) produce commensurate coordinates.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Embedding",
    "AlignmentResult",
    "fix_signs",
    "ase",
    "procrustes_align",
    "two_to_infinity",
    "second_moment_rotation",
]

_SIGN_TOL = 1e-12


@dataclass(eq=False)
class Embedding:
    """Estimated latent positions with the retained spectrum.

    ``coordinates`` is ``n x d``; ``eigenvalues`` holds the corresponding
    absolute eigenvalues in descending order; ``flips`` records the per
    column sign applied by the convention.
    """

    coordinates: np.ndarray
    eigenvalues: np.ndarray
    flips: np.ndarray

    @property
    def n(self):
        return self.coordinates.shape[0]

    @property
    def d(self):
        return self.coordinates.shape[1]


@dataclass(eq=False)
class AlignmentResult:
    """Orthogonal alignment of one point configuration onto another."""

    rotation: np.ndarray
    frobenius_error: float
    two_to_infinity_error: float


def _sign_flips(u, tol=_SIGN_TOL):
    """Per-column signs making each column's entry sum positive.

    Columns whose entry sum is within ``tol`` of zero fall back to making
    the first entry of largest magnitude positive. Zero columns are left
    untouched.
    """
    u = np.atleast_2d(np.asarray(u, dtype=float))
    flips = np.ones(u.shape[1])
    sums = u.sum(axis=0)
    for k in range(u.shape[1]):
        if abs(sums[k]) > tol:
            flips[k] = 1.0 if sums[k] > 0 else -1.0
        else:
            lead = u[np.argmax(np.abs(u[:, k])), k]
            if lead < 0:
                flips[k] = -1.0
    return flips


def fix_signs(u):
    """Return ``u`` with each column's sign fixed deterministically.

    Idempotent, and invariant to pre-multiplying any column by -1.
    """
    u = np.atleast_2d(np.asarray(u, dtype=float))
    return u * _sign_flips(u)


def ase(m, d):
    """Spectral embedding of a symmetric matrix into ``R^d``.

    Computes the full symmetric eigendecomposition of ``m``, keeps the
    ``d`` eigenpairs of largest absolute eigenvalue (ties prefer the
    positive eigenvalue, then the lower index in descending eigenvalue
    order), and returns ``U |S|^(1/2)`` with sign-fixed eigenvectors.
    Accepts any symmetric real matrix, so a noiseless edge-probability
    matrix can be embedded as an oracle alongside sampled adjacencies.

    Parameters
    ----------
    m : (n, n) array_like
        Symmetric matrix; asymmetry beyond 1e-12 raises.
    d : int
        Embedding dimension, ``1 <= d <= n``.

    Returns
    -------
    Embedding
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got shape {m.shape}")
    n = m.shape[0]
    asym = float(np.max(np.abs(m - m.T))) if n else 0.0
    if asym > 1e-12:
        raise ValueError(f"matrix is not symmetric (max |M - M^T| = {asym:.3g})")
    if not 1 <= d <= n:
        raise ValueError(f"need 1 <= d <= n, got d={d}, n={n}")
    vals, vecs = np.linalg.eigh(m)
    vals, vecs = vals[::-1], vecs[:, ::-1]
    order = np.lexsort((np.arange(n), -np.sign(vals), -np.abs(vals)))
    top = order[:d]
    lam = vals[top]
    u = vecs[:, top]
    flips = _sign_flips(u)
    coords = (u * flips) * np.sqrt(np.abs(lam))
    return Embedding(coords, np.abs(lam), flips)


def procrustes_align(xhat, x):
    """Best orthogonal map of ``xhat`` onto ``x``.

    Solves ``min_W ||xhat W - x||_F`` over orthogonal ``W`` (reflections
    allowed) via the singular value decomposition of ``xhat^T x``, and
    reports the residual in Frobenius and maximum-row-norm form. Requires a
    known row correspondence, so this is a simulation diagnostic.
    """
    xhat = np.atleast_2d(np.asarray(xhat, dtype=float))
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if xhat.shape != x.shape:
        raise ValueError(f"shape mismatch: {xhat.shape} vs {x.shape}")
    u, _, vt = np.linalg.svd(xhat.T @ x)
    w = u @ vt
    resid = xhat @ w - x
    return AlignmentResult(
        rotation=w,
        frobenius_error=float(np.linalg.norm(resid)),
        two_to_infinity_error=two_to_infinity(resid),
    )


def two_to_infinity(m):
    """Maximum Euclidean row norm of a matrix."""
    m = np.atleast_2d(np.asarray(m, dtype=float))
    if m.size == 0:
        return 0.0
    return float(np.sqrt((m * m).sum(axis=1).max()))


def second_moment_rotation(x):
    """Sign-fixed eigenvector matrix of ``X^T X`` (descending eigenvalues).

    For two graphs with latent positions ``X`` and ``Y``, the product
    ``second_moment_rotation(Y) @ second_moment_rotation(X).T`` is the
    orthogonal matrix that makes the true-position statistic comparable to
    the one computed from the two spectral embeddings.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    n, d = x.shape
    if n < d:
        raise ValueError(f"need n >= d, got n={n}, d={d}")
    vals, vecs = np.linalg.eigh(x.T @ x)
    vecs = vecs[:, ::-1]
    return fix_signs(vecs)
