"""Orthonormal maps onto the zero-sum hyperplane.

``build_planemap(n)`` returns an ``n x (n-1)`` matrix whose columns form an
orthonormal basis of ``{x in R^n : sum(x) = 0}``.  The basis is built by the
recursive halving construction (block-diagonal copies of the half-size map for
even ``n``, a bordered copy of ``U_{n-1}`` for odd ``n``), which keeps the
maximum absolute row sum below ``sqrt(2) / (sqrt(2) - 1)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

#: Upper bound on the infinity-operator norm of every plane map.
PEAK_FACTOR_BOUND = np.sqrt(2.0) / (np.sqrt(2.0) - 1.0)


@dataclass(frozen=True, eq=False)
class PlaneMap:
    """Column-orthonormal map ``R^(n-1) -> R^n`` with zero column sums.

    Attributes
    ----------
    n : int
        Output dimension.
    matrix : ndarray, shape (n, n-1)
        Columns are the basis vectors, read-only.
    """

    n: int
    matrix: np.ndarray

    @property
    def columns(self) -> list[np.ndarray]:
        return [self.matrix[:, i] for i in range(self.n - 1)]

    def forward(self, x):
        return forward(self, x)

    def adjoint(self, y):
        return adjoint(self, y)


def _recursive_matrix(n: int) -> np.ndarray:
    if n == 1:
        return np.zeros((1, 0))
    if n == 2:
        return np.array([[2.0 ** -0.5], [-(2.0 ** -0.5)]])
    U = np.zeros((n, n - 1))
    if n % 2 == 0:
        h = n // 2
        half = _recursive_matrix(h)
        U[:h, : h - 1] = half
        U[h:, h - 1 : n - 2] = half
        U[:h, n - 2] = 1.0 / np.sqrt(n)
        U[h:, n - 2] = -1.0 / np.sqrt(n)
    else:
        U[: n - 1, : n - 2] = _recursive_matrix(n - 1)
        U[: n - 1, n - 2] = 1.0 / np.sqrt(n * n - n)
        U[n - 1, n - 2] = -np.sqrt((n - 1) / n)
    return U


@lru_cache(maxsize=None)
def build_planemap(n: int) -> PlaneMap:
    """Build (and cache) the plane map ``U_n``.

    ``n = 1`` gives the degenerate map from the empty space onto ``{0}``.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"plane map dimension must be >= 1, got {n}")
    matrix = _recursive_matrix(n)
    matrix.setflags(write=False)
    return PlaneMap(n=n, matrix=matrix)


def forward(U: PlaneMap, x) -> np.ndarray:
    """Apply ``U_n``.  ``x`` may carry leading batch axes; the last axis has length n-1."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (U.n - 1,):
        raise ValueError(f"expected trailing dimension {U.n - 1}, got shape {x.shape}")
    return x @ U.matrix.T


def adjoint(U: PlaneMap, y) -> np.ndarray:
    """Apply the transpose ``U_n^T`` along the last axis of ``y``."""
    y = np.asarray(y, dtype=float)
    if y.shape[-1:] != (U.n,):
        raise ValueError(f"expected trailing dimension {U.n}, got shape {y.shape}")
    return y @ U.matrix


def max_row_abs_sum(U: PlaneMap) -> float:
    """Infinity-operator norm of ``U_n``: the largest absolute row sum."""
    if U.n == 1:
        return 0.0
    return float(np.abs(U.matrix).sum(axis=1).max())


def induction_bound(n: int) -> float:
    """Row-sum bound ``sum_{i<=k} 2^(-i/2) + k'/2^k`` where ``n = 2^k + k'``."""
    if n < 2:
        return 0.0
    k = int(n).bit_length() - 1
    k_rem = n - 2**k
    return float(sum(2.0 ** (-i / 2) for i in range(1, k + 1)) + k_rem / 2.0**k)


def invariant_report(U: PlaneMap) -> dict[str, float]:
    """Numerical residuals of the defining properties of ``U``."""
    M = U.matrix
    if U.n == 1:
        return {"orthogonality_residual": 0.0, "max_column_sum": 0.0, "inf_norm": 0.0}
    gram = M.T @ M
    return {
        "orthogonality_residual": float(np.abs(gram - np.eye(U.n - 1)).max()),
        "max_column_sum": float(np.abs(M.sum(axis=0)).max()),
        "inf_norm": max_row_abs_sum(U),
    }
