"""Linear sum assignment: the transport step behind the empirical c-o df."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from .exceptions import ConfigurationError, InvalidInputError

BRUTE_FORCE_MAX_N = 10


@dataclass(frozen=True, eq=False)
class Assignment:
    """Row ``i`` is matched to column ``perm[i]``."""

    perm: np.ndarray
    total_cost: float


def _check_cost(cost) -> np.ndarray:
    c = np.asarray(cost, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise InvalidInputError(f"cost matrix must be square, got shape {c.shape}")
    if c.shape[0] == 0:
        raise InvalidInputError("cost matrix is empty")
    if not np.all(np.isfinite(c)):
        raise InvalidInputError("cost matrix has non-finite entries")
    if np.any(c < 0):
        raise InvalidInputError("cost matrix has negative entries")
    return c


def _total(c: np.ndarray, perm: np.ndarray) -> float:
    return float(c[np.arange(c.shape[0]), perm].sum())


def _shortest_augmenting_path(c: np.ndarray) -> np.ndarray:
    """O(n^3) primal-dual solver; one Dijkstra-like augmentation per row.

    Column ``0`` of the work arrays is a virtual source. Ties go to the lowest
    column index (``argmin`` returns the first minimum).
    """
    n = c.shape[0]
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    match = np.zeros(n + 1, dtype=np.int64)  # match[j] = 1-based row on column j
    way = np.zeros(n + 1, dtype=np.int64)
    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = match[j0]
            free = ~used[1:]
            reduced = c[i0 - 1] - u[i0] - v[1:]
            better = free & (reduced < minv[1:])
            minv[1:][better] = reduced[better]
            way[1:][better] = j0
            masked = np.where(free, minv[1:], np.inf)
            j1 = int(np.argmin(masked)) + 1
            delta = masked[j1 - 1]
            u[match[used]] += delta
            v[used] -= delta
            minv[~used] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1
    perm = np.empty(n, dtype=np.int64)
    perm[match[1:] - 1] = np.arange(n)
    return perm


def solve_assignment(cost, method: str = "scipy") -> Assignment:
    """Minimum-cost perfect matching of rows to columns.

    Parameters
    ----------
    cost : array_like, shape (n, n)
        Finite, non-negative costs.
    method : {"scipy", "sap"}
        ``"scipy"`` calls :func:`scipy.optimize.linear_sum_assignment` (a
        Jonker-Volgenant variant, compiled); ``"sap"`` runs the pure numpy
        shortest augmenting path solver in this module.

    Returns
    -------
    Assignment
    """
    c = _check_cost(cost)
    if method == "scipy":
        _, perm = linear_sum_assignment(c)
        perm = perm.astype(np.int64)
    elif method == "sap":
        perm = _shortest_augmenting_path(c)
    else:
        raise ConfigurationError(f"unknown assignment method {method!r}")
    return Assignment(perm=perm, total_cost=_total(c, perm))


def brute_force_assignment(cost) -> Assignment:
    """Exhaustive search over all permutations; the reference oracle."""
    c = _check_cost(cost)
    n = c.shape[0]
    if n > BRUTE_FORCE_MAX_N:
        raise InvalidInputError(f"brute force is limited to n <= {BRUTE_FORCE_MAX_N}, got {n}")
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    totals = c[np.arange(n), perms].sum(axis=1)
    best_perm = perms[int(np.argmin(totals))]
    return Assignment(perm=best_perm, total_cost=_total(c, best_perm))


def build_cost(sample, grid) -> np.ndarray:
    """Squared Euclidean distances between sample points and grid points.

    ``grid`` may be a :class:`~corank.grids.Grid` or a plain (n, d) array.
    """
    X = np.asarray(sample, dtype=float)
    G = np.asarray(getattr(grid, "points", grid), dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if G.ndim == 1:
        G = G[:, None]
    if X.shape != G.shape:
        raise InvalidInputError(f"sample shape {X.shape} does not match grid shape {G.shape}")
    return cdist(X, G, metric="sqeuclidean")
