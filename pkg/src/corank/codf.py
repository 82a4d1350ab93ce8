"""Empirical center-outward distribution function, ranks and signs."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from ._validation import check_sample
from .assignment import build_cost, solve_assignment
from .exceptions import ConfigurationError, InvalidInputError
from .grids import Grid, canonical_kind, grid_for_size


@dataclass(frozen=True, eq=False)
class CoDistribution:
    """Optimal matching of a sample onto a grid.

    ``images[i] == ranks[i] / (n_R + 1) * signs[i]``; ``perm[i]`` is the grid
    index assigned to observation ``i``.
    """

    images: np.ndarray
    ranks: np.ndarray
    signs: np.ndarray
    grid: Grid
    perm: np.ndarray
    total_cost: float

    @property
    def n_R(self) -> int:
        return self.grid.n_R


@dataclass(frozen=True, eq=False)
class SymmetrizedCoDistribution:
    """C-o df of the augmented sample ``(X_1..X_n, -X_1..-X_n)``.

    ``raw_cost`` is the cost of the unconstrained 2n-point solve when one was
    run (``method="full"``), else ``None``.
    """

    base: CoDistribution
    pos_indices: np.ndarray
    raw_cost: float | None = None
    canonicalized: bool = False

    @property
    def n(self) -> int:
        return self.pos_indices.size

    @property
    def images(self) -> np.ndarray:
        return self.base.images[self.pos_indices]

    @property
    def ranks(self) -> np.ndarray:
        return self.base.ranks[self.pos_indices]

    @property
    def signs(self) -> np.ndarray:
        return self.base.signs[self.pos_indices]

    @property
    def mirror_images(self) -> np.ndarray:
        return self.base.images[self.pos_indices + self.n]

    @property
    def total_cost(self) -> float:
        return self.base.total_cost


def _from_perm(grid: Grid, perm: np.ndarray, total_cost: float) -> CoDistribution:
    return CoDistribution(
        images=grid.points[perm], ranks=grid.ranks[perm], signs=grid.directions[perm],
        grid=grid, perm=perm, total_cost=total_cost,
    )


def _warn_duplicates(X: np.ndarray) -> None:
    if np.unique(X, axis=0).shape[0] < X.shape[0]:
        warnings.warn("sample contains duplicate points; ties are broken by the solver",
                      RuntimeWarning, stacklevel=3)


def fit_codf(sample, grid: Grid, method: str = "scipy") -> CoDistribution:
    """Map ``sample`` one-to-one onto ``grid`` minimizing total squared distance."""
    X = check_sample(sample)
    if X.shape != grid.points.shape:
        raise InvalidInputError(f"sample shape {X.shape} does not match grid shape {grid.points.shape}")
    _warn_duplicates(X)
    asg = solve_assignment(build_cost(X, grid), method=method)
    return _from_perm(grid, asg.perm, asg.total_cost)


def _pair_representatives(grid: Grid) -> np.ndarray:
    idx = np.arange(grid.n)
    return idx[idx <= grid.antipode]


def _paired_perm(X: np.ndarray, grid: Grid, method: str) -> np.ndarray:
    # Antisymmetric maps send the pair {X_i, -X_i} onto an antipodal pair
    # {g, -g}; its cost 2 min(|X_i - g|^2, |X_i + g|^2) only depends on the
    # orientation, so the restricted problem is an n x n assignment. Its LP
    # relaxation coincides with that of the full 2n problem, so the optimum
    # is also optimal for the unrestricted transport.
    n = X.shape[0]
    reps = _pair_representatives(grid)
    if reps.size != n or np.any(reps == grid.antipode[reps]):
        raise ConfigurationError("symmetric grid must split into n antipodal pairs")
    G = grid.points[reps]
    plus = cdist(X, G, "sqeuclidean")
    minus = cdist(X, -G, "sqeuclidean")
    asg = solve_assignment(2.0 * np.minimum(plus, minus), method=method)
    rows = np.arange(n)
    chosen = reps[asg.perm]
    flip = minus[rows, asg.perm] < plus[rows, asg.perm]
    pos = np.where(flip, grid.antipode[chosen], chosen)
    return np.concatenate([pos, grid.antipode[pos]])


def _is_antisymmetric(perm: np.ndarray, grid: Grid, n: int) -> bool:
    return bool(np.array_equal(perm[n:], grid.antipode[perm[:n]]))


def fit_symmetrized(sample, grid: Grid, method: str = "paired", solver: str = "scipy") -> SymmetrizedCoDistribution:
    """Center-outward df of the symmetrized sample.

    Parameters
    ----------
    sample : array_like, shape (n, d)
    grid : Grid
        Symmetric grid with ``2 n`` points.
    method : {"paired", "full"}
        ``"full"`` solves the 2n x 2n problem and keeps the solution when it
        already satisfies ``image(-X_i) == -image(X_i)``; otherwise (a tie
        broken the wrong way) it is replaced by the paired optimum.
        ``"paired"`` solves the equivalent n x n problem directly.

    Returns
    -------
    SymmetrizedCoDistribution
        Always antisymmetric: ``mirror_images == -images`` exactly.
    """
    X = check_sample(sample)
    n, d = X.shape
    if not grid.symmetric or grid.antipode is None:
        raise ConfigurationError("the symmetrized c-o df needs a symmetric grid")
    if grid.points.shape != (2 * n, d):
        raise InvalidInputError(f"grid must have {2 * n} points in dimension {d}, got {grid.points.shape}")
    _warn_duplicates(X)
    Xa = np.vstack([X, -X])
    raw_cost = None
    canonicalized = False
    if method == "full":
        asg = solve_assignment(build_cost(Xa, grid), method=solver)
        perm, raw_cost = asg.perm, asg.total_cost
        if not _is_antisymmetric(perm, grid, n):
            perm = _paired_perm(X, grid, solver)
            canonicalized = True
    elif method == "paired":
        perm = _paired_perm(X, grid, solver)
    else:
        raise ConfigurationError(f"unknown symmetrization method {method!r}")
    cost = float(((Xa - grid.points[perm]) ** 2).sum())
    base = _from_perm(grid, perm, cost)
    return SymmetrizedCoDistribution(base, np.arange(n), raw_cost=raw_cost, canonicalized=canonicalized)


def co_median(sample, n_R: int, rng=None, kind: str = "H") -> np.ndarray:
    """Sample point sent to the origin by the c-o df.

    The grid carries one origin copy plus whatever the divisibility of
    ``n - 1`` by ``n_R`` adds; the first origin's preimage is returned. With
    extra origin copies the choice among their preimages is a solver tie.
    Centrally symmetric direction sets (``REGULAR2D`` with an even count, or
    ``H`` for ``d = 1``) make the estimate equivariant under ``x -> -x``.
    """
    X = check_sample(sample, min_samples=2)
    grid = grid_for_size(canonical_kind(kind), X.shape[0], X.shape[1], n_R, n_0=1, rng=rng)
    codf = fit_codf(X, grid)
    origin = np.flatnonzero(grid.ranks == 0)[0]
    return X[np.flatnonzero(codf.perm == origin)[0]].copy()
