"""Transportation grids in the closed unit ball.

A factorized grid places ``n_S`` unit directions on each of ``n_R`` spheres
with radii ``i / (n_R + 1)`` and may append ``n_0`` copies of the origin.
Symmetric grids (kinds ``R2*`` and ``H*``) are closed under negation and carry
an ``antipode`` index so that ``points[antipode[j]] == -points[j]`` exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .exceptions import ConfigurationError, InvalidInputError
from .statdist import as_generator

PRIMES = (
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
    73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151,
    157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229,
)

FACTORIZED_KINDS = ("R1", "H", "REGULAR2D")
RANDOM_KINDS = ("R2",)
SYMMETRIC_KINDS = ("R2*", "H*")
ALL_KINDS = FACTORIZED_KINDS + RANDOM_KINDS + SYMMETRIC_KINDS + ("CUSTOM",)

_ALIASES = {
    "r1": "R1", "r2": "R2", "h": "H", "r2s": "R2*", "hs": "H*", "r2*": "R2*", "h*": "H*",
    "regular2d": "REGULAR2D", "regular": "REGULAR2D", "custom": "CUSTOM",
}


def canonical_kind(kind: str) -> str:
    """Map CLI spellings (``r2s``, ``hs``, ...) onto grid kind names."""
    k = _ALIASES.get(str(kind).lower(), str(kind).upper())
    if k not in ALL_KINDS:
        raise ConfigurationError(f"unknown grid kind {kind!r}")
    return k


@dataclass(frozen=True, eq=False)
class Grid:
    """Finite target set for the transport.

    Attributes
    ----------
    points : ndarray, shape (n, d)
    ranks : ndarray, shape (n,)
        ``(n_R + 1) * ||g||``; integers for factorized kinds, 0 at the origin.
    directions : ndarray, shape (n, d)
        Unit vectors, or zero rows at the origin.
    antipode : ndarray or None
        Index of ``-g`` for symmetric grids.
    """

    points: np.ndarray
    ranks: np.ndarray
    directions: np.ndarray
    n_R: int
    n_S: int
    n_0: int
    kind: str
    symmetric: bool = False
    antipode: np.ndarray | None = None
    note: str = ""

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def radii(self) -> np.ndarray:
        return self.ranks / (self.n_R + 1)

    @classmethod
    def from_points(cls, points, n_R: int, *, symmetric: bool | None = None) -> "Grid":
        """Wrap arbitrary points; ranks and signs are read off the norms."""
        P = np.asarray(points, dtype=float)
        if P.ndim == 1:
            P = P[:, None]
        if P.ndim != 2 or P.shape[0] == 0:
            raise InvalidInputError("grid points must be a non-empty (n, d) array")
        norms = np.linalg.norm(P, axis=1)
        if np.any(norms > 1.0 + 1e-12):
            raise InvalidInputError("grid points must lie in the closed unit ball")
        nz = norms > 0
        directions = np.zeros_like(P)
        directions[nz] = P[nz] / norms[nz, None]
        antipode = _find_antipodes(P)
        if symmetric and antipode is None:
            raise InvalidInputError("points are not closed under negation")
        is_sym = antipode is not None if symmetric is None else bool(symmetric)
        return cls(
            points=P, ranks=(n_R + 1) * norms, directions=directions, n_R=int(n_R),
            n_S=0, n_0=int((~nz).sum()), kind="CUSTOM", symmetric=is_sym,
            antipode=antipode if is_sym else None,
        )


def _find_antipodes(P: np.ndarray) -> np.ndarray | None:
    order = np.lexsort(P.T[::-1])
    neg_order = np.lexsort((-P).T[::-1])
    if not np.array_equal(P[order], -P[neg_order]):
        return None
    antipode = np.empty(P.shape[0], dtype=np.int64)
    antipode[neg_order] = order
    # Origins are matched among themselves; keep the involution consistent.
    origins = np.flatnonzero(~P.any(axis=1))
    antipode[origins] = _pair_up(origins)
    return antipode


def _pair_up(idx: np.ndarray) -> np.ndarray:
    out = idx.copy()
    for a in range(0, len(idx) - 1, 2):
        out[a], out[a + 1] = idx[a + 1], idx[a]
    return out


# ---------------------------------------------------------------------------
# quasi-random directions

def halton(count: int, dim: int) -> np.ndarray:
    """First ``count`` Halton points in ``[0, 1)^dim``, starting at index 1.

    Coordinate ``j`` of point ``k`` is the radical inverse of ``k`` in the
    ``j``-th prime base.
    """
    if count < 1 or dim < 1:
        raise InvalidInputError(f"halton needs count >= 1 and dim >= 1, got {count}, {dim}")
    if dim > len(PRIMES):
        raise ConfigurationError(f"halton supports at most {len(PRIMES)} dimensions")
    out = np.zeros((count, dim))
    idx = np.arange(1, count + 1, dtype=np.int64)
    for j in range(dim):
        base = PRIMES[j]
        k = idx.copy()
        f = 1.0 / base
        while np.any(k):
            out[:, j] += f * (k % base)
            k //= base
            f /= base
    return out


def _polar_angle_cos_sin(u: np.ndarray, power: int) -> tuple[np.ndarray, np.ndarray]:
    # Angle on [0, pi] with density proportional to sin(theta)**power;
    # (1 - cos theta) / 2 is Beta((power + 1)/2, (power + 1)/2).
    a = (power + 1) / 2.0
    b = special.betaincinv(a, a, u)
    return 1.0 - 2.0 * b, 2.0 * np.sqrt(b * (1.0 - b))


def sphere_from_unit_cube(u, *, half: bool = False) -> np.ndarray:
    """Map points of ``[0, 1)^(d-1)`` to the unit sphere in ``R^d``.

    Spherical coordinates with inverse-CDF angles: the first coordinate drives
    the azimuth ``2 pi u`` and the remaining ones the polar angles, so uniform
    input gives uniform output. With ``half=True`` the azimuth spans ``[0, pi]``
    and the last output coordinate is non-negative.

    A single point (1-d input) returns a single vector.
    """
    U = np.asarray(u, dtype=float)
    single = U.ndim == 1
    U = np.atleast_2d(U)
    if np.any((U < 0) | (U >= 1)):
        raise InvalidInputError("unit-cube coordinates must lie in [0, 1)")
    m, k = U.shape
    d = k + 1
    phi = (math.pi if half else 2.0 * math.pi) * U[:, 0]
    out = np.empty((m, d))
    sin_prod = np.ones(m)
    for t in range(1, d - 1):
        c, s = _polar_angle_cos_sin(U[:, t], d - 1 - t)
        out[:, t - 1] = sin_prod * c
        sin_prod = sin_prod * s
    out[:, d - 2] = sin_prod * np.cos(phi)
    out[:, d - 1] = sin_prod * np.sin(phi)
    return out[0] if single else out


def _random_directions(count: int, d: int, gen: np.random.Generator) -> np.ndarray:
    z = gen.standard_normal((count, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def _halton_directions(count: int, d: int, *, half: bool = False) -> np.ndarray:
    if d == 1:
        return np.ones((count, 1)) if half else np.where(np.arange(count) % 2 == 0, 1.0, -1.0)[:, None]
    return sphere_from_unit_cube(halton(count, d - 1), half=half)


def _regular2d_directions(count: int) -> np.ndarray:
    ang = 2.0 * math.pi * np.arange(count) / count
    return np.column_stack([np.cos(ang), np.sin(ang)])


def _assemble(dirs_per_radius: list[np.ndarray], n_R: int, n_0: int, d: int):
    ranks = np.concatenate([np.full(len(D), i, dtype=float) for i, D in enumerate(dirs_per_radius, 1)])
    directions = np.vstack(dirs_per_radius) if dirs_per_radius else np.empty((0, d))
    if n_0:
        ranks = np.concatenate([ranks, np.zeros(n_0)])
        directions = np.vstack([directions, np.zeros((n_0, d))])
    points = (ranks / (n_R + 1))[:, None] * directions
    return points, ranks, directions


def _check_params(d: int, n_R: int, n_S: int, n_0: int) -> None:
    if d < 1 or n_R < 1 or n_S < 0 or n_0 < 0:
        raise ConfigurationError(f"invalid grid parameters d={d}, n_R={n_R}, n_S={n_S}, n_0={n_0}")
    if n_R * n_S + n_0 == 0:
        raise ConfigurationError("grid would be empty")


def make_grid(kind: str, d: int, n_R: int, n_S: int, n_0: int = 0, rng=None) -> Grid:
    """Build a non-symmetric grid of ``n_0 + n_R * n_S`` points.

    ``R1`` shares one random direction set across radii, ``R2`` draws a fresh
    set per radius, ``H`` uses Halton directions and ``REGULAR2D`` equispaced
    angles (``d == 2`` only).
    """
    kind = canonical_kind(kind)
    _check_params(d, n_R, n_S, n_0)
    if kind in SYMMETRIC_KINDS:
        raise ConfigurationError(f"{kind} is symmetric; use make_symmetric_grid")
    if kind == "REGULAR2D" and d != 2:
        raise ConfigurationError("REGULAR2D grids exist only for d = 2")
    if kind == "CUSTOM":
        raise ConfigurationError("CUSTOM grids come from Grid.from_points")
    if kind == "R1":
        shared = _random_directions(n_S, d, as_generator(rng))
        dirs = [shared] * n_R
    elif kind == "R2":
        gen = as_generator(rng)
        dirs = [_random_directions(n_S, d, gen) for _ in range(n_R)]
    elif kind == "H":
        dirs = [_halton_directions(n_S, d)] * n_R
    else:
        dirs = [_regular2d_directions(n_S)] * n_R
    points, ranks, directions = _assemble(dirs, n_R, n_0, d)
    return Grid(points, ranks, directions, n_R, n_S, n_0, kind, symmetric=False)


def make_symmetric_grid(kind: str, d: int, n_R: int, n_S_half: int, rng=None, n_0: int = 0) -> Grid:
    """Grid closed under negation with ``2 * n_R * n_S_half + n_0`` points.

    ``R2*`` is the union of an ``R2`` grid and its negation; ``H*`` takes
    Halton directions on the half-sphere with non-negative last coordinate and
    adds their negations. The negated half is stored after the first half,
    followed by the origin copies.
    """
    kind = canonical_kind(kind)
    _check_params(d, n_R, n_S_half, n_0)
    if kind not in SYMMETRIC_KINDS:
        raise ConfigurationError(f"{kind} is not a symmetric grid kind")
    if kind == "R2*":
        gen = as_generator(rng)
        dirs = [_random_directions(n_S_half, d, gen) for _ in range(n_R)]
    else:
        dirs = [_halton_directions(n_S_half, d, half=True)] * n_R
    half_pts, half_ranks, half_dirs = _assemble(dirs, n_R, 0, d)
    m = half_pts.shape[0]
    points = np.vstack([half_pts, -half_pts, np.zeros((n_0, d))])
    ranks = np.concatenate([half_ranks, half_ranks, np.zeros(n_0)])
    directions = np.vstack([half_dirs, -half_dirs, np.zeros((n_0, d))])
    antipode = np.concatenate([np.arange(m, 2 * m), np.arange(m), _pair_up(np.arange(2 * m, 2 * m + n_0))])
    return Grid(points, ranks, directions, n_R, 2 * n_S_half, n_0, kind, symmetric=True, antipode=antipode)


def grid_for_size(kind: str, n: int, d: int, n_R: int, n_0: int = 0, rng=None) -> Grid:
    """Grid with exactly ``n`` points.

    When ``n - n_0`` is not a multiple of the sphere count, the remainder is
    absorbed by extra origin copies; the adjustment is recorded in ``note``.
    Symmetric kinds put ``n_R`` spheres on each half.
    """
    kind = canonical_kind(kind)
    if n < 1 or n_0 < 0 or n_0 > n:
        raise ConfigurationError(f"cannot build a grid of {n} points with n_0={n_0}")
    if kind in SYMMETRIC_KINDS:
        n_S_half, rem = divmod(n - n_0, 2 * n_R)
        if n_S_half == 0:
            raise ConfigurationError(f"{n} points cannot fill {n_R} symmetric spheres")
        grid = make_symmetric_grid(kind, d, n_R, n_S_half, rng=rng, n_0=n_0 + rem)
    else:
        n_S, rem = divmod(n - n_0, n_R)
        if n_S == 0:
            raise ConfigurationError(f"{n} points cannot fill {n_R} spheres")
        grid = make_grid(kind, d, n_R, n_S, n_0 + rem, rng=rng)
    if rem:
        grid = _with_note(grid, f"n_0 raised by {rem} to reach {n} points")
    return grid


def _with_note(grid: Grid, note: str) -> Grid:
    fields = dict(grid.__dict__)
    fields["note"] = note
    return Grid(**fields)


def score_sum(grid: Grid, score) -> np.ndarray:
    """Sum of ``J(||g||) g / ||g||`` over the grid; the origin contributes zero.

    On symmetric grids the contributions are added in antipodal pairs, which
    makes the result exactly zero.
    """
    J = getattr(score, "evaluate", score)
    contrib = np.asarray(J(grid.radii), dtype=float)[:, None] * grid.directions
    contrib[grid.ranks == 0] = 0.0
    if grid.symmetric and grid.antipode is not None:
        return (contrib + contrib[grid.antipode]).sum(axis=0) / 2.0
    return contrib.sum(axis=0)
