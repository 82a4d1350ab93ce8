"""Reference distributions, samplers and the seeded RNG contract.

Every sampler takes either a :class:`numpy.random.Generator` or an
:class:`RngState`; an ``RngState`` addresses an independent stream by
``(seed, stream)`` so that replication ``r`` of a simulation always sees the
same draws no matter which worker runs it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from .exceptions import InvalidInputError

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngState:
    """Address of a reproducible random stream."""

    seed: int
    stream: int = 0

    def generator(self, *subkeys: int) -> np.random.Generator:
        """Fresh generator for this stream, optionally keyed further by ``subkeys``."""
        key = (self.stream & _MASK64,) + tuple(int(k) & _MASK64 for k in subkeys)
        ss = np.random.SeedSequence(self.seed & _MASK64, spawn_key=key)
        return np.random.Generator(np.random.PCG64(ss))

    def substream(self, *subkeys: int) -> "RngState":
        # Collapse the key path into a single 64-bit stream id.
        ss = np.random.SeedSequence(self.stream & _MASK64, spawn_key=tuple(int(k) & _MASK64 for k in subkeys))
        return RngState(self.seed, int(ss.generate_state(1, np.uint64)[0]))


def as_generator(random_state=None) -> np.random.Generator:
    """Coerce ``None``/int/``RngState``/``Generator`` into a ``Generator``."""
    if isinstance(random_state, np.random.Generator):
        return random_state
    if isinstance(random_state, RngState):
        return random_state.generator()
    if random_state is None or isinstance(random_state, (int, np.integer)):
        return np.random.default_rng(random_state)
    raise InvalidInputError(f"cannot build a random generator from {random_state!r}")


# ---------------------------------------------------------------------------
# distribution functions

def _check_df(df) -> None:
    if not df > 0:
        raise InvalidInputError(f"degrees of freedom must be positive, got {df}")


def chisq_cdf(x, df):
    """Lower tail of chi-square, ``P(df/2, x/2)``."""
    _check_df(df)
    x = np.maximum(np.asarray(x, dtype=float), 0.0)
    out = special.gammainc(df / 2.0, x / 2.0)
    return float(out) if out.ndim == 0 else out


def chisq_sf(x, df):
    """Upper tail of chi-square; accurate where the cdf rounds to one."""
    _check_df(df)
    x = np.maximum(np.asarray(x, dtype=float), 0.0)
    out = special.gammaincc(df / 2.0, x / 2.0)
    return float(out) if out.ndim == 0 else out


def chisq_quantile(p, df):
    _check_df(df)
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0) | (p >= 1)):
        raise InvalidInputError("chi-square quantile needs p in (0, 1)")
    out = 2.0 * special.gammaincinv(df / 2.0, p)
    return float(out) if out.ndim == 0 else out


def chisq_isf(q, df):
    """Inverse of :func:`chisq_sf`; keeps full precision deep in the upper tail."""
    _check_df(df)
    q = np.asarray(q, dtype=float)
    if np.any((q <= 0) | (q >= 1)):
        raise InvalidInputError("chi-square upper quantile needs q in (0, 1)")
    out = 2.0 * special.gammainccinv(df / 2.0, q)
    return float(out) if out.ndim == 0 else out


def chisq_pdf(x, df):
    _check_df(df)
    out = stats.chi2.pdf(np.asarray(x, dtype=float), df)
    return float(out) if out.ndim == 0 else out


def f_cdf(x, df1, df2):
    """CDF of Snedecor's F via the regularized incomplete beta function."""
    _check_df(df1)
    _check_df(df2)
    x = np.maximum(np.asarray(x, dtype=float), 0.0)
    out = special.fdtr(df1, df2, x)
    return float(out) if out.ndim == 0 else out


def f_sf(x, df1, df2):
    _check_df(df1)
    _check_df(df2)
    x = np.maximum(np.asarray(x, dtype=float), 0.0)
    out = special.fdtrc(df1, df2, x)
    return float(out) if out.ndim == 0 else out


def normal_cdf(x):
    out = special.ndtr(np.asarray(x, dtype=float))
    return float(out) if out.ndim == 0 else out


def t_cdf(x, df):
    _check_df(df)
    out = special.stdtr(df, np.asarray(x, dtype=float))
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# samplers

def _gen(rng) -> np.random.Generator:
    return as_generator(rng)


def _check_nd(n: int, d: int) -> None:
    if n < 1 or d < 1:
        raise InvalidInputError(f"need n >= 1 and d >= 1, got n={n}, d={d}")


def sample_mvnormal(n: int, d: int, rng) -> np.ndarray:
    """``n`` draws from N_d(0, I)."""
    _check_nd(n, d)
    return _gen(rng).standard_normal((n, d))


def sample_mvt1(n: int, d: int, rng) -> np.ndarray:
    """Multivariate Cauchy: ``Z / sqrt(V)`` with ``V`` a chi-square(1) draw."""
    _check_nd(n, d)
    g = _gen(rng)
    z = g.standard_normal((n, d))
    w = g.standard_normal(n)
    return z / np.abs(w)[:, None]


def sample_doubleexp(n: int, d: int, rng) -> np.ndarray:
    """Equal mixture of ``L(E)`` and ``L(-E)``, ``E`` with iid Exp(1) coordinates.

    The sign is shared by all coordinates of a draw, so the law is centrally
    symmetric but not elliptical.
    """
    _check_nd(n, d)
    g = _gen(rng)
    e = g.exponential(1.0, size=(n, d))
    flip = g.integers(0, 2, size=n) * 2 - 1
    return e * flip[:, None]


@dataclass(frozen=True)
class SkewNormalSpec:
    """Bivariate skew normal with slant vector ``(alpha, alpha)``."""

    alpha: float
    d: int = 2
    shift: tuple[float, ...] = (0.0, 0.0)
    recenter: bool = True

    @property
    def mean_coordinate(self) -> float:
        a = self.alpha
        return math.sqrt(2.0 / math.pi) * a / math.sqrt(1.0 + 2.0 * a * a)


def sample_skewnormal2(n: int, spec: SkewNormalSpec, rng) -> np.ndarray:
    """Draw from the density ``2 phi(x) Phi(alpha' x)`` by sign selection.

    ``X ~ N_2(0, I)`` is kept when an independent ``W ~ N(0, 1)`` falls below
    ``alpha' X`` and reflected otherwise.
    """
    if spec.d != 2:
        raise InvalidInputError("the skew-normal sampler is bivariate only")
    _check_nd(n, 2)
    g = _gen(rng)
    x = g.standard_normal((n, 2))
    w = g.standard_normal(n)
    slant = np.full(2, float(spec.alpha))
    keep = w < x @ slant
    x = np.where(keep[:, None], x, -x)
    if spec.recenter:
        x = x - spec.mean_coordinate
    return x + np.asarray(spec.shift, dtype=float)
