"""One-sample location tests built on center-outward ranks and signs.

Two multivariate families are provided:

* the random-signs test flips every observation by an independent fair sign
  and compares the flipped-positive and flipped-negative halves with a
  two-sample c-o rank statistic;
* the symmetrized tests transport ``{X_i} U {-X_i}`` onto a symmetric grid and
  sum score-weighted c-o signs over the original observations.

All multivariate statistics are referred to the chi-square distribution with
``d`` degrees of freedom. The univariate sign and Wilcoxon tests and a
marginal Bonferroni combination are included for comparison.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from ._validation import check_location, check_sample, check_univariate
from .codf import fit_codf, fit_symmetrized
from .exceptions import ConfigurationError, DegenerateSplitError, InvalidInputError
from .grids import SYMMETRIC_KINDS, canonical_kind, grid_for_size, score_sum
from .scores import SIGN, WILCOXON, ScoreFunction, resolve_score
from .statdist import as_generator, chisq_sf

DEFAULT_LEVELS = (0.01, 0.05, 0.10)


@dataclass(frozen=True, eq=False)
class TestOutcome:
    """Result of a location test.

    ``t_vector`` holds the score vector behind chi-square statistics (``T`` or
    ``T_a``) when the test has one.
    """

    __test__ = False  # keep pytest from collecting this class

    statistic: float
    df: int
    p_value: float
    test_id: str
    reject_at: dict = field(default_factory=dict)
    n_plus: int | None = None
    t_vector: np.ndarray | None = None

    def rejects(self, alpha: float) -> bool:
        return bool(self.p_value < alpha)


def _outcome(statistic: float, df: int, p_value: float, test_id: str, alpha=None, **extra) -> TestOutcome:
    levels = set(DEFAULT_LEVELS)
    if alpha is not None:
        levels.add(float(alpha))
    p_value = float(min(1.0, max(0.0, p_value)))
    reject_at = {lv: p_value < lv for lv in sorted(levels)}
    return TestOutcome(float(statistic), int(df), p_value, test_id, reject_at, **extra)


def chisq_outcome(statistic: float, df: int, test_id: str, alpha=None, **extra) -> TestOutcome:
    return _outcome(statistic, df, chisq_sf(statistic, df), test_id, alpha, **extra)


VARIANCES = ("asymptotic", "grid")


def q_statistic(t_vector, score: ScoreFunction) -> float:
    """``d / int J^2 * ||T||^2``, asymptotically chi-square(d) under the null."""
    t = np.atleast_1d(np.asarray(t_vector, dtype=float))
    return float(t.size / score.J2_integral * (t @ t))


def _check_variance(variance: str) -> str:
    if variance not in VARIANCES:
        raise ConfigurationError(f"variance must be one of {VARIANCES}, got {variance!r}")
    return variance


def _grid_scores(grid, score: ScoreFunction) -> np.ndarray:
    w = np.asarray(score(grid.radii), dtype=float)
    w[grid.ranks == 0] = 0.0
    return w[:, None] * grid.directions


# ---------------------------------------------------------------------------
# random-signs test

def random_signs_statistic(flipped, signs_pm, grid, score: ScoreFunction, method: str = "scipy"):
    """Score vector ``T`` for an already flipped sample.

    ``signs_pm`` holds the ``+1/-1`` flips; observations flipped by ``+1``
    form the first sub-sample.
    """
    n = flipped.shape[0]
    plus = signs_pm > 0
    n_plus = int(plus.sum())
    if n_plus in (0, n):
        raise DegenerateSplitError(f"random sign split is degenerate (n_plus={n_plus}, n={n})")
    codf = fit_codf(flipped, grid, method=method)
    weights = np.asarray(score(codf.ranks / (grid.n_R + 1)), dtype=float)
    weights[codf.ranks == 0] = 0.0
    total_plus = (weights[plus, None] * codf.signs[plus]).sum(axis=0)
    centre = n_plus / n * score_sum(grid, score)
    scale = math.sqrt(n / (n_plus * (n - n_plus)))
    return scale * (total_plus - centre), n_plus


def random_signs_test(sample, grid_kind: str = "R2", n_R: int = 6, score=WILCOXON, rng=None,
                      *, mu0=None, alpha=None, method: str = "scipy", variance: str = "asymptotic") -> TestOutcome:
    """Random-signs c-o test of ``H0: centre of symmetry == mu0``.

    The statistic is ``Q = d / int J^2 * ||T||^2``. With ``variance="grid"``
    the integral is replaced by the permutation variance of the grid scores,
    ``sum_g ||a_g - abar||^2 / (n - 1)`` with ``a_g = J(||g||) g / ||g||``,
    which removes the small-sample deflation of Wilcoxon-type scores on
    coarse grids.

    Parameters
    ----------
    sample : array_like, shape (n, d)
    grid_kind : str
        Any grid kind; the grid has ``n`` points.
    n_R : int
        Number of spheres.
    score : ScoreFunction or str
    rng : Generator, RngState, int or None
        Drives the sign flips and, for random grids, the grid.

    Raises
    ------
    DegenerateSplitError
        If all flips share the same sign. Callers may retry with a fresh
        stream; retrying here would bias the randomization.
    """
    X = check_sample(sample, min_samples=2)
    n, d = X.shape
    X = X - check_location(mu0, d)
    J = resolve_score(score, d)
    gen = as_generator(rng)
    flips = gen.integers(0, 2, size=n) * 2 - 1
    grid = grid_for_size(grid_kind, n, d, n_R, rng=gen)
    _check_variance(variance)
    T, n_plus = random_signs_statistic(flips[:, None] * X, flips, grid, J, method=method)
    if variance == "grid":
        a = _grid_scores(grid, J)
        m2 = float(((a - a.mean(axis=0)) ** 2).sum()) / (n - 1)
        stat = d * float(T @ T) / m2
    else:
        stat = q_statistic(T, J)
    return chisq_outcome(stat, d, f"RAN-{grid.kind}-{J.tag}", alpha, n_plus=n_plus, t_vector=T)


# ---------------------------------------------------------------------------
# symmetrized tests

def symmetrized_score_vector(sym, score: ScoreFunction) -> np.ndarray:
    """``T_a = n^{-1/2} sum_i J(||F(X_i)||) S(X_i)`` over the original points."""
    grid = sym.base.grid
    w = np.asarray(score(sym.ranks / (grid.n_R + 1)), dtype=float)
    w[sym.ranks == 0] = 0.0
    return (w[:, None] * sym.signs).sum(axis=0) / math.sqrt(sym.n)


def _symmetric_grid(grid_kind: str, n: int, d: int, n_R: int, rng):
    kind = canonical_kind(grid_kind)
    if kind not in SYMMETRIC_KINDS:
        raise ConfigurationError(f"the symmetrized test needs a symmetric grid kind, got {kind}")
    return grid_for_size(kind, 2 * n, d, n_R, rng=rng)


def symmetrized_general_score(sample, grid_kind: str = "R2*", n_R: int = 6, score=WILCOXON, rng=None,
                              *, mu0=None, alpha=None, method: str = "paired",
                              variance: str = "asymptotic") -> TestOutcome:
    """Symmetrized c-o test with an arbitrary score.

    The statistic ``d / int J^2 * ||T_a||^2`` is referred to chi-square(d).
    ``variance="grid"`` divides by the grid average of ``J^2(||g||)``
    instead, which makes the null expectation exactly ``d``.
    """
    X = check_sample(sample, min_samples=2)
    n, d = X.shape
    X = X - check_location(mu0, d)
    J = resolve_score(score, d)
    grid = _symmetric_grid(grid_kind, n, d, n_R, as_generator(rng))
    _check_variance(variance)
    sym = fit_symmetrized(X, grid, method=method)
    T = symmetrized_score_vector(sym, J)
    if variance == "grid":
        m2 = float((_grid_scores(grid, J) ** 2).sum()) / grid.n
        stat = d * float(T @ T) / m2
    else:
        stat = q_statistic(T, J)
    return chisq_outcome(stat, d, f"SYM-{grid.kind}-{J.tag}", alpha, t_vector=T)


def symmetrized_test(sample, grid_kind: str = "R2*", n_R: int = 6, variant: str = "wilcoxon", rng=None,
                     *, mu0=None, alpha=None, method: str = "paired", variance: str = "asymptotic") -> TestOutcome:
    """Symmetrized sign (``d ||T_S||^2``) or Wilcoxon (``3d ||T_F||^2``) test."""
    v = str(variant).lower()
    if v not in ("sign", "wilcoxon"):
        raise ConfigurationError(f"variant must be 'sign' or 'wilcoxon', got {variant!r}")
    return symmetrized_general_score(sample, grid_kind, n_R, SIGN if v == "sign" else WILCOXON, rng,
                                     mu0=mu0, alpha=alpha, method=method, variance=variance)


# ---------------------------------------------------------------------------
# univariate tests

def _drop_zeros(x: np.ndarray) -> np.ndarray:
    nz = x != 0
    if not nz.any():
        raise InvalidInputError("all observations are zero")
    if not nz.all():
        warnings.warn(f"dropping {int((~nz).sum())} zero observations", RuntimeWarning, stacklevel=3)
    return x[nz]


def univariate_sign_test(sample, *, alpha=None) -> TestOutcome:
    """Sign test, statistic ``(2 W_S - n)^2 / n`` against chi-square(1)."""
    x = _drop_zeros(check_univariate(sample))
    n = x.size
    w_s = int((x > 0).sum())
    return chisq_outcome((2 * w_s - n) ** 2 / n, 1, "SIGN1", alpha)


def wilcoxon_signed_rank_sum(x: np.ndarray) -> float:
    """``W_W``: sum of the ranks of ``|x|`` over positive observations."""
    r = rankdata(np.abs(x))
    return float(r[x > 0].sum())


def univariate_wilcoxon_test(sample, *, alpha=None) -> TestOutcome:
    """One-sample Wilcoxon test with ``Z = (2 W_W - n(n+1)/2) / sqrt(n^3 / 3)``."""
    x = _drop_zeros(check_univariate(sample))
    n = x.size
    z = (2.0 * wilcoxon_signed_rank_sum(x) - n * (n + 1) / 2.0) / math.sqrt(n**3 / 3.0)
    return chisq_outcome(z * z, 1, "WILCOXON1", alpha)


def marginal_bonferroni(sample, alpha: float = 0.05) -> TestOutcome:
    """Coordinate-wise Wilcoxon tests combined by the Bonferroni correction.

    Rejects when the smallest marginal p-value is below ``alpha / d``; the
    reported p-value is ``min(1, d * min_j p_j)`` and the statistic is the
    largest marginal chi-square(1) value.
    """
    X = check_sample(sample)
    d = X.shape[1]
    marg = [univariate_wilcoxon_test(X[:, j]) for j in range(d)]
    p_min = min(o.p_value for o in marg)
    stat = max(o.statistic for o in marg)
    return _outcome(stat, 1, min(1.0, d * p_min), "MARG", alpha)
