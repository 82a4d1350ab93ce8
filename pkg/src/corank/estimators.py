"""scikit-learn style wrappers.

``CenterOutwardRanks`` is a transformer: ``fit`` builds a grid matching the
sample size and dimension and transports the sample onto it, ``transform``
transports another sample of the same size onto the fitted grid.

The location tests are estimators whose ``fit`` runs the test and stores the
outcome in ``outcome_``; ``get_params``/``clone`` make them easy to replicate
in simulations.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_sample
from .baselines import hotelling_test
from .codf import fit_codf, fit_symmetrized
from .exceptions import ConfigurationError, InvalidInputError
from .grids import SYMMETRIC_KINDS, canonical_kind, grid_for_size
from .location_tests import (
    TestOutcome,
    marginal_bonferroni,
    random_signs_test,
    symmetrized_general_score,
)
from .scores import resolve_score
from .statdist import as_generator


class CenterOutwardRanks(TransformerMixin, BaseEstimator):
    """Empirical center-outward distribution function as a transformer.

    Parameters
    ----------
    grid : str, default="H"
        Grid kind (``R1``, ``R2``, ``H``, ``REGULAR2D``, or with
        ``symmetrize=True`` one of ``R2*``, ``H*``).
    n_R : int, default=6
        Number of spheres.
    n_0 : int, default=0
        Origin copies (non-symmetric grids).
    symmetrize : bool, default=False
        Fit on ``{X_i} U {-X_i}`` against a symmetric grid of ``2n`` points and
        report the images of the original observations.
    random_state : int, Generator, RngState or None

    Attributes
    ----------
    grid_ : Grid
    codf_ : CoDistribution or SymmetrizedCoDistribution
    images_, ranks_, signs_ : ndarray
    """

    def __init__(self, grid="H", n_R=6, n_0=0, symmetrize=False, random_state=None):
        self.grid = grid
        self.n_R = n_R
        self.n_0 = n_0
        self.symmetrize = symmetrize
        self.random_state = random_state

    def _transport(self, X):
        if self.symmetrize:
            return fit_symmetrized(X, self.grid_)
        return fit_codf(X, self.grid_)

    def fit(self, X, y=None):
        X = check_sample(X)
        n, d = X.shape
        kind = canonical_kind(self.grid)
        if self.symmetrize != (kind in SYMMETRIC_KINDS):
            raise ConfigurationError("symmetric grid kinds go with symmetrize=True and only then")
        size = 2 * n if self.symmetrize else n
        self.grid_ = grid_for_size(kind, size, d, self.n_R, n_0=0 if self.symmetrize else self.n_0,
                                   rng=as_generator(self.random_state))
        self.n_features_in_ = d
        self.codf_ = self._transport(X)
        self.images_ = self.codf_.images
        self.ranks_ = self.codf_.ranks
        self.signs_ = self.codf_.signs
        return self

    def transform(self, X):
        check_is_fitted(self, "grid_")
        X = check_sample(X)
        if X.shape[1] != self.n_features_in_:
            raise InvalidInputError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return self._transport(X).images

    def fit_transform(self, X, y=None):
        return self.fit(X).images_


class _LocationTest(BaseEstimator):
    """Shared ``fit``/``test`` plumbing; subclasses implement ``_run``."""

    def fit(self, X, y=None):
        self.outcome_ = self._run(X)
        self.statistic_ = self.outcome_.statistic
        self.pvalue_ = self.outcome_.p_value
        self.df_ = self.outcome_.df
        self.reject_ = self.outcome_.rejects(self.alpha)
        return self

    def test(self, X) -> TestOutcome:
        return self.fit(X).outcome_


class RandomSignsTest(_LocationTest):
    """Random-signs c-o location test (see :func:`random_signs_test`)."""

    def __init__(self, grid="R2", n_R=6, score="wilcoxon", alpha=0.05, mu0=None, random_state=None,
                 variance="asymptotic"):
        self.grid = grid
        self.n_R = n_R
        self.score = score
        self.alpha = alpha
        self.mu0 = mu0
        self.random_state = random_state
        self.variance = variance

    def _run(self, X):
        X = check_sample(X, min_samples=2)
        return random_signs_test(X, self.grid, self.n_R, resolve_score(self.score, X.shape[1]),
                                 as_generator(self.random_state), mu0=self.mu0, alpha=self.alpha,
                                 variance=self.variance)


class SymmetrizedTest(_LocationTest):
    """Symmetrized-sample c-o location test.

    ``score="sign"`` gives ``d ||T_S||^2``, ``"wilcoxon"`` gives
    ``3d ||T_F||^2``; ``"vdw"`` or a ScoreFunction use the general form.
    """

    def __init__(self, grid="R2*", n_R=6, score="wilcoxon", alpha=0.05, mu0=None, random_state=None,
                 method="paired", variance="asymptotic"):
        self.grid = grid
        self.n_R = n_R
        self.score = score
        self.alpha = alpha
        self.mu0 = mu0
        self.random_state = random_state
        self.method = method
        self.variance = variance

    def _run(self, X):
        X = check_sample(X, min_samples=2)
        return symmetrized_general_score(X, self.grid, self.n_R, resolve_score(self.score, X.shape[1]),
                                         as_generator(self.random_state), mu0=self.mu0, alpha=self.alpha,
                                         method=self.method, variance=self.variance)


class HotellingTest(_LocationTest):
    def __init__(self, alpha=0.05, mu0=None):
        self.alpha = alpha
        self.mu0 = mu0

    def _run(self, X):
        return hotelling_test(X, self.mu0, alpha=self.alpha)


class MarginalWilcoxonTest(_LocationTest):
    """Coordinate-wise Wilcoxon tests with a Bonferroni correction."""

    def __init__(self, alpha=0.05, mu0=None):
        self.alpha = alpha
        self.mu0 = mu0

    def _run(self, X):
        X = check_sample(X)
        if self.mu0 is not None:
            X = X - np.asarray(self.mu0, dtype=float)
        return marginal_bonferroni(X, self.alpha)


_METHODS = {
    "ran": lambda grid, n_R, alpha, seed: RandomSignsTest(grid or "R2", n_R, "wilcoxon", alpha, random_state=seed),
    "sym-sign": lambda grid, n_R, alpha, seed: SymmetrizedTest(grid or "R2*", n_R, "sign", alpha, random_state=seed),
    "sym-wilcoxon": lambda grid, n_R, alpha, seed: SymmetrizedTest(grid or "R2*", n_R, "wilcoxon", alpha, random_state=seed),
    "sym-vdw": lambda grid, n_R, alpha, seed: SymmetrizedTest(grid or "R2*", n_R, "vdw", alpha, random_state=seed),
    "hotelling": lambda grid, n_R, alpha, seed: HotellingTest(alpha),
    "marginal": lambda grid, n_R, alpha, seed: MarginalWilcoxonTest(alpha),
}


def make_method(method: str, grid: str | None = None, n_R: int = 6, alpha: float = 0.05, random_state=None):
    """Estimator for a CLI ``--method`` name."""
    try:
        factory = _METHODS[method]
    except KeyError:
        raise ConfigurationError(f"unknown method {method!r}; choose from {sorted(_METHODS)}") from None
    return factory(grid, n_R, alpha, random_state)


def make_named_test(test_id: str, n_R: int = 6, alpha: float = 0.05):
    """Estimator for a simulation test label such as ``RAN-R1`` or ``SYM-H``.

    Labels: ``RAN-{R1,R2,H}``, ``SYM-{R2,H}`` (Wilcoxon scores),
    ``SYM-{R2,H}-SIGN``, ``SYM-{R2,H}-VDW``, ``HOT``, ``MARG``.
    """
    key = test_id.upper()
    parts = key.split("-")
    if key == "HOT":
        return HotellingTest(alpha)
    if key == "MARG":
        return MarginalWilcoxonTest(alpha)
    if parts[0] == "RAN" and len(parts) in (2, 3) and parts[1] in ("R1", "R2", "H"):
        score = parts[2].lower() if len(parts) == 3 else "wilcoxon"
        return RandomSignsTest(parts[1], n_R, score, alpha)
    if parts[0] == "SYM" and len(parts) in (2, 3) and parts[1] in ("R2", "H"):
        score = parts[2].lower() if len(parts) == 3 else "wilcoxon"
        return SymmetrizedTest(parts[1] + "*", n_R, score, alpha)
    raise ConfigurationError(f"unknown test label {test_id!r}")
