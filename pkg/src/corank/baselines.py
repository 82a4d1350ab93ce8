"""Hotelling's one-sample T^2 test, the Gaussian benchmark."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from ._validation import check_location, check_sample
from .exceptions import InvalidInputError, NumericalError
from .location_tests import TestOutcome, _outcome
from .statdist import f_sf


@dataclass(frozen=True)
class HotellingResult:
    t2: float
    f_stat: float
    df1: int
    df2: int
    p_value: float


def hotelling_t2(sample, mu0=None) -> HotellingResult:
    """``T^2 = n (xbar - mu0)' S^{-1} (xbar - mu0)`` with F(d, n - d) calibration.

    The unbiased covariance ``S`` is factored by Cholesky; a failed
    factorization raises :class:`NumericalError`.
    """
    X = check_sample(sample)
    n, d = X.shape
    if n <= d:
        raise InvalidInputError(f"Hotelling's test needs n > d, got n={n}, d={d}")
    diff = X.mean(axis=0) - check_location(mu0, d)
    S = np.atleast_2d(np.cov(X, rowvar=False))
    try:
        chol = linalg.cho_factor(S, lower=True)
    except linalg.LinAlgError as exc:
        raise NumericalError("sample covariance is singular") from exc
    t2 = float(n * diff @ linalg.cho_solve(chol, diff))
    f_stat = t2 * (n - d) / (d * (n - 1))
    return HotellingResult(t2, f_stat, d, n - d, float(f_sf(f_stat, d, n - d)))


def hotelling_test(sample, mu0=None, *, alpha=None) -> TestOutcome:
    res = hotelling_t2(sample, mu0)
    return _outcome(res.t2, res.df1, res.p_value, "HOT", alpha)
