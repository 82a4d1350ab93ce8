"""Input validation helpers built on sklearn's checkers."""
from __future__ import annotations

import numpy as np
from sklearn.utils import check_array

from .exceptions import InvalidInputError


def check_sample(X, *, min_samples: int = 1, name: str = "sample") -> np.ndarray:
    """Return ``X`` as a finite float array of shape (n, d).

    A 1-d input is read as n univariate observations.
    """
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    try:
        arr = check_array(arr, dtype=np.float64, ensure_min_samples=min_samples)
    except ValueError as exc:
        raise InvalidInputError(f"invalid {name}: {exc}") from exc
    return arr


def check_univariate(x, *, name: str = "sample") -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise InvalidInputError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise InvalidInputError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite values")
    return arr


def check_location(mu0, d: int) -> np.ndarray:
    if mu0 is None:
        return np.zeros(d)
    mu = np.atleast_1d(np.asarray(mu0, dtype=float))
    if mu.shape != (d,):
        raise InvalidInputError(f"mu0 must have shape ({d},), got {mu.shape}")
    if not np.all(np.isfinite(mu)):
        raise InvalidInputError("mu0 contains non-finite values")
    return mu
