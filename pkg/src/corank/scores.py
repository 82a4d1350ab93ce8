"""Score functions J on [0, 1) that weight center-outward ranks."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate

from .exceptions import ConfigurationError, NumericalError
from .statdist import chisq_pdf, chisq_quantile


@dataclass(frozen=True)
class ScoreFunction:
    tag: str
    evaluate: Callable[[np.ndarray], np.ndarray]
    J2_integral: float
    J1_integral: float

    def __call__(self, u):
        return self.evaluate(u)

    def __post_init__(self):
        if not (np.isfinite(self.J2_integral) and self.J2_integral > 0):
            raise ConfigurationError(f"score {self.tag}: integral of J^2 must be finite and positive")


def _sign(u):
    return np.ones_like(np.asarray(u, dtype=float))


def _wilcoxon(u):
    return np.asarray(u, dtype=float)


SIGN = ScoreFunction("SIGN", _sign, 1.0, 1.0)
WILCOXON = ScoreFunction("WILCOXON", _wilcoxon, 1.0 / 3.0, 0.5)


class _VdwEvaluate:
    # A class rather than a closure so the score pickles into worker processes.
    def __init__(self, d: int):
        self.d = d

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        out = np.zeros_like(u)
        inner = (u > 0) & (u < 1)
        out[inner] = np.sqrt(chisq_quantile(u[inner], self.d))
        out[u >= 1] = np.inf
        return out


def _chisq_moment(d: int, power: float) -> float:
    # E[Y**power] for Y ~ chi2_d, integrated on the radial scale so that the
    # quantile singularity at u = 1 never appears.
    upper = chisq_quantile(1.0 - 1e-12, d)
    val, err = integrate.quad(lambda y: y**power * chisq_pdf(y, d), 0.0, upper,
                              epsabs=1e-13, epsrel=1e-12, limit=200)
    if not np.isfinite(val) or err > 1e-8:
        raise NumericalError(f"quadrature failed for the chi2_{d} moment of order {power}")
    return val


@lru_cache(maxsize=None)
def vdw_score(d: int) -> ScoreFunction:
    """van der Waerden score ``sqrt(G_d^{-1}(u))``, G_d the chi-square(d) cdf.

    The integral of J^2 is computed by quadrature; it equals ``d``.
    """
    if d < 1:
        raise ConfigurationError("vdw_score needs d >= 1")
    return ScoreFunction(f"VDW{d}", _VdwEvaluate(d), _chisq_moment(d, 1.0), _chisq_moment(d, 0.5))


def custom_score(func: Callable, tag: str = "CUSTOM") -> ScoreFunction:
    """Wrap an arbitrary score, computing both integrals by quadrature."""
    f = np.vectorize(lambda t: float(func(t)))
    j2, _ = integrate.quad(lambda t: f(t) ** 2, 0.0, 1.0, limit=200)
    j1, _ = integrate.quad(f, 0.0, 1.0, limit=200)
    return ScoreFunction(tag, lambda u: f(np.asarray(u, dtype=float)), j2, j1)


def resolve_score(score, d: int | None = None) -> ScoreFunction:
    """Accept a ScoreFunction or one of ``"sign"``, ``"wilcoxon"``, ``"vdw"``."""
    if isinstance(score, ScoreFunction):
        return score
    name = str(score).lower()
    if name == "sign":
        return SIGN
    if name == "wilcoxon":
        return WILCOXON
    if name in ("vdw", "van_der_waerden"):
        if d is None:
            raise ConfigurationError("the van der Waerden score needs the dimension")
        return vdw_score(d)
    raise ConfigurationError(f"unknown score {score!r}")
