"""Local power of the c-o tests for spherically symmetric laws.

Under shifts ``h / sqrt(n)`` the random-signs statistic is asymptotically
noncentral chi-square(d) with noncentrality

    q = [int_0^1 J(u) phi(u) du]^2 / (d int_0^1 J^2(u) du) * h'h,

where ``phi = phi_g o F_r^{-1}`` is the radial location score composed with the
quantile function of ``||X||``. The efficiency relative to Hotelling's T^2
rescales ``q`` by ``E||X||^2 / d``.

For N_d(0, I) the radial score is ``sqrt(G_d^{-1}(u))`` (see
:func:`gaussian_radial_score`), which coincides with the van der Waerden score.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from .exceptions import NumericalError
from .scores import WILCOXON, ScoreFunction, resolve_score, vdw_score
from .statdist import chisq_cdf, chisq_pdf, chisq_quantile

__all__ = [
    "AreResult", "noncentrality", "are_vs_hotelling", "gaussian_are",
    "gaussian_radial_score", "wilcoxon_gaussian_are_closed_form", "vdw_score",
]

_TOL = 1e-8
_TAIL = 1e-12


@dataclass(frozen=True)
class AreResult:
    d: int
    score_tag: str
    are: float
    noncentrality_per_unit_shift: float


class _GaussianRadial:
    def __init__(self, d: int):
        self.d = d

    def __call__(self, u):
        return vdw_score(self.d).evaluate(u)


def gaussian_radial_score(d: int) -> Callable:
    """``phi_g o F_r^{-1}`` for N_d(0, I): ``u -> sqrt(G_d^{-1}(u))``."""
    return _GaussianRadial(d)


def _quad_unit(f: Callable[[float], float], d: int) -> float:
    # Integrate over (0, 1) after u = G_d(y); the radial variable keeps the
    # integrand bounded where chi-square quantile scores blow up near u = 1.
    upper = chisq_quantile(1.0 - _TAIL, d)

    def integrand(y):
        return f(chisq_cdf(y, d)) * chisq_pdf(y, d)

    val, err = integrate.quad(integrand, 0.0, upper, epsabs=1e-12, epsrel=_TOL, limit=400)
    if not np.isfinite(val) or err > max(1e-10, _TOL * abs(val)) * 100:
        raise NumericalError(f"quadrature did not converge (value {val}, error {err})")
    return float(val)


def _cross_integral(score: ScoreFunction, phi: Callable, d: int) -> float:
    return _quad_unit(lambda u: float(score(np.array([u]))[0]) * float(np.asarray(phi(np.array([u])))[0]), d)


def noncentrality(score, phi_g_of_Fr_inv: Callable, d: int, h) -> float:
    """Noncentrality of the c-o statistic under the local shift ``h``."""
    J = resolve_score(score, d)
    h = np.atleast_1d(np.asarray(h, dtype=float))
    hh = float(h @ h)
    if hh == 0.0:
        return 0.0
    cross = _cross_integral(J, phi_g_of_Fr_inv, d)
    return cross**2 / (d * J.J2_integral) * hh


def are_vs_hotelling(score, phi_g_of_Fr_inv: Callable, d: int, second_moment: float) -> AreResult:
    """Asymptotic relative efficiency with respect to Hotelling's T^2."""
    if not np.isfinite(second_moment):
        raise NumericalError("the second moment must be finite")
    J = resolve_score(score, d)
    cross = _cross_integral(J, phi_g_of_Fr_inv, d)
    are = cross**2 * second_moment / (d**2 * J.J2_integral)
    return AreResult(d, J.tag, float(are), float(cross**2 / (d * J.J2_integral)))


def wilcoxon_gaussian_are_closed_form(d: int) -> float:
    """``(3/d) (int_0^inf sqrt(y) G_d(y) dG_d(y))^2`` for Wilcoxon scores."""
    val, _ = integrate.quad(lambda y: np.sqrt(y) * chisq_cdf(y, d) * chisq_pdf(y, d), 0.0, np.inf,
                            epsabs=1e-13, epsrel=1e-12, limit=400)
    return 3.0 / d * val**2


def gaussian_are(score, d: int) -> AreResult:
    """ARE under N_d(0, I), where ``E||X||^2 = d``.

    Wilcoxon scores are also evaluated through the closed reduction and the
    two routes must agree.
    """
    J = resolve_score(score, d)
    res = are_vs_hotelling(J, gaussian_radial_score(d), d, float(d))
    if J is WILCOXON:
        closed = wilcoxon_gaussian_are_closed_form(d)
        if abs(closed - res.are) > 1e-7:
            raise NumericalError(f"ARE routes disagree at d={d}: {res.are} vs {closed}")
    return res
