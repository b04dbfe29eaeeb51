"""Correct-decoding exponent for the power-constrained Gaussian channel.

Codewords are drawn uniformly on the sphere of squared radius n*S and the
eavesdropper sees them through additive white Gaussian noise of variance
sigma^2.  The large-deviations variables are the empirical output power
sigma_z^2 and the empirical input-output correlation rho; the minimization
over sigma_z is available in closed form, which leaves one-dimensional
searches over rho per branch.

All branch objectives at negative rho dominate their positive-rho mirror
pointwise (the divergence term grows by 2*rho*sigma_z*sqrt(S)/sigma^2 when
the sign flips), so searches run over rho >= 0 and yield the same minima as
a full-range search.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exponent import RatePair, gamma_dmc

DEFAULT_GRID_POINTS = 100_000
DEFAULT_REFINE_TOL = 1e-9

#: searches never reach |rho| = 1; rate endpoints clamp here as well
_RHO_CAP = 1.0 - 1e-12

_BRANCH_TIE_TOL = 1e-9


@dataclass(frozen=True)
class GaussianSpec:
    """Per-symbol power S and noise variance sigma^2, both positive."""

    s: float
    sigma2: float

    def __post_init__(self):
        if not (math.isfinite(self.s) and self.s > 0):
            raise ValueError(f"power must be positive and finite, got {self.s}")
        if not (math.isfinite(self.sigma2) and self.sigma2 > 0):
            raise ValueError(
                f"noise variance must be positive and finite, got {self.sigma2}")

    @property
    def capacity(self) -> float:
        """Mutual information of the true channel, 0.5*ln(1 + S/sigma^2)."""
        return 0.5 * math.log1p(self.s / self.sigma2)


@dataclass(frozen=True)
class GaussianOptimum:
    """Branch values, overall exponent and the achieving (rho, sigma_z)."""

    e: float
    e1: float
    e2: float
    e3: float
    rho_star: float
    sigma_z_star: float
    active_branch: str


def gaussian_mutual_info(rho: float) -> float:
    """Mutual-information level of correlation rho: -0.5*ln(1 - rho^2)."""
    if not abs(rho) < 1.0:
        raise ValueError(f"|rho| must be < 1, got {rho}")
    return -0.5 * math.log1p(-rho * rho)


def gamma_gaussian(rho: float, rates: RatePair) -> float:
    """[R2 + 0.5 ln(1-rho^2)]_+ - [0.5 ln(1/(1-rho^2)) - R1]_+.

    Identical to the finite-alphabet piecewise form evaluated at the
    mutual-information level of rho.
    """
    return gamma_dmc(gaussian_mutual_info(rho), rates)


def sigma_z_star(rho: float, g: GaussianSpec) -> float:
    """Closed-form minimizer of the divergence term over sigma_z > 0.

    Positive root of sigma_z^2 - rho*sqrt(S)*sigma_z - sigma^2 = 0.
    """
    if not abs(rho) < 1.0:
        raise ValueError(f"|rho| must be < 1, got {rho}")
    return 0.5 * (rho * math.sqrt(g.s)
                  + math.sqrt(rho * rho * g.s + 4.0 * g.sigma2))


def gaussian_divergence_term(rho: float, sigma_z: float,
                             g: GaussianSpec) -> float:
    """Large-deviations cost of observing empirical statistics (rho, sigma_z).

    Nonnegative; zero exactly at the true-channel statistics
    rho*sigma_z = sqrt(S), sigma_z^2 (1 - rho^2) = sigma^2.
    """
    if not abs(rho) < 1.0:
        raise ValueError(f"|rho| must be < 1, got {rho}")
    if not sigma_z > 0:
        raise ValueError(f"sigma_z must be positive, got {sigma_z}")
    return float(_divergence_reduced(np.asarray([rho]),
                                     np.asarray([sigma_z]), g)[0])


def _divergence_reduced(rho: np.ndarray, sigma_z: np.ndarray,
                        g: GaussianSpec) -> np.ndarray:
    resid = (rho * sigma_z - math.sqrt(g.s)) ** 2
    var = sigma_z * sigma_z * (1.0 - rho * rho)
    return 0.5 * (resid / g.sigma2 + var / g.sigma2
                  - np.log(var / g.sigma2) - 1.0)


def _sigma_star_vec(rho: np.ndarray, g: GaussianSpec) -> np.ndarray:
    return 0.5 * (rho * math.sqrt(g.s)
                  + np.sqrt(rho * rho * g.s + 4.0 * g.sigma2))


def _profile(rho: np.ndarray, g: GaussianSpec) -> np.ndarray:
    """Divergence term minimized over sigma_z, as a function of rho."""
    return _divergence_reduced(rho, _sigma_star_vec(rho, g), g)


def rho_from_rate(r: float) -> float:
    """Correlation level at mutual information r: sqrt(1 - e^{-2r}).

    Rates beyond the representable range clamp to just below one.
    """
    if r < 0:
        raise ValueError("rate must be nonnegative")
    rho = math.sqrt(max(0.0, -math.expm1(-2.0 * r)))
    return min(rho, _RHO_CAP)


def _golden_min_scalar(f, a: float, b: float, tol: float) -> tuple[float, float]:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = f(x2)
    x = 0.5 * (a + b)
    return x, f(x)


def _min_on_interval(fun, lo: float, hi: float, density: float,
                     refine_tol: float) -> tuple[float, float]:
    """Dense grid plus cell-local golden refinement; ties go to smaller rho."""
    if lo > hi:
        return math.inf, math.nan
    if hi - lo <= refine_tol:
        return float(fun(np.asarray([lo]))[0]), lo
    count = max(9, int(math.ceil((hi - lo) * density)) + 1)
    xs = np.linspace(lo, hi, count)
    vals = fun(xs)
    j = int(np.argmin(vals))
    a = xs[max(0, j - 1)]
    b = xs[min(count - 1, j + 1)]
    x, v = _golden_min_scalar(lambda t: float(fun(np.asarray([t]))[0]),
                              float(a), float(b), refine_tol)
    if v <= vals[j]:
        return float(v), float(x)
    return float(vals[j]), float(xs[j])


def gaussian_exponent(g: GaussianSpec, rates: RatePair,
                      grid_points: int = DEFAULT_GRID_POINTS,
                      refine_tol: float = DEFAULT_REFINE_TOL) -> GaussianOptimum:
    """Exponent of the Gaussian eavesdropper at the given rate pair.

    Each branch restricts rho to the interval mapped from the rates via
    rho^2 = 1 - e^{-2R} and minimizes its objective by a dense grid (the
    default density matches 10^5 points across (-1, 1)) with golden-section
    refinement; minima over empty intervals are +inf.
    """
    rho1 = rho_from_rate(rates.r1)
    rho2 = rho_from_rate(rates.r2)
    density = grid_points / 2.0

    def f_div(x: np.ndarray) -> np.ndarray:
        return _profile(x, g)

    def f_mid(x: np.ndarray) -> np.ndarray:
        return _profile(x, g) + 0.5 * np.log1p(-x * x)

    v1, r1_arg = _min_on_interval(f_div, 0.0, rho2, density, refine_tol)
    e1 = rates.r1 - rates.r2 + v1
    v2, r2_arg = _min_on_interval(f_mid, rho2, rho1, density, refine_tol)
    e2 = rates.r1 + v2
    v3, r3_arg = _min_on_interval(f_div, rho1, _RHO_CAP, density, refine_tol)
    e3 = v3

    e = min(e1, e2, e3)
    for value, name, arg in ((e1, "E1", r1_arg), (e2, "E2", r2_arg),
                             (e3, "E3", r3_arg)):
        if value <= e + _BRANCH_TIE_TOL:
            branch, rho_star = name, arg
            break
    return GaussianOptimum(e=e, e1=e1, e2=e2, e3=e3, rho_star=rho_star,
                           sigma_z_star=sigma_z_star(rho_star, g),
                           active_branch=branch)
