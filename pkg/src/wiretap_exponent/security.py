"""Rate-region structure of the exponent plane.

Splits (R1, R2) into the region where the exponent vanishes, the partially
secure band, and the fully secure region where E(R1, R2) = R1 - R2, i.e.
where the wiretap observation does not beat blind guessing among the
sub-codes.  Also provides the constructive sufficient bracket for full
security built from the unconstrained minimizer of D - I.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .channels import ChannelSpec, ConditionalChannel
from .exponent import ExponentSolver, RatePair

DEFAULT_CLASSIFY_TOL = 1e-6


@dataclass(frozen=True)
class SecurityAnalysis:
    """Quantities derived from the unconstrained minimizer of D - I.

    Attributes
    ----------
    q_star : ConditionalChannel
        A minimizer of D(Q||P|P_X) - I_Q(X;Z) (any one, if non-unique).
    i_qstar : float
        Mutual information of the returned minimizer.
    d_qstar : float
        Weighted divergence of the returned minimizer.
    i_p : float
        Mutual information of the true channel.
    e3_curve : callable
        Maps R1 to the third branch value E3(R1) (may return ``inf``).
    """

    q_star: ConditionalChannel
    i_qstar: float
    d_qstar: float
    i_p: float
    e3_curve: Callable[[float], float]


@dataclass(frozen=True)
class FullSecurityInterval:
    """Set of R2 values at fixed R1 for which E(R1, R2) = R1 - R2.

    ``lower``/``upper`` bound the computed interval [lower, upper) with
    ``upper = R1`` (the degenerate point R2 = R1, where both sides vanish,
    is excluded).  ``bracket_lower``/``bracket_upper`` give the sufficient
    construction [max(I_Q* - D*, R1 - E3(R1)), I_Q*], valid when
    ``bracket_valid``.  ``verified`` reports that re-computing the exponent
    at probe points inside the interval reproduced R1 - R2.
    """

    r1: float
    lower: float
    upper: float
    empty: bool
    bracket_lower: float
    bracket_upper: float
    bracket_valid: bool
    verified: bool


def _resolve(spec: ChannelSpec, solver: ExponentSolver | None,
             kwargs: dict) -> ExponentSolver:
    if solver is not None:
        return solver
    return ExponentSolver(spec, **kwargs)


def compute_qstar(spec: ChannelSpec, solver: ExponentSolver | None = None,
                  **kwargs) -> SecurityAnalysis:
    """Unconstrained minimizer of D - I and the derived region quantities."""
    sv = _resolve(spec, solver, kwargs)
    q, d, i = sv.inner_lagrangian_min(-1.0)

    def e3_curve(r1: float) -> float:
        if r1 > sv.i_max:
            return math.inf
        if r1 <= sv.i_p:
            return 0.0
        return sv.phi(r1)[0]

    return SecurityAnalysis(q_star=q, i_qstar=i, d_qstar=d, i_p=sv.i_p,
                            e3_curve=e3_curve)


def full_security_interval(spec: ChannelSpec, r1: float,
                           tol: float = DEFAULT_CLASSIFY_TOL,
                           solver: ExponentSolver | None = None,
                           **kwargs) -> FullSecurityInterval:
    """R2 interval at fixed R1 where the exponent equals R1 - R2.

    The interval is cut out by two monotone boundary conditions evaluated
    on the divergence/information trade-off curve: R2 >= R1 - E3(R1) and
    min{D - I : R2 <= I <= R1} >= -R2 (the latter reduces to
    R2 >= b - phi(b) with b = min(R1, I_max), because phi(I) - I is
    nonincreasing along the curve).  A verification pass recomputes the
    exponent at the lower endpoint and the midpoint.
    """
    if r1 <= 0:
        raise ValueError("r1 must be positive")
    sv = _resolve(spec, solver, kwargs)

    if r1 > sv.i_max:
        e3v = math.inf
    elif r1 <= sv.i_p:
        e3v = 0.0
    else:
        e3v = sv.phi(r1)[0]
    lower_e3 = -math.inf if math.isinf(e3v) else r1 - e3v

    if r1 >= sv.i_min:
        b = min(r1, sv.i_max)
        lower_e2 = b - sv.phi(b)[0]
    else:
        lower_e2 = 0.0     # the middle branch has no curve point below I_min

    lower = max(lower_e3, lower_e2, 0.0)
    upper = r1
    empty = not lower < upper

    bracket_lower = max(sv.i_max - sv.d_at_imax, lower_e3)
    bracket_upper = sv.i_max
    bracket_valid = (r1 > sv.i_max) and (bracket_lower <= bracket_upper)

    verified = False
    if not empty:
        probes = [lower, 0.5 * (lower + upper)]
        verified = all(
            abs(sv.exponent_rep1(RatePair(r1, p)).e - (r1 - p)) <= tol
            for p in probes)
    return FullSecurityInterval(r1=r1, lower=lower, upper=upper, empty=empty,
                                bracket_lower=bracket_lower,
                                bracket_upper=bracket_upper,
                                bracket_valid=bracket_valid,
                                verified=verified)


def classify_rate_point(spec: ChannelSpec, rates: RatePair,
                        tol: float = DEFAULT_CLASSIFY_TOL,
                        solver: ExponentSolver | None = None,
                        **kwargs) -> str:
    """Classify a rate pair as ``"ZERO"``, ``"PARTIAL"`` or ``"FULL"``.

    ZERO when E <= tol; FULL when E is within tol of R1 - R2 and that gap
    exceeds tol; PARTIAL otherwise.
    """
    sv = _resolve(spec, solver, kwargs)
    e = sv.exponent_rep1(rates).e
    if e <= tol:
        return "ZERO"
    if rates.r > tol and abs(e - rates.r) <= tol:
        return "FULL"
    return "PARTIAL"
