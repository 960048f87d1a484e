"""Stationary analysis of the discrete-time MDF(lambda, p, t_s) community.

An MDF community sees Poisson arrivals of ``lambda * t_s * N`` users per
slot; each active user stays one more slot with probability ``p`` and
redraws its packet requirement independently every slot. The stationary
total requirement is compound Poisson. Two rate conventions are provided:

* ``consistent`` -- rate ``lambda * t_s * N / (1 - p)``, the exact
  stationary law of the slot chain (geometric lifetimes).
* ``literal`` -- rate ``lambda * t_s * N * (1 - p * t_s / ln p)``, the
  printed closed form; it vanishes as ``t_s -> 0`` under a fixed service
  rate, so it cannot approach the continuous-time loss model. Both are
  surfaced side by side by :func:`convergence_report` rather than silently
  choosing one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

from .emlm import EmlmParams, emlm_blocking
from .pmf import DEFAULT_TOL, Pmf, RequirementDistribution, compound_poisson_pmf, tail_prob

Mode = Literal["consistent", "literal"]


@dataclass(frozen=True)
class MdfParams:
    """MDF(lambda, p, t_s) community with N potential users."""

    lambda_per_user: float
    population: int
    slot: float
    stay_prob: float
    requirement: RequirementDistribution

    def __post_init__(self) -> None:
        if self.lambda_per_user <= 0:
            raise ValueError("lambda_per_user must be > 0")
        if self.population < 1:
            raise ValueError("population must be >= 1")
        if self.slot <= 0:
            raise ValueError("slot must be > 0")
        if not 0.0 < self.stay_prob < 1.0:
            raise ValueError("stay_prob must lie strictly in (0, 1)")
        if not math.isfinite(self.arrivals_per_slot):
            raise ValueError("lambda * t_s * N must be finite")

    @property
    def arrivals_per_slot(self) -> float:
        return self.lambda_per_user * self.slot * self.population

    @property
    def implied_mu(self) -> float:
        """Continuous service rate matching the slot survival probability."""
        return implied_mu(self.stay_prob, self.slot)


def slot_survival_prob(mu: float, slot: float) -> float:
    """Probability an exponential(mu) holding time outlives one slot."""
    if mu <= 0:
        raise ValueError("mu must be > 0")
    if slot <= 0:
        raise ValueError("slot must be > 0")
    return math.exp(-mu * slot)


def implied_mu(stay_prob: float, slot: float) -> float:
    """Inverse of :func:`slot_survival_prob`: mu = -ln(p) / t_s."""
    if not 0.0 < stay_prob < 1.0:
        raise ValueError("stay_prob must lie strictly in (0, 1)")
    if slot <= 0:
        raise ValueError("slot must be > 0")
    return -math.log(stay_prob) / slot


def _rate(params: MdfParams, mode: Mode) -> float:
    lam_slot = params.arrivals_per_slot
    p = params.stay_prob
    if mode == "consistent":
        return lam_slot / (1.0 - p)
    if mode == "literal":
        return lam_slot * (1.0 - p * params.slot / math.log(p))
    raise ValueError(f"unknown mode {mode!r}")


def stationary_pmf(params: MdfParams, mode: Mode = "consistent", tol: float = DEFAULT_TOL) -> Pmf:
    """Stationary law of the total requirement, a compound Poisson pmf."""
    cap = params.population * params.requirement.max_size
    return compound_poisson_pmf(_rate(params, mode), params.requirement, tol, max_support=cap)


def blocking_prob(
    params: MdfParams,
    capacity: int,
    alpha: float = 1.0,
    mode: Mode = "consistent",
    tol: float = DEFAULT_TOL,
) -> float:
    """P(S > capacity / alpha) under the stationary law."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    if capacity < 0:
        raise ValueError("capacity must be >= 0")
    return tail_prob(stationary_pmf(params, mode, tol), capacity / alpha)


@dataclass(frozen=True)
class ConvergencePoint:
    """Blocking gap between the slot model and the continuous loss model at one slot width."""

    slot: float
    stay_prob: float
    blocking_emlm: float
    blocking_consistent: float
    blocking_literal: float
    delta_consistent: float
    delta_literal: float


def convergence_report(
    lambda_per_user: float,
    mu: float,
    population: int,
    requirement: RequirementDistribution,
    slots: Sequence[float],
    capacity: int,
    alpha: float = 1.0,
) -> list[ConvergencePoint]:
    """Blocking gap delta(t_s) for a decreasing sequence of slot widths.

    For each slot width the survival probability is ``p = exp(-mu * t_s)``
    and ``delta = |P(S_mdf > C/alpha) - P(S_emlm > C/alpha)|``; both rate
    conventions are reported.
    """
    slot_list = [float(s) for s in slots]
    if not slot_list:
        raise ValueError("need at least one slot width")
    if any(s <= 0 for s in slot_list):
        raise ValueError("slot widths must be > 0")
    if any(s2 >= s1 for s1, s2 in zip(slot_list, slot_list[1:])):
        raise ValueError("slot widths must be strictly decreasing")

    reference = emlm_blocking(
        EmlmParams(lambda_per_user, population, mu, requirement, alpha, capacity)
    )
    points = []
    for t_s in slot_list:
        p = slot_survival_prob(mu, t_s)
        params = MdfParams(lambda_per_user, population, t_s, p, requirement)
        b_cons = blocking_prob(params, capacity, alpha, "consistent")
        b_lit = blocking_prob(params, capacity, alpha, "literal")
        points.append(
            ConvergencePoint(
                slot=t_s,
                stay_prob=p,
                blocking_emlm=reference,
                blocking_consistent=b_cons,
                blocking_literal=b_lit,
                delta_consistent=abs(b_cons - reference),
                delta_literal=abs(b_lit - reference),
            )
        )
    return points
