"""Erlang Multirate Loss Model: occupancy recursion and tolerance blocking.

The steady state solves ``j * q(j) = sum_k rho_k * b_k * q(j - b_k)`` with
``rho_k = lambda * N * a_k / mu``, seeded at ``q(0)`` and normalized over the
stored support at the end. Values off the lattice spanned by the packet
sizes stay exactly zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pmf import DEFAULT_TOL, Pmf, RequirementDistribution, compound_poisson_pmf, tail_prob

# unnormalized recursion values grow super-exponentially with the load;
# rescale before they overflow double range
_RESCALE_THRESHOLD = 1e100


@dataclass(frozen=True)
class EmlmParams:
    """System description: per-user arrival rate, population, service rate,
    packet-size law, tolerance threshold and installed capacity."""

    lambda_per_user: float
    population: int
    mu: float
    requirement: RequirementDistribution
    alpha: float = 1.0
    capacity: int = 1

    def __post_init__(self) -> None:
        if self.lambda_per_user <= 0:
            raise ValueError("lambda_per_user must be > 0")
        if self.population < 1:
            raise ValueError("population must be >= 1")
        if self.mu <= 0:
            raise ValueError("mu must be > 0")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")
        # capacity 0 is admitted so that blocking degenerates to P(S > 0)
        if self.capacity < 0:
            raise ValueError("capacity must be >= 0")

    @property
    def offered_load(self) -> float:
        """Total offered load lambda * N / mu."""
        return self.lambda_per_user * self.population / self.mu

    @property
    def class_loads(self) -> tuple[float, ...]:
        """Per-class loads rho_k = lambda * N * a_k / mu."""
        return tuple(self.offered_load * a for _, a in self.requirement.atoms)


def default_j_max(params: EmlmParams, tol: float = DEFAULT_TOL) -> int:
    """Smallest support bound with compound-Poisson tail below ``tol``,
    capped at ``population * max_k b_k``."""
    cap = params.population * params.requirement.max_size
    law = compound_poisson_pmf(params.offered_load, params.requirement, tol, max_support=cap)
    return law.j_max


def kaufman_roberts_solve(
    params: EmlmParams,
    j_max: int | None = None,
    q0: float = 1.0,
) -> Pmf:
    """Solve the occupancy recursion on ``0..j_max`` and normalize.

    ``q0`` seeds the recursion; the normalized output does not depend on it
    (any positive seed gives the same distribution). Running values are
    rescaled whenever they threaten double overflow.
    """
    if j_max is None:
        j_max = default_j_max(params)
    max_b = params.requirement.max_size
    if j_max < max_b:
        raise ValueError(f"j_max must be >= max packet size {max_b}, got {j_max}")
    if j_max > params.population * max_b:
        raise ValueError("j_max exceeds population * max packet size")
    if q0 <= 0 or not math.isfinite(q0):
        raise ValueError("q0 must be positive and finite")

    loads = params.class_loads
    sizes = params.requirement.sizes
    weights = [rho * b for rho, b in zip(loads, sizes)]

    q = np.zeros(j_max + 1)
    q[0] = q0
    log_scale = 0.0
    for j in range(1, j_max + 1):
        acc = 0.0
        for b, w in zip(sizes, weights):
            if b <= j:
                acc += w * q[j - b]
        q[j] = acc / j
        if q[j] > _RESCALE_THRESHOLD:
            q[: j + 1] /= _RESCALE_THRESHOLD
            log_scale += math.log(_RESCALE_THRESHOLD)
    total = q.sum()
    return Pmf(q / total)


def emlm_blocking(params: EmlmParams, j_max: int | None = None) -> float:
    """Tolerance blocking probability P(S > C / alpha) of the steady state."""
    q = kaufman_roberts_solve(params, j_max)
    return tail_prob(q, params.capacity / params.alpha)
