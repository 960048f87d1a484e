"""Blocking under elapsed-time-dependent requirements, plus the delay chain.

Users arrive in Poisson batches of ``lambda * N`` per slot and stay at most
``T + 1`` slots; a user whose service started ``s`` slots ago draws its
requirement from the law W(s). Early completion is encoded by mass at zero
inside W(s). Because the elapsed times of the users present at a slot are
i.i.d. uniform on 0..T, the total demand is compound Poisson with rate
``lambda * N * (T + 1)`` and jump law ``mean(W(0..T))`` -- that identity is
the production path, while :func:`enumerated_blocking` keeps the literal
double sum (Poisson count times elapsed-time vectors) for desk-scale
cross-checks.

The delay policy carries unserved demand forward,
``S(t) = max(0, S(t-1) - C) + D(t)``; with i.i.d. per-slot increments this
is a Markov chain solved to its fixed point by :func:`delay_stationary`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import InstabilityError, NonConvergenceError
from .pmf import DEFAULT_TOL, Pmf, compound_poisson_pmf, convolve, mixture_pmf, tail_prob

_STATE_TAIL_TOL = 1e-10


@dataclass(frozen=True)
class TimeVaryingProfile:
    """Requirement laws W(0..T) indexed by elapsed service time."""

    horizon: int
    laws: tuple[Pmf, ...]

    def __post_init__(self) -> None:
        if self.horizon < 0:
            raise ValueError("horizon must be >= 0")
        laws = tuple(self.laws)
        if len(laws) != self.horizon + 1:
            raise ValueError(
                f"expected {self.horizon + 1} laws for horizon {self.horizon}, got {len(laws)}"
            )
        object.__setattr__(self, "laws", laws)


@dataclass(frozen=True)
class TimevarParams:
    """Arrival side of the time-varying model (used by planner and service)."""

    lambda_per_user: float
    population: int
    profile: TimeVaryingProfile

    def __post_init__(self) -> None:
        if self.lambda_per_user <= 0:
            raise ValueError("lambda_per_user must be > 0")
        if self.population < 1:
            raise ValueError("population must be >= 1")


def elapsed_mixture(profile: TimeVaryingProfile) -> Pmf:
    """Uniform mixture over elapsed times: the per-user marginal requirement."""
    n = profile.horizon + 1
    return mixture_pmf(profile.laws, [1.0 / n] * n)


def nontolerance_blocking(
    lambda_per_user: float,
    population: int,
    profile: TimeVaryingProfile,
    capacity: int,
    tol: float = DEFAULT_TOL,
) -> float:
    """P(total demand > capacity) for the loss-on-overflow policy."""
    rate = lambda_per_user * population * (profile.horizon + 1)
    law = compound_poisson_pmf(rate, elapsed_mixture(profile), tol)
    return tail_prob(law, capacity)


def tolerance_blocking(
    lambda_per_user: float,
    population: int,
    profile: TimeVaryingProfile,
    capacity: int,
    alpha: float,
    tol: float = DEFAULT_TOL,
) -> float:
    """Blocking with compression tolerance: the threshold stretches to C / alpha."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    rate = lambda_per_user * population * (profile.horizon + 1)
    law = compound_poisson_pmf(rate, elapsed_mixture(profile), tol)
    return tail_prob(law, capacity / alpha)


def _convolve_masses(arrays: list[np.ndarray]) -> np.ndarray:
    if not arrays:
        return np.ones(1)
    return reduce(np.convolve, arrays)


def enumerated_blocking(
    lambda_per_user: float,
    population: int,
    profile: TimeVaryingProfile,
    threshold: float,
    k_max: int,
) -> float:
    """Literal double sum over user counts and elapsed-time vectors.

    Exponential in ``k_max``; kept as the desk-scale cross-check of the
    compound-Poisson reduction. The Poisson sum over counts is truncated at
    ``k_max``, so the result undershoots by at most the truncated mass.
    """
    if k_max < 1 or k_max > 10:
        raise ValueError("k_max must lie in 1..10")
    t_count = profile.horizon + 1
    rate_n = lambda_per_user * population
    total_rate = rate_n * t_count
    laws = [law.masses for law in profile.laws]

    conv_cache: dict[tuple[int, ...], np.ndarray] = {}
    blocked = 0.0
    for k in range(1, k_max + 1):
        poisson_factor = math.exp(-total_rate) * rate_n**k / math.factorial(k)
        vector_sum = 0.0
        for vec in np.ndindex(*([t_count] * k)):
            key = tuple(sorted(vec))
            dist = conv_cache.get(key)
            if dist is None:
                dist = _convolve_masses([laws[s] for s in key])
                conv_cache[key] = dist
            start = int(math.floor(threshold)) + 1 if threshold >= 0 else 0
            vector_sum += float(dist[start:].sum())
        blocked += poisson_factor * vector_sum
    return blocked


@dataclass(frozen=True)
class DelayChainParams:
    """Carry-over chain: per-slot demand increment, capacity, tolerance."""

    increment: Pmf
    capacity: int
    alpha: float = 1.0

    def __post_init__(self) -> None:
        if self.capacity < 1:
            raise ValueError("capacity must be >= 1")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")


def _drain(masses: np.ndarray, capacity: int) -> np.ndarray:
    """Backlog left after serving ``capacity`` units: mass of max(0, j - C)."""
    if capacity >= len(masses) - 1:
        return np.array([masses.sum()])
    out = np.zeros(len(masses) - capacity)
    out[0] = masses[: capacity + 1].sum()
    out[1:] = masses[capacity + 1 :]
    return out


def delay_transition(state_pmf: Pmf, params: DelayChainParams) -> Pmf:
    """One slot of the carry-over chain: drain C units, add a fresh increment."""
    drained = Pmf(_drain(state_pmf.masses, params.capacity), state_pmf.tail_mass)
    return convolve(drained, params.increment)


def _tv_distance(a: Pmf, b: Pmf) -> float:
    width = max(len(a.masses), len(b.masses))
    pa = np.zeros(width)
    pb = np.zeros(width)
    pa[: len(a.masses)] = a.masses
    pb[: len(b.masses)] = b.masses
    return 0.5 * (float(np.abs(pa - pb).sum()) + abs(a.tail_mass - b.tail_mass))


def delay_stationary(
    params: DelayChainParams,
    tol: float = 1e-9,
    max_iters: int = 20000,
) -> Pmf:
    """Fixed point of :func:`delay_transition`, iterated from an empty backlog.

    Raises :class:`InstabilityError` when the mean increment reaches the
    capacity (no stationary distribution exists) and
    :class:`NonConvergenceError` when successive iterates fail to come
    within ``tol`` total variation inside ``max_iters`` slots.
    """
    mean_inc = params.increment.mean()
    if mean_inc >= params.capacity:
        raise InstabilityError(
            f"mean increment {mean_inc:.6g} >= capacity {params.capacity}; chain is unstable"
        )
    # the support cut must sit below the requested tolerance or the iteration
    # stalls at the truncation floor
    cut = min(_STATE_TAIL_TOL, 0.1 * tol)
    state = Pmf.point(0)
    for _ in range(max_iters):
        nxt = delay_transition(state, params).truncated(cut)
        if _tv_distance(state, nxt) < tol:
            return nxt
        state = nxt
    raise NonConvergenceError(f"delay chain not converged after {max_iters} iterations")


def delay_blocking(
    params: DelayChainParams,
    tol: float = 1e-9,
    max_iters: int = 20000,
) -> float:
    """Stationary P(backlog > C / alpha) of the carry-over chain."""
    return tail_prob(delay_stationary(params, tol, max_iters), params.capacity / params.alpha)


def delay_bruteforce_oracle(
    lambda_per_user: float,
    population: int,
    profile: TimeVaryingProfile,
    capacity: int,
    alpha: float,
    t: int,
    k_max: int,
) -> float:
    """Exact delay blocking at slot ``t`` by the recursive expansion.

    Enumerates the elapsed-time vector of the users present at slot ``t``
    and conditions backwards one slot at a time: the users seen one slot
    earlier are the same ones aged by one plus a Poisson number that were
    then in their final slot. The recursion bottoms out at slot 0 where
    every user is new. Exponential cost, hence the tight size limits; all
    Poisson sums are truncated at ``k_max``.
    """
    horizon = profile.horizon
    if t < 0 or t > 6:
        raise ValueError("t must lie in 0..6")
    if horizon > 2:
        raise ValueError("profile horizon must be <= 2")
    if k_max < 1 or k_max > 8:
        raise ValueError("k_max must lie in 1..8")
    rate_n = lambda_per_user * population
    if rate_n * (horizon + 1) > 1.0 + 1e-12:
        raise ValueError("lambda * N * (T + 1) must be <= 1 for the oracle")
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")

    laws = [law.masses for law in profile.laws]
    pois = [math.exp(-rate_n) * rate_n**j / math.factorial(j) for j in range(k_max + 1)]
    memo: dict[tuple[int, tuple[int, ...]], np.ndarray] = {}

    def new_demand(elapsed: tuple[int, ...]) -> np.ndarray:
        return _convolve_masses([laws[s] for s in elapsed])

    def dist(u: int, elapsed: tuple[int, ...]) -> np.ndarray:
        key = (u, elapsed)
        found = memo.get(key)
        if found is not None:
            return found
        demand = new_demand(elapsed)
        if u == 0:
            memo[key] = demand
            return demand
        aged = tuple(s - 1 for s in elapsed if s >= 1)
        if u - 1 >= horizon:
            weighted = [(pois[j], tuple(sorted(aged + (horizon,) * j))) for j in range(k_max + 1)]
        else:
            # no user can already be in its final slot this early
            weighted = [(1.0, aged)]
        parts = [(w, dist(u - 1, prev)) for w, prev in weighted]
        width = max(len(d) for _, d in parts)
        mixed = np.zeros(width)
        for w, d in parts:
            mixed[: len(d)] += w * d
        result = np.convolve(_drain(mixed, capacity), demand)
        memo[key] = result
        return result

    m_t = min(t, horizon) + 1
    threshold = capacity / alpha
    start = int(math.floor(threshold)) + 1
    blocked = 0.0
    for k in range(0, k_max + 1):
        factor = math.exp(-rate_n * m_t) * rate_n**k / math.factorial(k)
        if factor == 0.0:
            continue
        vector_sum = 0.0
        for vec in np.ndindex(*([m_t] * k)):
            law = dist(t, tuple(sorted(vec)))
            vector_sum += float(law[start:].sum())
        blocked += factor * vector_sum
    return blocked
