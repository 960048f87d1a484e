"""Discrete-time Monte Carlo simulation of the MDF community.

Per slot: a Poisson batch of users arrives, every active user independently
stays for the next slot with probability p, and every active user redraws
its packet requirement (a fixed-at-arrival mode mimics the classical loss
model instead). The tolerance policy blocks a slot when total demand
exceeds C / alpha; the delay policy carries unserved demand forward first.

Replications use independent, splittable seed streams so they can run in
any order and still aggregate to bit-identical results.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .pmf import Pmf
from .stationary import MdfParams

Policy = Literal["tolerance", "delay"]

# fixed vectorization granularity; part of the algorithm so that chunking
# never changes the consumed random stream
_CHUNK_SLOTS = 1 << 15


@dataclass(frozen=True)
class SimConfig:
    """One simulation request: system, policy, horizon and seeding."""

    params: MdfParams
    policy: Policy = "tolerance"
    alpha: float = 1.0
    capacity: int = 1
    slots: int = 100_000
    burn_in: int | None = None
    seed: int = 0
    replications: int = 1
    fixed_requirements: bool = False

    def __post_init__(self) -> None:
        if self.policy not in ("tolerance", "delay"):
            raise ValueError(f"unknown policy {self.policy!r}")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")
        if self.capacity < 1:
            raise ValueError("capacity must be >= 1")
        if self.slots < 1:
            raise ValueError("slots must be >= 1 (zero measured slots)")
        if self.burn_in is not None and self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")

    def resolved_burn_in(self) -> int:
        """Default burn-in of 20 mean holding times (20 / (1 - p) slots)."""
        if self.burn_in is not None:
            return self.burn_in
        return int(math.ceil(20.0 / (1.0 - self.params.stay_prob)))


@dataclass(frozen=True)
class SimResult:
    """Blocking estimate with confidence interval and the pooled empirical pmf."""

    blocking_estimate: float
    ci95_half_width: float
    empirical_pmf: Pmf
    slots_observed: int
    seed: int
    mean_active: float
    replication_estimates: tuple[float, ...]
    unstable: bool = False


def _replication_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def _draw_classes(rng: np.random.Generator, n: int, cum_probs: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(cum_probs, rng.random(n), side="right")
    return np.minimum(idx, len(cum_probs) - 1)


def _demand_series(config: SimConfig, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Per-slot total requirement and active-user count, slot 0 onwards."""
    params = config.params
    total = config.resolved_burn_in() + config.slots
    arrivals = rng.poisson(params.arrivals_per_slot, total)
    n_users = int(arrivals.sum())
    starts = np.repeat(np.arange(total, dtype=np.int64), arrivals)
    # geometric lifetime in slots (>= 1): still active g slots after arrival
    lifetimes = rng.geometric(1.0 - params.stay_prob, n_users) if n_users else np.zeros(0, np.int64)
    ends = np.minimum(starts + lifetimes, total)

    delta = np.zeros(total + 1, dtype=np.int64)
    np.add.at(delta, starts, 1)
    np.add.at(delta, ends, -1)
    active = np.cumsum(delta[:total])

    sizes = np.asarray(params.requirement.sizes, dtype=np.int64)
    cum_probs = np.cumsum(np.asarray(params.requirement.probs))

    if config.fixed_requirements:
        per_user = sizes[_draw_classes(rng, n_users, cum_probs)]
        wdelta = np.zeros(total + 1, dtype=np.int64)
        np.add.at(wdelta, starts, per_user)
        np.add.at(wdelta, ends, -per_user)
        demand = np.cumsum(wdelta[:total])
    else:
        bounds = np.concatenate(([0], np.cumsum(active)))
        demand = np.empty(total, dtype=np.int64)
        for lo in range(0, total, _CHUNK_SLOTS):
            hi = min(lo + _CHUNK_SLOTS, total)
            n_draws = int(bounds[hi] - bounds[lo])
            values = sizes[_draw_classes(rng, n_draws, cum_probs)]
            value_sums = np.concatenate(([0], np.cumsum(values)))
            seg = bounds[lo : hi + 1] - bounds[lo]
            demand[lo:hi] = value_sums[seg[1:]] - value_sums[seg[:-1]]
    return demand, active


def _lindley(demand: np.ndarray, capacity: int) -> np.ndarray:
    """Backlog series S(t) = max(0, S(t-1) - C) + D(t) from an empty start."""
    n = len(demand)
    g = np.empty(n + 1, dtype=np.int64)
    g[0] = 0
    g[1:] = np.cumsum(demand) - capacity * np.arange(1, n + 1, dtype=np.int64)
    running_min = np.minimum.accumulate(g[:-1])
    return g[1:] + capacity - running_min


@dataclass(frozen=True)
class _Replication:
    estimate: float
    counts: np.ndarray
    mean_active: float
    max_active: int
    half_means: tuple[float, float]


def _run_replication(config: SimConfig, index: int) -> _Replication:
    rng = _replication_rng(config.seed, index)
    demand, active = _demand_series(config, rng)
    series = demand if config.policy == "tolerance" else _lindley(demand, config.capacity)
    burn = config.resolved_burn_in()
    measured = series[burn:]
    threshold = config.capacity / config.alpha
    estimate = float((measured > threshold).mean())
    counts = np.bincount(measured)
    mid = len(measured) // 2
    halves = (float(measured[:mid].mean()) if mid else float(measured.mean()),
              float(measured[mid:].mean()))
    return _Replication(
        estimate=estimate,
        counts=counts,
        mean_active=float(active[burn:].mean()),
        max_active=int(active.max(initial=0)),
        half_means=halves,
    )


def _pooled_pmf(counts_list: list[np.ndarray]) -> Pmf:
    width = max(len(c) for c in counts_list)
    pooled = np.zeros(width, dtype=np.int64)
    for c in counts_list:
        pooled[: len(c)] += c
    return Pmf(pooled / pooled.sum())


def _drifting(reps: list[_Replication]) -> bool:
    diffs = np.array([r.half_means[1] - r.half_means[0] for r in reps])
    if len(diffs) >= 2:
        spread = float(diffs.std(ddof=1))
        if spread == 0.0:
            return float(diffs.mean()) > 0.0
        return float(diffs.mean()) > 4.0 * spread / math.sqrt(len(diffs))
    level = reps[0].half_means[0]
    return diffs[0] > 0.25 * (abs(level) + 1.0)


def _aggregate(config: SimConfig, reps: list[_Replication], unstable: bool) -> SimResult:
    estimates = np.array([r.estimate for r in reps])
    if len(reps) >= 2:
        half_width = 1.96 * float(estimates.std(ddof=1)) / math.sqrt(len(reps))
    else:
        warnings.warn("single replication: confidence interval is unbounded", stacklevel=3)
        half_width = math.inf
    if max(r.max_active for r in reps) > config.params.population:
        warnings.warn(
            "active users exceeded the community population; Poisson arrivals "
            "are a large-N approximation",
            stacklevel=3,
        )
    return SimResult(
        blocking_estimate=float(estimates.mean()),
        ci95_half_width=half_width,
        empirical_pmf=_pooled_pmf([r.counts for r in reps]),
        slots_observed=config.slots * len(reps),
        seed=config.seed,
        mean_active=float(np.mean([r.mean_active for r in reps])),
        replication_estimates=tuple(float(e) for e in estimates),
        unstable=unstable,
    )


def simulate_tolerance(config: SimConfig) -> SimResult:
    """Estimate blocking for the tolerance policy (overflow slots are lost)."""
    if config.policy != "tolerance":
        raise ValueError("config.policy must be 'tolerance'")
    reps = [_run_replication(config, r) for r in range(config.replications)]
    return _aggregate(config, reps, unstable=False)


def simulate_delay(config: SimConfig) -> SimResult:
    """Estimate blocking for the delay policy (unserved demand carries over).

    The result is flagged unstable when the mean per-slot demand reaches the
    capacity or the post-burn-in running mean still drifts upwards.
    """
    if config.policy != "delay":
        raise ValueError("config.policy must be 'delay'")
    params = config.params
    mean_demand = params.arrivals_per_slot / (1.0 - params.stay_prob) * params.requirement.mean()
    reps = [_run_replication(config, r) for r in range(config.replications)]
    unstable = mean_demand >= config.capacity or _drifting(reps)
    return _aggregate(config, reps, unstable=unstable)


def replication_demand_counts(config: SimConfig) -> tuple[list[np.ndarray], float]:
    """Per-replication histograms of the measured per-slot series.

    Shares the engine with :func:`simulate_tolerance` so that capacity
    sweeps can reuse one simulated trajectory per replication: under the
    tolerance policy the dynamics do not depend on the capacity, so blocking
    at every threshold is a tail query against these histograms.
    """
    reps = [_run_replication(config, r) for r in range(config.replications)]
    return [r.counts for r in reps], float(np.mean([r.mean_active for r in reps]))


def estimate_blocking(results: Sequence[SimResult]) -> tuple[float, float]:
    """Replication mean and normal-approximation 95% half-width."""
    if not results:
        raise ValueError("need at least one result")
    means = np.array([r.blocking_estimate for r in results])
    if len(means) == 1:
        warnings.warn("single replication: confidence interval is unbounded", stacklevel=2)
        return float(means[0]), math.inf
    return float(means.mean()), 1.96 * float(means.std(ddof=1)) / math.sqrt(len(means))
