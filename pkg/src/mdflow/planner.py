"""Capacity pre-allocation and epsilon-C curve sweeps.

The planner starts from C = max packet size and raises C one unit at a time
until blocking drops to the target (the faithful scan); an optional
bisection strategy exploits that blocking is non-increasing in C. For the
demand-law models (emlm, mdf, timevar) the distribution is solved once and
every candidate C is a tail query; the delay chain depends on C and is
re-solved per candidate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .emlm import EmlmParams, kaufman_roberts_solve
from .errors import InfeasibleError, InstabilityError
from .pmf import DEFAULT_TOL, Pmf, compound_poisson_pmf, tail_prob
from .sim import SimConfig, replication_demand_counts
from .stationary import MdfParams, Mode, implied_mu, stationary_pmf
from .timevar import DelayChainParams, TimevarParams, delay_blocking, elapsed_mixture

ModelParams = Union[EmlmParams, MdfParams, TimevarParams, DelayChainParams]


@dataclass(frozen=True)
class PlanRequest:
    """Capacity question: which model, tolerance alpha, blocking target epsilon.

    ``alpha`` here governs the plan; an ``alpha`` embedded in an
    :class:`EmlmParams` model is ignored. ``epsilon`` admits 1.0, which
    degenerates to the scan's starting capacity.
    """

    model: ModelParams
    alpha: float = 1.0
    epsilon: float = 0.01
    c_start: int | None = None
    mode: Mode = "consistent"

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")
        if not 0.0 < self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in (0, 1]")
        if self.c_start is not None and self.c_start < 1:
            raise ValueError("c_start must be >= 1")


def _demand_law(req: PlanRequest) -> Pmf | None:
    """Capacity-independent demand law, or None for the delay chain."""
    model = req.model
    if isinstance(model, EmlmParams):
        return kaufman_roberts_solve(model)
    if isinstance(model, MdfParams):
        return stationary_pmf(model, req.mode)
    if isinstance(model, TimevarParams):
        rate = model.lambda_per_user * model.population * (model.profile.horizon + 1)
        return compound_poisson_pmf(rate, elapsed_mixture(model.profile), DEFAULT_TOL)
    if isinstance(model, DelayChainParams):
        return None
    raise ValueError(f"unsupported model type {type(model).__name__}")


def _default_c_start(req: PlanRequest) -> int:
    model = req.model
    if isinstance(model, (EmlmParams, MdfParams)):
        return model.requirement.max_size
    if isinstance(model, TimevarParams):
        return max(1, elapsed_mixture(model.profile).support_max)
    return max(1, model.increment.support_max)


def blocking_at(req: PlanRequest, capacity: int) -> float:
    """Blocking probability of the request's model at one capacity."""
    law = _demand_law(req)
    if law is not None:
        return tail_prob(law, capacity / req.alpha)
    try:
        return delay_blocking(DelayChainParams(req.model.increment, capacity, req.alpha))
    except InstabilityError:
        return 1.0


def plan_capacity(req: PlanRequest, strategy: str = "linear") -> int:
    """Smallest capacity C >= c_start with blocking(C) <= epsilon."""
    if strategy not in ("linear", "bisect"):
        raise ValueError(f"unknown strategy {strategy!r}")
    c_start = req.c_start if req.c_start is not None else _default_c_start(req)
    law = _demand_law(req)

    if law is not None:
        if law.tail_mass > req.epsilon:
            raise InfeasibleError(
                f"epsilon {req.epsilon:g} lies below the truncation tail floor "
                f"{law.tail_mass:g}; re-solve with a tighter tolerance"
            )

        def blocking(c: int) -> float:
            return tail_prob(law, c / req.alpha)

        # blocking equals the tail floor once C/alpha clears the support
        c_limit = int(math.ceil(law.j_max * req.alpha)) + 1
    else:
        increment = req.model.increment

        def blocking(c: int) -> float:
            try:
                return delay_blocking(DelayChainParams(increment, c, req.alpha))
            except InstabilityError:
                return 1.0  # diverging backlog eventually overflows any threshold

        c_limit = max(c_start, increment.j_max) + 2

    if strategy == "linear":
        c = c_start
        while blocking(c) > req.epsilon:
            c += 1
            if c > c_limit:
                raise InfeasibleError(
                    f"no capacity up to {c_limit} meets epsilon {req.epsilon:g}"
                )
        return c

    # bisection: bracket a feasible capacity by doubling, then halve the gap
    if blocking(c_start) <= req.epsilon:
        return c_start
    lo, hi, step = c_start, c_start, 1
    while blocking(hi) > req.epsilon:
        lo = hi
        hi = min(hi + step, c_limit + 1)
        step *= 2
        if lo == hi:
            raise InfeasibleError(f"no capacity up to {c_limit} meets epsilon {req.epsilon:g}")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if blocking(mid) <= req.epsilon:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class SweepRow:
    """One capacity point of the epsilon-C curve."""

    capacity: int
    blocking_emlm: float | None
    blocking_mdf_consistent: float | None
    blocking_mdf_literal: float | None
    blocking_sim_mean: float | None = None
    blocking_sim_ci95: float | None = None


def sweep_curve(
    req: PlanRequest,
    c_grid: Sequence[int],
    with_simulation: bool = False,
    sim: SimConfig | None = None,
) -> list[SweepRow]:
    """Analytic (and optionally simulated) blocking across a capacity grid.

    An mdf model fills all three analytic columns (the loss-model column
    uses the service rate implied by the survival probability); an emlm
    model fills only its own. Simulation requires an mdf model; one
    trajectory per replication is reused across the whole grid because the
    tolerance dynamics do not depend on C.
    """
    grid = [int(c) for c in c_grid]
    if any(c < 1 for c in grid):
        raise ValueError("grid capacities must be >= 1")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly increasing")

    model = req.model
    if isinstance(model, MdfParams):
        emlm_params = EmlmParams(
            model.lambda_per_user, model.population, model.implied_mu, model.requirement
        )
        law_emlm = kaufman_roberts_solve(emlm_params)
        law_consistent = stationary_pmf(model, "consistent")
        law_literal = stationary_pmf(model, "literal")
    elif isinstance(model, EmlmParams):
        law_emlm = kaufman_roberts_solve(model)
        law_consistent = None
        law_literal = None
    else:
        raise ValueError("sweep_curve supports emlm and mdf models")

    sim_means: dict[int, float] = {}
    sim_half_widths: dict[int, float] = {}
    if with_simulation:
        if not isinstance(model, MdfParams):
            raise ValueError("simulation sweeps require an mdf model")
        template = sim if sim is not None else SimConfig(params=model)
        config = SimConfig(
            params=model,
            policy="tolerance",
            alpha=req.alpha,
            capacity=max(1, grid[0]),
            slots=template.slots,
            burn_in=template.burn_in,
            seed=template.seed,
            replications=template.replications,
            fixed_requirements=template.fixed_requirements,
        )
        counts_list, _ = replication_demand_counts(config)
        totals = [c.sum() for c in counts_list]
        for c in grid:
            start = int(math.floor(c / req.alpha)) + 1
            estimates = np.array(
                [cnt[start:].sum() / tot for cnt, tot in zip(counts_list, totals)]
            )
            sim_means[c] = float(estimates.mean())
            if len(estimates) >= 2:
                sim_half_widths[c] = (
                    1.96 * float(estimates.std(ddof=1)) / math.sqrt(len(estimates))
                )
            else:
                sim_half_widths[c] = math.inf

    rows = []
    for c in grid:
        threshold = c / req.alpha
        rows.append(
            SweepRow(
                capacity=c,
                blocking_emlm=tail_prob(law_emlm, threshold),
                blocking_mdf_consistent=(
                    tail_prob(law_consistent, threshold) if law_consistent is not None else None
                ),
                blocking_mdf_literal=(
                    tail_prob(law_literal, threshold) if law_literal is not None else None
                ),
                blocking_sim_mean=sim_means.get(c),
                blocking_sim_ci95=sim_half_widths.get(c),
            )
        )
    return rows
