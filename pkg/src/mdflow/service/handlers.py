"""Dispatch validated scenarios to the core solvers.

Both the HTTP endpoints and the CLI subcommands call these functions, so a
scenario produces the same report regardless of the front end.
"""

from __future__ import annotations

from .. import sim as sim_mod
from .. import timevar as timevar_mod
from ..emlm import emlm_blocking, kaufman_roberts_solve
from ..errors import ScenarioError
from ..planner import PlanRequest, blocking_at, plan_capacity, sweep_curve
from ..stationary import blocking_prob, convergence_report
from .schemas import (
    BlockingReport,
    ConvergenceReport,
    ConvergenceRow,
    DelayModel,
    DistributionReport,
    EmlmModel,
    MdfModel,
    PlanReport,
    PmfPayload,
    Scenario,
    SimReport,
    SweepReport,
    SweepRowReport,
    TimevarModel,
)


def _require_model(scenario: Scenario, kind: type, what: str):
    if not isinstance(scenario.model, kind):
        raise ScenarioError(
            f"{what} requires a {kind.model_fields['kind'].default!r} model, "
            f"got {scenario.model.kind!r}"
        )
    return scenario.model


def _require_capacity(scenario: Scenario) -> int:
    if scenario.policy.capacity is None:
        raise ScenarioError("policy.capacity is required for this command")
    return scenario.policy.capacity


def parse_grid(grid) -> list[int]:
    """Accept an explicit list or an inclusive ``start:stop:step`` string."""
    if grid is None:
        raise ScenarioError("run.grid is required for this command")
    if isinstance(grid, list):
        return [int(c) for c in grid]
    parts = grid.split(":")
    if len(parts) != 3:
        raise ScenarioError(f"grid must look like start:stop:step, got {grid!r}")
    try:
        start, stop, step = (int(p) for p in parts)
    except ValueError as exc:
        raise ScenarioError(f"grid must contain integers: {grid!r}") from exc
    if step < 1 or stop < start:
        raise ScenarioError(f"grid must be increasing with step >= 1: {grid!r}")
    return list(range(start, stop + 1, step))


def solve_emlm(scenario: Scenario) -> DistributionReport:
    model = _require_model(scenario, EmlmModel, "solve-emlm")
    capacity = _require_capacity(scenario)
    params = model.to_params(scenario.policy.alpha, capacity)
    law = kaufman_roberts_solve(params)
    return DistributionReport(
        j_max=law.j_max,
        masses=[float(x) for x in law.masses],
        tail_mass=law.tail_mass,
        mean=law.mean(),
        capacity=capacity,
        alpha=scenario.policy.alpha,
        blocking=emlm_blocking(params),
    )


def mdf_blocking(scenario: Scenario) -> BlockingReport:
    model = _require_model(scenario, MdfModel, "mdf-blocking")
    capacity = _require_capacity(scenario)
    value = blocking_prob(model.to_params(), capacity, scenario.policy.alpha, model.mode)
    return BlockingReport(
        blocking=value,
        method=f"mdf-{model.mode}",
        capacity=capacity,
        alpha=scenario.policy.alpha,
    )


def timevar_blocking(scenario: Scenario) -> BlockingReport:
    model = _require_model(scenario, TimevarModel, "timevar-blocking")
    capacity = _require_capacity(scenario)
    params = model.to_params()
    value = timevar_mod.tolerance_blocking(
        params.lambda_per_user,
        params.population,
        params.profile,
        capacity,
        scenario.policy.alpha,
    )
    return BlockingReport(
        blocking=value,
        method="timevar",
        capacity=capacity,
        alpha=scenario.policy.alpha,
    )


def delay_blocking(scenario: Scenario) -> BlockingReport:
    model = _require_model(scenario, DelayModel, "delay-blocking")
    capacity = _require_capacity(scenario)
    params = model.to_params(capacity, scenario.policy.alpha)
    return BlockingReport(
        blocking=timevar_mod.delay_blocking(params),
        method="delay-chain",
        capacity=capacity,
        alpha=scenario.policy.alpha,
    )


def simulate(scenario: Scenario) -> SimReport:
    model = _require_model(scenario, MdfModel, "simulate")
    capacity = _require_capacity(scenario)
    config = sim_mod.SimConfig(
        params=model.to_params(),
        policy=scenario.policy.policy,
        alpha=scenario.policy.alpha,
        capacity=capacity,
        slots=scenario.run.slots,
        burn_in=scenario.run.burn_in,
        seed=scenario.run.seed,
        replications=scenario.run.replications,
        fixed_requirements=scenario.run.fixed_requirements,
    )
    if config.policy == "delay":
        result = sim_mod.simulate_delay(config)
    else:
        result = sim_mod.simulate_tolerance(config)
    return SimReport(
        blocking_estimate=result.blocking_estimate,
        ci95_half_width=result.ci95_half_width,
        slots_observed=result.slots_observed,
        seed=result.seed,
        mean_active=result.mean_active,
        unstable=result.unstable,
        policy=config.policy,
        replication_estimates=list(result.replication_estimates),
        empirical_pmf=PmfPayload.from_pmf(result.empirical_pmf),
    )


def _plan_request(scenario: Scenario) -> PlanRequest:
    if scenario.policy.epsilon is None:
        raise ScenarioError("policy.epsilon is required for plan")
    model = scenario.model
    if isinstance(model, EmlmModel):
        core = model.to_params(scenario.policy.alpha, 1)
        mode = "consistent"
    elif isinstance(model, MdfModel):
        core = model.to_params()
        mode = model.mode
    elif isinstance(model, TimevarModel):
        core = model.to_params()
        mode = "consistent"
    else:
        # capacity in the chain params is a placeholder; the planner varies it
        core = model.to_params(1, scenario.policy.alpha)
        mode = "consistent"
    return PlanRequest(
        model=core,
        alpha=scenario.policy.alpha,
        epsilon=scenario.policy.epsilon,
        mode=mode,
    )


def plan(scenario: Scenario) -> PlanReport:
    req = _plan_request(scenario)
    capacity = plan_capacity(req)
    return PlanReport(
        capacity=capacity,
        blocking=blocking_at(req, capacity),
        epsilon=scenario.policy.epsilon,
        alpha=scenario.policy.alpha,
        model=scenario.model.kind,
    )


def sweep(scenario: Scenario) -> SweepReport:
    model = scenario.model
    if not isinstance(model, (EmlmModel, MdfModel)):
        raise ScenarioError("sweep requires an emlm or mdf model")
    grid = parse_grid(scenario.run.grid)
    if isinstance(model, EmlmModel):
        core = model.to_params(scenario.policy.alpha, 1)
        mode = "consistent"
    else:
        core = model.to_params()
        mode = model.mode
    req = PlanRequest(
        model=core,
        alpha=scenario.policy.alpha,
        epsilon=scenario.policy.epsilon if scenario.policy.epsilon is not None else 1.0,
        mode=mode,
    )
    template = None
    if scenario.run.with_simulation:
        if not isinstance(model, MdfModel):
            raise ScenarioError("simulation sweeps require an mdf model")
        template = sim_mod.SimConfig(
            params=core,
            policy="tolerance",
            alpha=scenario.policy.alpha,
            capacity=max(1, grid[0]),
            slots=scenario.run.slots,
            burn_in=scenario.run.burn_in,
            seed=scenario.run.seed,
            replications=scenario.run.replications,
            fixed_requirements=scenario.run.fixed_requirements,
        )
    rows = sweep_curve(req, grid, with_simulation=scenario.run.with_simulation, sim=template)
    return SweepReport(
        mode=mode,
        rows=[
            SweepRowReport(
                capacity=r.capacity,
                blocking_emlm=r.blocking_emlm,
                blocking_mdf_consistent=r.blocking_mdf_consistent,
                blocking_mdf_literal=r.blocking_mdf_literal,
                blocking_sim_mean=r.blocking_sim_mean,
                blocking_sim_ci95=r.blocking_sim_ci95,
            )
            for r in rows
        ],
    )


def convergence(scenario: Scenario) -> ConvergenceReport:
    model = _require_model(scenario, MdfModel, "convergence")
    if model.mu is None:
        raise ScenarioError("convergence requires the mdf model to specify mu")
    if scenario.run.slot_grid is None:
        raise ScenarioError("run.slot_grid is required for convergence")
    capacity = _require_capacity(scenario)
    points = convergence_report(
        model.lambda_per_user,
        model.mu,
        model.population,
        _requirement(model),
        scenario.run.slot_grid,
        capacity,
        scenario.policy.alpha,
    )
    return ConvergenceReport(
        rows=[
            ConvergenceRow(
                slot=p.slot,
                stay_prob=p.stay_prob,
                blocking_emlm=p.blocking_emlm,
                blocking_mdf_consistent=p.blocking_consistent,
                blocking_mdf_literal=p.blocking_literal,
                delta_consistent=p.delta_consistent,
                delta_literal=p.delta_literal,
            )
            for p in points
        ]
    )


def _requirement(model: MdfModel):
    return model.to_params().requirement
