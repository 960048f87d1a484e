"""HTTP front end: one POST endpoint per analysis, scenario as the payload.

Run with ``uvicorn mdflow.service.app:app``. Malformed scenarios return
422; infeasible or unstable models return 409.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import InfeasibleError, InstabilityError, NonConvergenceError, ScenarioError
from . import handlers
from .schemas import (
    BlockingReport,
    ConvergenceReport,
    DistributionReport,
    PlanReport,
    Scenario,
    SimReport,
    SweepReport,
)

app = FastAPI(
    title="mdflow",
    description="Blocking probability and capacity planning for multi-type data flow traffic",
    version="0.1.0",
)


@app.exception_handler(ScenarioError)
@app.exception_handler(ValueError)
async def _malformed(request: Request, exc: Exception) -> JSONResponse:
    return JSONResponse(status_code=422, content={"detail": str(exc)})


@app.exception_handler(InfeasibleError)
@app.exception_handler(InstabilityError)
@app.exception_handler(NonConvergenceError)
async def _unsolvable(request: Request, exc: Exception) -> JSONResponse:
    return JSONResponse(status_code=409, content={"detail": str(exc)})


@app.get("/healthz")
def healthz() -> dict[str, str]:
    return {"status": "ok"}


@app.post("/solve-emlm", response_model=DistributionReport)
def solve_emlm(scenario: Scenario) -> DistributionReport:
    return handlers.solve_emlm(scenario)


@app.post("/mdf-blocking", response_model=BlockingReport)
def mdf_blocking(scenario: Scenario) -> BlockingReport:
    return handlers.mdf_blocking(scenario)


@app.post("/timevar-blocking", response_model=BlockingReport)
def timevar_blocking(scenario: Scenario) -> BlockingReport:
    return handlers.timevar_blocking(scenario)


@app.post("/delay-blocking", response_model=BlockingReport)
def delay_blocking(scenario: Scenario) -> BlockingReport:
    return handlers.delay_blocking(scenario)


@app.post("/simulate", response_model=SimReport)
def simulate(scenario: Scenario) -> SimReport:
    return handlers.simulate(scenario)


@app.post("/plan", response_model=PlanReport)
def plan(scenario: Scenario) -> PlanReport:
    return handlers.plan(scenario)


@app.post("/sweep", response_model=SweepReport)
def sweep(scenario: Scenario) -> SweepReport:
    return handlers.sweep(scenario)


@app.post("/convergence", response_model=ConvergenceReport)
def convergence(scenario: Scenario) -> ConvergenceReport:
    return handlers.convergence(scenario)
