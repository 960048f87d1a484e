"""Teletraffic analysis for multi-type data flow (MDF) communities.

Exact solvers for the multirate loss model, the stationary slot chain and
the carry-over delay chain, a seeded Monte Carlo simulator that validates
them, and a capacity planner, behind a CLI and an HTTP service.
"""

from .emlm import EmlmParams, default_j_max, emlm_blocking, kaufman_roberts_solve
from .errors import (
    InfeasibleError,
    InstabilityError,
    MdflowError,
    NonConvergenceError,
    ScenarioError,
)
from .planner import PlanRequest, SweepRow, blocking_at, plan_capacity, sweep_curve
from .pmf import (
    Pmf,
    RequirementDistribution,
    compound_poisson_pmf,
    convolve,
    mixture_pmf,
    poisson_pmf,
    tail_prob,
)
from .sim import SimConfig, SimResult, estimate_blocking, simulate_delay, simulate_tolerance
from .stationary import (
    ConvergencePoint,
    MdfParams,
    blocking_prob,
    convergence_report,
    implied_mu,
    slot_survival_prob,
    stationary_pmf,
)
from .timevar import (
    DelayChainParams,
    TimevarParams,
    TimeVaryingProfile,
    delay_blocking,
    delay_bruteforce_oracle,
    delay_stationary,
    delay_transition,
    elapsed_mixture,
    enumerated_blocking,
    nontolerance_blocking,
    tolerance_blocking,
)

__all__ = [
    "ConvergencePoint",
    "DelayChainParams",
    "EmlmParams",
    "InfeasibleError",
    "InstabilityError",
    "MdfParams",
    "MdflowError",
    "NonConvergenceError",
    "PlanRequest",
    "Pmf",
    "RequirementDistribution",
    "ScenarioError",
    "SimConfig",
    "SimResult",
    "SweepRow",
    "TimeVaryingProfile",
    "TimevarParams",
    "blocking_at",
    "blocking_prob",
    "compound_poisson_pmf",
    "convergence_report",
    "convolve",
    "default_j_max",
    "delay_blocking",
    "delay_bruteforce_oracle",
    "delay_stationary",
    "delay_transition",
    "elapsed_mixture",
    "emlm_blocking",
    "enumerated_blocking",
    "estimate_blocking",
    "implied_mu",
    "kaufman_roberts_solve",
    "mixture_pmf",
    "nontolerance_blocking",
    "plan_capacity",
    "poisson_pmf",
    "simulate_delay",
    "simulate_tolerance",
    "slot_survival_prob",
    "stationary_pmf",
    "sweep_curve",
    "tail_prob",
    "tolerance_blocking",
]

__version__ = "0.1.0"
