"""Request and response models for the HTTP service and the CLI.

A :class:`Scenario` is the single request payload: the YAML scenario file
accepted by the CLI has exactly this shape, so posting a parsed scenario to
the service and running the CLI on the file produce the same reports.
Every structural invariant is enforced here, before any computation runs.
"""

from __future__ import annotations

from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..emlm import EmlmParams
from ..pmf import Pmf, RequirementDistribution, compound_poisson_pmf
from ..stationary import MdfParams, slot_survival_prob
from ..timevar import DelayChainParams, TimevarParams, TimeVaryingProfile

_SUM_SLACK = 1e-12


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class RequirementAtom(_Strict):
    size: int = Field(ge=1)
    prob: float = Field(gt=0)


class LawAtom(_Strict):
    """Atom of a requirement law that may include zero (early completion)."""

    value: int = Field(ge=0)
    prob: float = Field(gt=0)


def _to_requirement(atoms: list[RequirementAtom]) -> RequirementDistribution:
    return RequirementDistribution(tuple((a.size, a.prob) for a in atoms))


def _check_requirement(atoms: list[RequirementAtom]) -> None:
    sizes = [a.size for a in atoms]
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("requirement sizes must be strictly increasing")
    total = sum(a.prob for a in atoms)
    if abs(total - 1.0) > _SUM_SLACK:
        raise ValueError(f"requirement probabilities must sum to 1, got {total}")


class EmlmModel(_Strict):
    kind: Literal["emlm"] = "emlm"
    lambda_per_user: float = Field(gt=0)
    population: int = Field(ge=1)
    mu: float = Field(gt=0)
    requirement: list[RequirementAtom] = Field(min_length=1)

    @model_validator(mode="after")
    def _validate(self) -> "EmlmModel":
        _check_requirement(self.requirement)
        return self

    def to_params(self, alpha: float, capacity: int) -> EmlmParams:
        return EmlmParams(
            self.lambda_per_user,
            self.population,
            self.mu,
            _to_requirement(self.requirement),
            alpha,
            capacity,
        )


class MdfModel(_Strict):
    kind: Literal["mdf"] = "mdf"
    lambda_per_user: float = Field(gt=0)
    population: int = Field(ge=1)
    slot: float = Field(gt=0)
    stay_prob: Optional[float] = None
    mu: Optional[float] = None
    requirement: list[RequirementAtom] = Field(min_length=1)
    mode: Literal["consistent", "literal"] = "consistent"

    @model_validator(mode="after")
    def _validate(self) -> "MdfModel":
        if (self.stay_prob is None) == (self.mu is None):
            raise ValueError("specify exactly one of stay_prob or mu")
        if self.stay_prob is not None and not 0.0 < self.stay_prob < 1.0:
            raise ValueError("stay_prob must lie strictly in (0, 1)")
        if self.mu is not None and self.mu <= 0:
            raise ValueError("mu must be > 0")
        _check_requirement(self.requirement)
        return self

    @property
    def resolved_stay_prob(self) -> float:
        if self.stay_prob is not None:
            return self.stay_prob
        return slot_survival_prob(self.mu, self.slot)

    def to_params(self) -> MdfParams:
        return MdfParams(
            self.lambda_per_user,
            self.population,
            self.slot,
            self.resolved_stay_prob,
            _to_requirement(self.requirement),
        )


class TimevarModel(_Strict):
    kind: Literal["timevar"] = "timevar"
    lambda_per_user: float = Field(gt=0)
    population: int = Field(ge=1)
    horizon: int = Field(ge=0)
    laws: list[list[LawAtom]] = Field(min_length=1)

    @model_validator(mode="after")
    def _validate(self) -> "TimevarModel":
        if len(self.laws) != self.horizon + 1:
            raise ValueError(
                f"expected {self.horizon + 1} laws for horizon {self.horizon}, "
                f"got {len(self.laws)}"
            )
        for s, law in enumerate(self.laws):
            total = sum(a.prob for a in law)
            if abs(total - 1.0) > _SUM_SLACK:
                raise ValueError(f"law {s} probabilities must sum to 1, got {total}")
        return self

    def to_params(self) -> TimevarParams:
        profile = TimeVaryingProfile(
            self.horizon,
            tuple(Pmf.from_atoms([(a.value, a.prob) for a in law]) for law in self.laws),
        )
        return TimevarParams(self.lambda_per_user, self.population, profile)


class IncrementSpec(_Strict):
    """Per-slot demand increment: explicit atoms or a compound Poisson recipe."""

    atoms: Optional[list[LawAtom]] = None
    compound_rate: Optional[float] = Field(default=None, ge=0)
    jumps: Optional[list[RequirementAtom]] = None

    @model_validator(mode="after")
    def _validate(self) -> "IncrementSpec":
        explicit = self.atoms is not None
        compound = self.compound_rate is not None and self.jumps is not None
        if explicit == compound:
            raise ValueError("specify either atoms or compound_rate with jumps")
        if explicit:
            total = sum(a.prob for a in self.atoms)
            if abs(total - 1.0) > _SUM_SLACK:
                raise ValueError(f"increment probabilities must sum to 1, got {total}")
        else:
            _check_requirement(self.jumps)
        return self

    def to_pmf(self) -> Pmf:
        if self.atoms is not None:
            return Pmf.from_atoms([(a.value, a.prob) for a in self.atoms])
        return compound_poisson_pmf(self.compound_rate, _to_requirement(self.jumps))


class DelayModel(_Strict):
    kind: Literal["delay"] = "delay"
    increment: IncrementSpec

    def to_params(self, capacity: int, alpha: float) -> DelayChainParams:
        return DelayChainParams(self.increment.to_pmf(), capacity, alpha)


ModelSection = Annotated[
    Union[EmlmModel, MdfModel, TimevarModel, DelayModel], Field(discriminator="kind")
]


class PolicySection(_Strict):
    alpha: float = 1.0
    capacity: Optional[int] = Field(default=None, ge=0)
    epsilon: Optional[float] = None
    policy: Literal["tolerance", "delay"] = "tolerance"

    @model_validator(mode="after")
    def _validate(self) -> "PolicySection":
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")
        if self.epsilon is not None and not 0.0 < self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in (0, 1]")
        return self


class RunSection(_Strict):
    seed: int = Field(default=0, ge=0, le=2**64 - 1)
    slots: int = Field(default=200_000, ge=1)
    burn_in: Optional[int] = Field(default=None, ge=0)
    replications: int = Field(default=5, ge=1)
    grid: Optional[Union[str, list[int]]] = None
    slot_grid: Optional[list[float]] = None
    output: Optional[str] = None
    format: Literal["csv", "json"] = "json"
    with_simulation: bool = False
    fixed_requirements: bool = False


class Scenario(_Strict):
    model: ModelSection
    policy: PolicySection = PolicySection()
    run: RunSection = RunSection()


# --------------------------------------------------------------------------
# response models


class PmfPayload(_Strict):
    masses: list[float]
    tail_mass: float

    @classmethod
    def from_pmf(cls, p: Pmf) -> "PmfPayload":
        return cls(masses=[float(x) for x in p.masses], tail_mass=p.tail_mass)


class BlockingReport(_Strict):
    """Blocking probability with provenance."""

    blocking: float
    method: str
    capacity: int
    alpha: float
    ci95_half_width: Optional[float] = None


class DistributionReport(_Strict):
    """Solved occupancy distribution plus its blocking tail."""

    j_max: int
    masses: list[float]
    tail_mass: float
    mean: float
    capacity: int
    alpha: float
    blocking: float


class SimReport(_Strict):
    blocking_estimate: float
    ci95_half_width: float
    slots_observed: int
    seed: int
    mean_active: float
    unstable: bool
    policy: str
    replication_estimates: list[float]
    empirical_pmf: PmfPayload


class PlanReport(_Strict):
    capacity: int
    blocking: float
    epsilon: float
    alpha: float
    model: str


class SweepRowReport(_Strict):
    capacity: int
    blocking_emlm: Optional[float] = None
    blocking_mdf_consistent: Optional[float] = None
    blocking_mdf_literal: Optional[float] = None
    blocking_sim_mean: Optional[float] = None
    blocking_sim_ci95: Optional[float] = None


class SweepReport(_Strict):
    mode: str
    rows: list[SweepRowReport]


class ConvergenceRow(_Strict):
    slot: float
    stay_prob: float
    blocking_emlm: float
    blocking_mdf_consistent: float
    blocking_mdf_literal: float
    delta_consistent: float
    delta_literal: float


class ConvergenceReport(_Strict):
    rows: list[ConvergenceRow]


Report = Union[
    BlockingReport,
    DistributionReport,
    SimReport,
    PlanReport,
    SweepReport,
    ConvergenceReport,
]
