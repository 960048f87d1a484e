"""Distributions of integer-valued demand: the shared currency of all solvers.

A :class:`Pmf` stores a dense probability mass function on ``0..j_max``
(``masses[j]`` is ``P(S = j)``) together with ``tail_mass``, the probability
that was truncated beyond the stored support. Constructors keep
``sum(masses) + tail_mass`` within 1e-9 of one; operations are pure functions
on immutable values and are safe to share between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np
from scipy import stats

DEFAULT_TOL = 1e-12

_NORM_SLACK = 1e-9
_ATOM_SLACK = 1e-12


def _validate_masses(masses: np.ndarray) -> None:
    if masses.ndim != 1 or masses.size == 0:
        raise ValueError("masses must be a non-empty 1-D array")
    if not np.all(np.isfinite(masses)):
        raise ValueError("masses must be finite")
    if np.any(masses < 0.0):
        raise ValueError("masses must be non-negative")


@dataclass(frozen=True)
class Pmf:
    """Finite pmf on non-negative integers plus truncated tail probability."""

    masses: np.ndarray
    tail_mass: float = 0.0

    def __post_init__(self) -> None:
        m = np.ascontiguousarray(self.masses, dtype=np.float64)
        _validate_masses(m)
        tail = float(self.tail_mass)
        if not math.isfinite(tail) or tail < -_ATOM_SLACK:
            raise ValueError(f"tail_mass must be non-negative, got {tail}")
        tail = max(tail, 0.0)
        total = float(m.sum()) + tail
        if abs(total - 1.0) > _NORM_SLACK:
            raise ValueError(f"masses + tail_mass must sum to 1, got {total}")
        m.setflags(write=False)
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "tail_mass", tail)

    @classmethod
    def point(cls, value: int) -> "Pmf":
        """Point mass at a single non-negative integer."""
        if value < 0:
            raise ValueError("point mass value must be >= 0")
        m = np.zeros(value + 1)
        m[value] = 1.0
        return cls(m)

    @classmethod
    def from_atoms(cls, atoms: Iterable[tuple[int, float]]) -> "Pmf":
        """Build from (value, probability) pairs; values may repeat."""
        pairs = list(atoms)
        if not pairs:
            raise ValueError("need at least one atom")
        top = max(v for v, _ in pairs)
        m = np.zeros(top + 1)
        for value, prob in pairs:
            if value < 0:
                raise ValueError("atom values must be >= 0")
            m[value] += prob
        return cls(m)

    @property
    def j_max(self) -> int:
        return len(self.masses) - 1

    @property
    def support_max(self) -> int:
        """Largest stored value carrying positive mass."""
        nz = np.nonzero(self.masses)[0]
        return int(nz[-1]) if nz.size else 0

    def prob(self, value: int) -> float:
        if 0 <= value <= self.j_max:
            return float(self.masses[value])
        return 0.0

    def mean(self) -> float:
        """Mean over the stored support (the truncated tail is excluded)."""
        return float(np.arange(len(self.masses)) @ self.masses)

    def variance(self) -> float:
        values = np.arange(len(self.masses))
        mu = self.mean()
        return float(((values - mu) ** 2) @ self.masses)

    def truncated(self, tol: float) -> "Pmf":
        """Drop the upper support whose combined mass is below ``tol``."""
        rev_cum = np.cumsum(self.masses[::-1])[::-1]
        keep = np.nonzero(rev_cum >= tol)[0]
        cut = int(keep[-1]) if keep.size else 0
        if cut >= self.j_max:
            return self
        dropped = float(self.masses[cut + 1 :].sum())
        return Pmf(self.masses[: cut + 1], self.tail_mass + dropped)


@dataclass(frozen=True)
class RequirementDistribution:
    """Packet-size law of one activated user: atoms (size b_k, probability a_k)."""

    atoms: tuple[tuple[int, float], ...]

    def __post_init__(self) -> None:
        pairs = tuple((int(b), float(a)) for b, a in self.atoms)
        if not pairs:
            raise ValueError("need at least one atom")
        sizes = [b for b, _ in pairs]
        probs = [a for _, a in pairs]
        if sizes[0] < 1:
            raise ValueError("packet sizes must be >= 1")
        if any(s2 <= s1 for s1, s2 in zip(sizes, sizes[1:])):
            raise ValueError("packet sizes must be strictly increasing")
        if any(a <= 0 for a in probs):
            raise ValueError("atom probabilities must be > 0")
        if abs(sum(probs) - 1.0) > _ATOM_SLACK:
            raise ValueError(f"atom probabilities must sum to 1, got {sum(probs)}")
        object.__setattr__(self, "atoms", pairs)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(b for b, _ in self.atoms)

    @property
    def probs(self) -> tuple[float, ...]:
        return tuple(a for _, a in self.atoms)

    @property
    def max_size(self) -> int:
        return self.atoms[-1][0]

    def mean(self) -> float:
        return sum(b * a for b, a in self.atoms)

    def second_moment(self) -> float:
        return sum(b * b * a for b, a in self.atoms)

    def to_pmf(self) -> Pmf:
        return Pmf.from_atoms(self.atoms)


JumpLaw = Union[RequirementDistribution, Pmf]


def poisson_pmf(rate: float, tol: float = DEFAULT_TOL, max_support: int | None = None) -> Pmf:
    """Poisson(rate) truncated at the smallest J whose tail is below ``tol``.

    Parameters
    ----------
    rate : float
        Non-negative Poisson rate.
    tol : float
        Truncation tolerance in (0, 1); the recorded ``tail_mass`` stays
        below it unless ``max_support`` cuts the support first.
    max_support : int, optional
        Hard cap on the stored support.
    """
    if rate < 0:
        raise ValueError(f"rate must be >= 0, got {rate}")
    if not 0.0 < tol < 1.0:
        raise ValueError("tol must lie in (0, 1)")
    if rate == 0.0:
        return Pmf.point(0)
    j = int(stats.poisson.ppf(1.0 - tol, rate))
    while stats.poisson.sf(j, rate) >= tol:
        j += 1
    if max_support is not None:
        j = min(j, max_support)
    masses = stats.poisson.pmf(np.arange(j + 1), rate)
    return Pmf(masses, max(0.0, 1.0 - float(masses.sum())))


def convolve(a: Pmf, b: Pmf) -> Pmf:
    """Distribution of the independent sum; truncated mass goes to the tail."""
    masses = np.convolve(a.masses, b.masses)
    return Pmf(masses, max(0.0, 1.0 - float(masses.sum())))


def compound_poisson_pmf(
    rate: float,
    jumps: JumpLaw,
    tol: float = DEFAULT_TOL,
    max_support: int | None = None,
) -> Pmf:
    """Law of a Poisson(rate) number of i.i.d. integer jumps.

    Evaluated by the Panjer-style recursion
    ``g(0) = exp(-rate * (1 - f(0)))``,
    ``g(j) = (rate / j) * sum_i i * f(i) * g(j - i)``,
    where ``f`` is the jump pmf; any jump mass at zero is folded into the
    rate. The support grows until cumulative mass reaches ``1 - tol`` (or
    ``max_support``, whichever comes first); the remainder is recorded as
    ``tail_mass``.
    """
    if rate < 0:
        raise ValueError(f"rate must be >= 0, got {rate}")
    if not 0.0 < tol < 1.0:
        raise ValueError("tol must lie in (0, 1)")
    f = jumps.to_pmf() if isinstance(jumps, RequirementDistribution) else jumps
    jump_values = np.nonzero(f.masses)[0]
    jump_values = jump_values[jump_values > 0]
    effective_rate = rate * (1.0 - f.prob(0))
    if effective_rate == 0.0 or jump_values.size == 0:
        return Pmf.point(0)
    weights = {int(i): i * float(f.masses[i]) for i in jump_values}

    jump_mean = float(sum(i * f.masses[i] for i in jump_values))
    jump_sq = float(sum(i * i * f.masses[i] for i in jump_values))
    cap = max_support
    if cap is None:
        # generous Chernoff-style envelope; tol is always reached far earlier
        cap = int(rate * jump_mean + 60.0 * math.sqrt(rate * jump_sq + 1.0)) + 1024

    g = np.zeros(cap + 1)
    g[0] = math.exp(-effective_rate)
    cum = g[0]
    j_stop = cap
    for j in range(1, cap + 1):
        acc = 0.0
        for i, w in weights.items():
            if i > j:
                break
            acc += w * g[j - i]
        g[j] = rate * acc / j
        cum += g[j]
        if cum >= 1.0 - tol:
            j_stop = j
            break
    else:
        if max_support is None:
            raise ValueError("compound Poisson support guard exceeded; tol unreachable")
    masses = g[: j_stop + 1]
    return Pmf(masses, max(0.0, 1.0 - float(masses.sum())))


def mixture_pmf(components: Sequence[Pmf], weights: Sequence[float]) -> Pmf:
    """Pointwise weighted combination of pmfs (weights sum to one)."""
    if len(components) != len(weights):
        raise ValueError("components and weights must have the same length")
    if len(components) == 0:
        raise ValueError("need at least one component")
    w = np.asarray(weights, dtype=np.float64)
    if np.any(w < 0):
        raise ValueError("weights must be non-negative")
    if abs(float(w.sum()) - 1.0) > _ATOM_SLACK:
        raise ValueError(f"weights must sum to 1, got {float(w.sum())}")
    width = max(len(c.masses) for c in components)
    masses = np.zeros(width)
    tail = 0.0
    for c, wi in zip(components, w):
        masses[: len(c.masses)] += wi * c.masses
        tail += wi * c.tail_mass
    return Pmf(masses, tail)


def tail_prob(p: Pmf, threshold: float) -> float:
    """P(S > threshold), strict inequality; the truncated tail counts as above."""
    if threshold < 0:
        return float(p.masses.sum()) + p.tail_mass
    start = int(math.floor(threshold)) + 1
    if start > p.j_max:
        return p.tail_mass
    return float(p.masses[start:].sum()) + p.tail_mass
