"""Knowledge base of historical best solutions.

The optimizer keeps an *optimal set*: the best solutions seen so far, sorted
ascending by fitness (minimization), with a capacity that shrinks over the
evaluation budget.  Discriminator training samples from it with replacement
(bootstrapping).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .domain import Box


@dataclass
class ScoredSolution:
    """A solution vector with its evaluated objective value (lower is better)."""

    x: np.ndarray
    fitness: float


@dataclass
class OptimalSet:
    """Historical best solutions, sorted ascending by fitness.

    ``len(members) <= capacity <= initial_capacity`` at all times.  Member
    lists are treated as immutable; updates produce new sets.
    """

    members: list[ScoredSolution]
    capacity: int
    initial_capacity: int

    def member_matrix(self) -> np.ndarray:
        """Member vectors stacked as rows, cached for repeated sampling."""
        cached = self.__dict__.get("_matrix")
        if cached is None:
            if not self.members:
                raise ValueError("optimal set is empty")
            cached = np.stack([m.x for m in self.members], axis=0)
            self.__dict__["_matrix"] = cached
        return cached


def init_optimal_set(domain: Box, size: int,
                     objective: Callable[[np.ndarray], float],
                     rng: np.random.Generator) -> OptimalSet:
    """Seed the set with ``size`` uniform points on the domain, each evaluated once.

    The objective callable is queried once per point, so this consumes ``size``
    function evaluations from whatever counter the callable is wired to.
    """
    if size < 1:
        raise ValueError("size must be >= 1")
    points = domain.sample(rng, size)
    members = [ScoredSolution(p.copy(), float(objective(p))) for p in points]
    for m in members:
        if math.isnan(m.fitness):
            raise ValueError("objective returned NaN; map it to +inf before scoring")
    members.sort(key=lambda s: s.fitness)
    return OptimalSet(members, size, size)


def update_optimal_set(opt_set: OptimalSet,
                       candidates: Sequence[ScoredSolution]) -> OptimalSet:
    """Merge evaluated candidates and keep the best ``capacity`` solutions.

    Ties on fitness are broken in favor of incumbents, then earlier candidate
    index (stable sort over the concatenation), which keeps runs deterministic.
    An empty candidate list just re-truncates to the current capacity.
    """
    for c in candidates:
        if math.isnan(c.fitness):
            raise ValueError("candidate fitness is NaN; map it to +inf before scoring")
    merged = sorted(list(opt_set.members) + list(candidates), key=lambda s: s.fitness)
    return OptimalSet(merged[:opt_set.capacity], opt_set.capacity,
                      opt_set.initial_capacity)


def shrink_to(opt_set: OptimalSet, capacity: int) -> OptimalSet:
    """Truncate the set to a (smaller or equal) capacity."""
    if capacity < 1:
        raise ValueError("capacity must be >= 1")
    if capacity > opt_set.capacity:
        raise ValueError("capacity can only shrink")
    return OptimalSet(opt_set.members[:capacity], capacity, opt_set.initial_capacity)


def shrink_size(initial_size: int, rate: float, evals_used: int, max_evals: int) -> int:
    """Capacity schedule ``ceil(initial_size ** (1 - rate * evals_used / max_evals))``.

    At ``evals_used = 0`` this is ``initial_size``; with ``rate >= 1`` it decays
    to 1 by the end of the budget (a non-positive exponent gives a power in
    (0, 1], whose ceiling is 1), and ``rate = 0`` keeps the size fixed.
    """
    if initial_size < 1:
        raise ValueError("initial_size must be >= 1")
    if rate < 0.0:
        raise ValueError("rate must be >= 0")
    if evals_used < 0 or max_evals < 1:
        raise ValueError("need evals_used >= 0 and max_evals >= 1")
    exponent = 1.0 - rate * evals_used / max_evals
    return max(1, math.ceil(initial_size ** exponent))


def bootstrap_sample(opt_set: OptimalSet, count: int,
                     rng: np.random.Generator) -> np.ndarray:
    """Draw ``count`` member vectors uniformly with replacement, as rows."""
    if not opt_set.members:
        raise ValueError("cannot sample from an empty optimal set")
    if count < 1:
        raise ValueError("count must be >= 1")
    idx = rng.integers(0, len(opt_set.members), size=count)
    return opt_set.member_matrix()[idx]
