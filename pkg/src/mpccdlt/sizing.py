"""Deadline feasibility and cluster sizing on top of the Case-1 makespan."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

from .core import NormalizedPlatform, aggregate_rate, child_cost
from .errors import DomainError

DEFAULT_DOMINANCE_RATIO = 10.0


class NodeRegime(enum.Enum):
    COMPUTATION_LIMITED = "ComputationLimited"
    COMMUNICATION_LIMITED = "CommunicationLimited"
    BALANCED = "Balanced"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class DeadlineQuery:
    t_req: float
    platform: NormalizedPlatform
    beta: float = 0.0

    def __post_init__(self):
        if not self.t_req > 0:
            raise DomainError(f"t_req must be positive, got {self.t_req}")


@dataclass(frozen=True)
class SizingReport:
    """Outcome of a minimum-cluster query.

    ``contributions`` follow the platform's child order; ``order`` lists child
    indices (0-based) by decreasing contribution, and ``cumulative`` holds the
    prefix sums in that order. ``n_min`` is None when even every child together
    cannot cover ``delta``.
    """

    contributions: tuple[float, ...]
    delta: float
    n_min: int | None
    order: tuple[int, ...]
    cumulative: tuple[float, ...]

    @property
    def feasible(self) -> bool:
        return self.n_min is not None

    @property
    def sorted_contributions(self) -> tuple[float, ...]:
        return tuple(self.contributions[i] for i in self.order)


def effective_contribution(w: float, z: float, beta: float) -> float:
    return 1.0 / child_cost(w, z, beta)


def effective_contribution_from_rate(w: float, rate: float, beta: float) -> float:
    """Contribution of a satellite whose link carries ``rate`` units per second."""
    if not rate > 0:
        raise DomainError(f"link rate must be positive, got {rate}")
    return effective_contribution(w, 1.0 / rate, beta)


def rate_deficit(t_req: float, w0: float) -> float:
    """Service rate the children must supply on top of the relay's own."""
    if not t_req > 0 or not w0 > 0:
        raise DomainError("t_req and w0 must be positive")
    return 1.0 / t_req - 1.0 / w0


def n_min(query: DeadlineQuery) -> SizingReport:
    platform = query.platform
    g = tuple(effective_contribution(w, z, query.beta) for w, z in platform.children)
    # sorted() is stable, so equal contributions keep child-index order
    order = tuple(sorted(range(len(g)), key=lambda i: -g[i]))
    cumulative = tuple(itertools.accumulate(g[i] for i in order))
    delta = rate_deficit(query.t_req, platform.w0)

    if delta <= 0:
        count = 0
    else:
        count = next((k + 1 for k, c in enumerate(cumulative) if c >= delta), None)
    return SizingReport(g, delta, count, order, cumulative)


def deadline_feasible(query: DeadlineQuery) -> bool:
    return aggregate_rate(query.platform, query.beta) >= 1.0 / query.t_req


def regime_classify(w: float, z: float, beta: float,
                    ratio: float = DEFAULT_DOMINANCE_RATIO) -> NodeRegime:
    """Which term dominates a child's per-unit cost, by a factor of ``ratio``."""
    child_cost(w, z, beta)  # validates
    link = (1.0 + beta) * z
    if w > ratio * link:
        return NodeRegime.COMPUTATION_LIMITED
    if link > ratio * w:
        return NodeRegime.COMMUNICATION_LIMITED
    return NodeRegime.BALANCED
