"""Closed-form load allocation on a single-level star with multi-port links.

The relay (node 0) sends load to every child concurrently and receives
results concurrently. A child holding fraction ``a`` finishes after
``a * (w + (1 + beta) * z)``; the relay finishes after ``(f + a0) * w0``.
"""

from __future__ import annotations

import enum
import math
import numbers
from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError, InfeasibleError, RegimeError


class Regime(enum.Enum):
    CASE1 = "Case1"  # relay takes part of the divisible load
    CASE2 = "Case2"  # relay saturated by its mandatory fraction

    def __str__(self):
        return self.value


def _check_finite(name, value):
    if not isinstance(value, numbers.Real) or not math.isfinite(value):
        raise DomainError(f"{name} must be a finite number, got {value!r}")


@dataclass(frozen=True)
class NormalizedPlatform:
    """Relay compute time ``w0`` plus ``(w_i, z_i)`` per child, all per unit load."""

    w0: float
    children: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        _check_finite("w0", self.w0)
        if self.w0 <= 0:
            raise DomainError(f"w0 must be positive, got {self.w0}")
        children = tuple((float(w), float(z)) for w, z in self.children)
        for i, (w, z) in enumerate(children, start=1):
            _check_finite(f"w_{i}", w)
            _check_finite(f"z_{i}", z)
            if w <= 0:
                raise DomainError(f"w_{i} must be positive, got {w}")
            if z < 0:
                raise DomainError(f"z_{i} must be nonnegative, got {z}")
        object.__setattr__(self, "w0", float(self.w0))
        object.__setattr__(self, "children", children)

    @property
    def n(self) -> int:
        return len(self.children)

    def with_children(self, children: Sequence[tuple[float, float]]) -> NormalizedPlatform:
        return NormalizedPlatform(self.w0, tuple(children))


@dataclass(frozen=True)
class DivisibilitySpec:
    """Mandatory relay-only fraction ``f`` and result-size ratio ``beta``."""

    f: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        _check_finite("f", self.f)
        _check_finite("beta", self.beta)
        if not 0.0 <= self.f <= 1.0:
            raise DomainError(f"f must lie in [0, 1], got {self.f}")
        if not 0.0 <= self.beta < 1.0:
            raise DomainError(f"beta must lie in [0, 1), got {self.beta}")

    @property
    def gamma(self) -> float:
        return 1.0 - self.f


@dataclass(frozen=True)
class Allocation:
    alpha0: float
    alphas: tuple[float, ...]
    t_star: float
    regime: Regime
    f: float = 0.0

    @property
    def total(self) -> float:
        """Divisible load placed, which should equal ``1 - f``."""
        return math.fsum((self.alpha0, *self.alphas))

    def finish_times(self, platform: NormalizedPlatform, beta: float) -> list[float]:
        """Per-node completion times, relay first."""
        times = [(self.f + self.alpha0) * platform.w0]
        for a, (w, z) in zip(self.alphas, platform.children):
            times.append(a * child_cost(w, z, beta))
        return times


def child_cost(w: float, z: float, beta: float) -> float:
    """Time per unit load for a child: send, compute, return the result."""
    _check_finite("w", w)
    _check_finite("z", z)
    _check_finite("beta", beta)
    if w <= 0:
        raise DomainError(f"w must be positive, got {w}")
    if z < 0:
        raise DomainError(f"z must be nonnegative, got {z}")
    if not 0.0 <= beta < 1.0:
        raise DomainError(f"beta must lie in [0, 1), got {beta}")
    return w + (1.0 + beta) * z


def children_rate(platform: NormalizedPlatform, beta: float) -> float:
    """Sum of child service rates, ``G``."""
    return math.fsum(1.0 / child_cost(w, z, beta) for w, z in platform.children)


def aggregate_rate(platform: NormalizedPlatform, spec: DivisibilitySpec | float) -> float:
    """Aggregate service rate ``S`` of relay plus children (loads per second)."""
    beta = spec.beta if isinstance(spec, DivisibilitySpec) else spec
    return math.fsum((1.0 / platform.w0, children_rate(platform, beta)))


def root_share_bound(platform: NormalizedPlatform, spec: DivisibilitySpec | float) -> float:
    """Largest ``f`` for which the relay still takes a divisible share."""
    return 1.0 / (platform.w0 * aggregate_rate(platform, spec))


def root_share_feasible(platform: NormalizedPlatform, spec: DivisibilitySpec) -> bool:
    if platform.n == 0:
        return True
    return spec.f <= root_share_bound(platform, spec)


def solve_case1(platform: NormalizedPlatform, spec: DivisibilitySpec) -> Allocation:
    """Equal-finish solution with the relay sharing the divisible load."""
    if platform.n == 0:
        return Allocation(1.0 - spec.f, (), platform.w0, Regime.CASE1, spec.f)
    bound = root_share_bound(platform, spec)
    if spec.f > bound:
        raise RegimeError(
            f"f={spec.f} exceeds relay bound {bound}: alpha0 would be negative, use Case 2"
        )
    t_star = 1.0 / aggregate_rate(platform, spec)
    alphas = tuple(t_star / child_cost(w, z, spec.beta) for w, z in platform.children)
    # bound - f rather than t_star/w0 - f so that alpha0 is exactly 0 on the boundary
    return Allocation(bound - spec.f, alphas, t_star, Regime.CASE1, spec.f)


def solve_case2(platform: NormalizedPlatform, spec: DivisibilitySpec) -> Allocation:
    """Relay runs only its mandatory part; children split the rest by rate."""
    divisible = 1.0 - spec.f
    if platform.n == 0:
        if divisible > 0:
            raise InfeasibleError("no children to host the divisible load")
        return Allocation(0.0, (), platform.w0, Regime.CASE2, spec.f)
    rates = [1.0 / child_cost(w, z, spec.beta) for w, z in platform.children]
    total_rate = math.fsum(rates)
    alphas = tuple(divisible * g / total_rate for g in rates)
    t_star = max(spec.f * platform.w0, divisible / total_rate)
    return Allocation(0.0, alphas, t_star, Regime.CASE2, spec.f)


def allocate(platform: NormalizedPlatform, spec: DivisibilitySpec) -> Allocation:
    if root_share_feasible(platform, spec):
        return solve_case1(platform, spec)
    return solve_case2(platform, spec)


def makespan_for_load(alloc: Allocation, load: float) -> float:
    """Physical makespan in seconds for a task of ``load`` MB."""
    _check_finite("L", load)
    if load < 0:
        raise DomainError(f"load must be nonnegative, got {load}")
    return load * alloc.t_star
