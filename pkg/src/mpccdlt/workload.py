"""Application task classes and randomized task generation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise DomainError(f"interval bounds must be finite: [{self.lo}, {self.hi}]")
        if self.lo > self.hi:
            raise DomainError(f"inverted interval [{self.lo}, {self.hi}]")

    def __contains__(self, x):
        return self.lo <= x <= self.hi

    @property
    def mid(self):
        return 0.5 * (self.lo + self.hi)

    @property
    def geometric_mid(self):
        return math.sqrt(self.lo * self.hi)

    def __str__(self):
        return f"{self.lo:g}:{self.hi:g}"


@dataclass(frozen=True)
class TaskClass:
    """Ranges for one application family: size (MB), intensity (Flops/MB), gamma, beta."""

    name: str
    L_range: Interval
    ci_range: Interval
    gamma_range: Interval
    beta_range: Interval

    def __post_init__(self):
        for label, iv in (("L", self.L_range), ("ci", self.ci_range)):
            if iv.lo <= 0:
                raise DomainError(f"{self.name}: {label} range must be positive")
        if not (0 < self.gamma_range.lo and self.gamma_range.hi <= 1):
            raise DomainError(f"{self.name}: gamma range must lie in (0, 1]")
        if not (0 <= self.beta_range.lo and self.beta_range.hi < 1):
            raise DomainError(f"{self.name}: beta range must lie in [0, 1)")


@dataclass(frozen=True)
class RtTaskClass:
    """Real-time class: fixed gamma and beta, random size multiplier on a base load."""

    name: str
    gamma: float
    beta: float
    size_multiplier_range: Interval = Interval(0.5, 2.0)
    base_load: float = 1.0

    def __post_init__(self):
        if not 0 < self.gamma <= 1:
            raise DomainError(f"{self.name}: gamma must lie in (0, 1]")
        if not 0 <= self.beta < 1:
            raise DomainError(f"{self.name}: beta must lie in [0, 1)")
        if self.size_multiplier_range.lo <= 0 or self.base_load <= 0:
            raise DomainError(f"{self.name}: size multiplier and base load must be positive")


@dataclass(frozen=True)
class TaskSpec:
    L: float
    ci: float
    gamma: float
    beta: float
    f: float

    def __post_init__(self):
        if not self.L > 0 or not self.ci > 0:
            raise DomainError("task size and compute intensity must be positive")
        if not 0 < self.gamma <= 1:
            raise DomainError(f"gamma must lie in (0, 1], got {self.gamma}")
        if not 0 <= self.beta < 1:
            raise DomainError(f"beta must lie in [0, 1), got {self.beta}")
        if not 0 <= self.f <= 1:
            raise DomainError(f"f must lie in [0, 1], got {self.f}")


def builtin_classes() -> list[TaskClass]:
    return [
        TaskClass("IoT Agg.", Interval(1e2, 1e3), Interval(1e6, 1e7),
                  Interval(0.6, 0.8), Interval(0.05, 0.15)),
        TaskClass("AI Inf.", Interval(1e2, 1e4), Interval(1e8, 1e9),
                  Interval(0.7, 0.9), Interval(0.1, 0.3)),
        TaskClass("Img./Sig. Pre.", Interval(1e3, 1e4), Interval(1e7, 1e8),
                  Interval(0.5, 0.7), Interval(0.05, 0.2)),
        TaskClass("Sci. Data", Interval(1e3, 1e5), Interval(1e8, 1e10),
                  Interval(0.4, 0.6), Interval(0.1, 0.25)),
    ]


def builtin_rt_classes() -> list[RtTaskClass]:
    return [
        RtTaskClass("A", 0.8, 0.10),
        RtTaskClass("B", 0.8, 0.20),
        RtTaskClass("C", 0.6, 0.40),
        RtTaskClass("D", 0.35, 0.10),
    ]


def _log_uniform(rng, iv: Interval, n=None):
    if iv.lo == iv.hi:
        return iv.lo if n is None else np.full(n, iv.lo)
    x = 10.0 ** rng.uniform(math.log10(iv.lo), math.log10(iv.hi), n)
    # exponentiation can overshoot an endpoint by an ulp
    return float(np.clip(x, iv.lo, iv.hi)) if n is None else np.clip(x, iv.lo, iv.hi)


def _uniform(rng, iv: Interval, n=None):
    if iv.lo == iv.hi:
        return iv.lo if n is None else np.full(n, iv.lo)
    x = rng.uniform(iv.lo, iv.hi, n)
    return float(x) if n is None else x


@dataclass(frozen=True)
class TaskBatch:
    """Column-wise draw of ``n`` tasks."""

    L: np.ndarray
    ci: np.ndarray
    gamma: np.ndarray
    beta: np.ndarray
    f: np.ndarray

    def __len__(self):
        return len(self.L)

    def __getitem__(self, i) -> TaskSpec:
        return TaskSpec(float(self.L[i]), float(self.ci[i]), float(self.gamma[i]),
                        float(self.beta[i]), float(self.f[i]))


def sample_tasks(task_class: TaskClass | RtTaskClass, rng: np.random.Generator, n: int,
                 f: float | None = None) -> TaskBatch:
    """Draw ``n`` tasks. L and ci are log-uniform, gamma and beta uniform.

    ``f`` overrides the mandatory relay fraction; otherwise ``f = 1 - gamma``.
    """
    if isinstance(task_class, RtTaskClass):
        L = task_class.base_load * _log_uniform(rng, task_class.size_multiplier_range, n)
        ci = np.ones(n)
        gamma = np.full(n, task_class.gamma)
        beta = np.full(n, task_class.beta)
    else:
        L = _log_uniform(rng, task_class.L_range, n)
        ci = _log_uniform(rng, task_class.ci_range, n)
        gamma = _uniform(rng, task_class.gamma_range, n)
        beta = _uniform(rng, task_class.beta_range, n)
    if f is None:
        frac = 1.0 - gamma
    else:
        if not 0 <= f <= 1:
            raise DomainError(f"f override must lie in [0, 1], got {f}")
        frac = np.full(n, float(f))
    return TaskBatch(np.asarray(L, float), np.asarray(ci, float), np.asarray(gamma, float),
                     np.asarray(beta, float), np.asarray(frac, float))


def sample_task(task_class: TaskClass | RtTaskClass, rng: np.random.Generator | int,
                f: float | None = None) -> TaskSpec:
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    return sample_tasks(task_class, rng, 1, f=f)[0]


@dataclass(frozen=True)
class TaskSource:
    """A task class plus an optional override of the relay-only fraction."""

    task_class: TaskClass | RtTaskClass
    f: float | None = None

    @property
    def name(self) -> str:
        return self.task_class.name

    def draw(self, rng: np.random.Generator, n: int) -> TaskBatch:
        return sample_tasks(self.task_class, rng, n, f=self.f)

    def sample(self, rng: np.random.Generator) -> TaskSpec:
        return self.draw(rng, 1)[0]
