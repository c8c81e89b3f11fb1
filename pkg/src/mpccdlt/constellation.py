"""Physical cluster description and conversion to per-unit-load parameters."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import NormalizedPlatform
from .errors import DomainError

# Defaults for the real-time experiments: one relay, twelve neighbours.
RT_NEIGHBORS = 12
RT_W_RANGE = (0.02, 0.08)
RT_Z_RANGE = (0.01, 0.06)


@dataclass(frozen=True)
class PhysicalNode:
    compute_speed: float                  # Flops/s
    isl_bandwidth: float | None = None    # MB/s, None for the relay
    node_id: str = ""

    def __post_init__(self):
        if not self.compute_speed > 0:
            raise DomainError(f"compute speed must be positive, got {self.compute_speed}")
        if self.isl_bandwidth is not None and not self.isl_bandwidth > 0:
            raise DomainError(f"ISL bandwidth must be positive, got {self.isl_bandwidth}")


@dataclass(frozen=True)
class Cluster:
    relay: PhysicalNode
    neighbors: tuple[PhysicalNode, ...] = ()
    label: str = "cluster"

    def __post_init__(self):
        object.__setattr__(self, "neighbors", tuple(self.neighbors))
        for node in self.neighbors:
            if node.isl_bandwidth is None:
                raise DomainError(f"neighbor {node.node_id!r} has no ISL bandwidth")

    @property
    def n(self) -> int:
        return len(self.neighbors)


def normalize(cluster: Cluster, ci: float) -> NormalizedPlatform:
    """Per-MB times for a task of compute intensity ``ci`` (Flops/MB)."""
    if not ci > 0:
        raise DomainError(f"compute intensity must be positive, got {ci}")
    children = tuple((ci / n.compute_speed, 1.0 / n.isl_bandwidth) for n in cluster.neighbors)
    return NormalizedPlatform(ci / cluster.relay.compute_speed, children)


def _check_interval(name, lo, hi):
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo <= 0 or hi <= 0:
        raise DomainError(f"{name} bounds must be positive and finite, got [{lo}, {hi}]")
    if lo > hi:
        raise DomainError(f"{name} interval is inverted: [{lo}, {hi}]")


def sample_cluster(n_neighbors: int, w_range=RT_W_RANGE, z_range=RT_Z_RANGE,
                   rng_seed: int | np.random.Generator = 0) -> NormalizedPlatform:
    """Heterogeneous star with every w and z drawn uniformly from its interval.

    The relay draws from the same w interval as the neighbours. Draw order is
    w0, then (w_i, z_i) per neighbour, so a platform is a pure function of the
    seed and the arguments.
    """
    if n_neighbors < 0:
        raise DomainError(f"neighbor count must be nonnegative, got {n_neighbors}")
    _check_interval("w", *w_range)
    _check_interval("z", *z_range)
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)

    def draw(lo, hi):
        return lo if lo == hi else float(rng.uniform(lo, hi))

    w0 = draw(*w_range)
    children = []
    for _ in range(n_neighbors):
        w = draw(*w_range)
        children.append((w, draw(*z_range)))
    return NormalizedPlatform(w0, tuple(children))


def scale_bandwidth(platform: NormalizedPlatform, factor: float) -> NormalizedPlatform:
    """Multiply every ISL bandwidth by ``factor``; compute times are unchanged."""
    if not factor > 0 or not np.isfinite(factor):
        raise DomainError(f"bandwidth factor must be positive, got {factor}")
    if factor == 1:
        return platform
    return platform.with_children((w, z / factor) for w, z in platform.children)


# Fixed heterogeneous topology for the static experiments, where no published
# per-satellite values exist. Compute speeds 4-20 GFlop/s, ISLs 50-800 MB/s
# (mixed RF and optical).
REFERENCE_CLUSTER_TEXT = """\
# reference 13-node star: one relay, twelve neighbours
node relay0 relay cs=2.0e10
node n01 cs=1.6e10 bw=800
node n02 cs=1.2e10 bw=400
node n03 cs=8.0e9  bw=600
node n04 cs=2.0e10 bw=150
node n05 cs=4.0e9  bw=250
node n06 cs=1.0e10 bw=100
node n07 cs=1.4e10 bw=50
node n08 cs=6.0e9  bw=300
node n09 cs=1.8e10 bw=500
node n10 cs=5.0e9  bw=75
node n11 cs=9.0e9  bw=200
node n12 cs=1.1e10 bw=350
"""


def reference_cluster() -> Cluster:
    from .formats import parse_cluster

    return parse_cluster(REFERENCE_CLUSTER_TEXT, source="<reference>", label="reference")
