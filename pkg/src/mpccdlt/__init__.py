"""Divisible-load scheduling for relay-centred satellite clusters with
multi-port concurrent links: closed-form allocation, deadline sizing and
real-time admission-control simulation."""

from .core import (Allocation, DivisibilitySpec, NormalizedPlatform, Regime, aggregate_rate,
                   allocate, child_cost, makespan_for_load, root_share_feasible, solve_case1,
                   solve_case2)
from .constellation import Cluster, PhysicalNode, normalize, sample_cluster, scale_bandwidth
from .errors import DomainError, InfeasibleError, MpccError, ParseError, RegimeError
from .sizing import (DeadlineQuery, NodeRegime, SizingReport, deadline_feasible,
                     effective_contribution, effective_contribution_from_rate, n_min,
                     rate_deficit, regime_classify)
from .workload import (RtTaskClass, TaskClass, TaskSource, TaskSpec, builtin_classes,
                       builtin_rt_classes, sample_task)
from .rtsim import (AdmissionPolicy, ArrivalProcess, SimConfig, SimStats, admit_or_block,
                    calibrate_lambda, replicate, run_simulation, service_time)

__version__ = "0.1.0"
