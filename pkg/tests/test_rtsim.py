import math

import numpy as np
import pytest

from mpccdlt.core import DivisibilitySpec, NormalizedPlatform, allocate
from mpccdlt.constellation import sample_cluster
from mpccdlt.errors import DomainError
from mpccdlt.rtsim import (AdmissionPolicy, ArrivalProcess, Decision, SimConfig, SimStats,
                           admit_or_block, aggregate, calibrate_lambda, replicate, run_config,
                           run_simulation, service_time)
from mpccdlt.workload import Interval, RtTaskClass, TaskSource, TaskSpec, builtin_rt_classes

TWO_SLOW = NormalizedPlatform(1.0, ((2.0, 2.0), (2.0, 2.0)))
RT = {c.name: c for c in builtin_rt_classes()}
PLATFORM = sample_cluster(12, rng_seed=42)


def fixed_size(L, beta=0.0, gamma=1.0):
    return RtTaskClass("fixed", gamma, beta, Interval(L, L))


def test_service_time_examples():
    assert service_time(TaskSpec(1.0, 1.0, 1.0, 0.0, 0.0), TWO_SLOW) == pytest.approx(2 / 3)
    assert service_time(TaskSpec(3.0, 1.0, 0.5, 0.1, 1.0), TWO_SLOW) == 3.0
    half = NormalizedPlatform(1.0, ((1.0, 0.0),))
    assert service_time(TaskSpec(3.0, 1.0, 1.0, 0.0, 0.0), half) == 1.5


@pytest.mark.parametrize("load, mean_s, expected", [(0.3, 2.0, 0.15), (1.0, 1.0, 1.0), (1.2, 0.5, 2.4)])
def test_calibrate_lambda_examples(load, mean_s, expected):
    relay_only = NormalizedPlatform(1.0)    # S = L * w0 = L
    rate = calibrate_lambda(load, TaskSource(fixed_size(mean_s)), relay_only, 1000, 0)
    assert rate == pytest.approx(expected, rel=1e-15)


def test_calibrate_lambda_guards():
    with pytest.raises(DomainError):
        calibrate_lambda(0.5, TaskSource(RT["A"]), PLATFORM, n_pilot=999)
    with pytest.raises(DomainError):
        calibrate_lambda(0.0, TaskSource(RT["A"]), PLATFORM)


def test_calibration_tracks_mean_service():
    rate = calibrate_lambda(0.7, TaskSource(RT["A"]), PLATFORM, 20_000, 1)
    t_star = allocate(PLATFORM, DivisibilitySpec(1 - 0.8, 0.1)).t_star
    mean_multiplier = 1.5 / math.log(4)     # E[X], X log-uniform on [0.5, 2]
    assert rate == pytest.approx(0.7 / (t_star * mean_multiplier), rel=0.01)


def test_admit_or_block_examples():
    assert admit_or_block(0.0, 2.0, 2.4, 0.0) == (Decision.ADMIT, 2.0)
    assert admit_or_block(0.1, 2.0, 2.4, 2.0) == (Decision.BLOCK, 2.0)
    for t in (0.0, 3.5, 1e6):
        decision, busy = admit_or_block(t, 1.7, 1.5 * 1.7, 0.0)
        assert decision is Decision.ADMIT and busy == t + 1.7


def test_policy_and_arrivals_validate():
    with pytest.raises(DomainError):
        AdmissionPolicy(0.0)
    with pytest.raises(DomainError):
        ArrivalProcess(0.0)
    with pytest.raises(DomainError):
        ArrivalProcess(1.0, n_arrivals=10, duration=5.0)


def test_duration_horizon():
    times = ArrivalProcess(50.0, n_arrivals=None, duration=100.0).times(np.random.default_rng(0))
    assert times[-1] <= 100.0
    assert len(times) == pytest.approx(5000, rel=0.05)
    assert np.all(np.diff(times) > 0)


def test_counting_and_warmup():
    stats = run_simulation(PLATFORM, TaskSource(RT["B"]), AdmissionPolicy(),
                           ArrivalProcess(2.0 / 0.012, 1000), workload_seed=1, arrival_seed=2)
    assert stats.arrivals == 900
    assert stats.admitted + stats.blocked == stats.arrivals
    assert stats.blocking_probability == stats.blocked / stats.arrivals
    assert 0 < stats.blocking_probability < 1


def test_event_log_replays_decisions():
    events = []
    stats = run_simulation(PLATFORM, TaskSource(RT["C"]), AdmissionPolicy(),
                           ArrivalProcess(80.0, 500), workload_seed=3, arrival_seed=4,
                           warmup=0.0, log=lambda *e: events.append(e))
    busy = 0.0
    for _, t, s, decision, new_busy in events:
        expected, busy = admit_or_block(t, s, 1.5 * s, busy)
        assert decision is expected and new_busy == busy
    assert sum(e[3] is Decision.BLOCK for e in events) == stats.blocked


def test_sparse_arrivals_are_never_blocked():
    stats = run_simulation(PLATFORM, TaskSource(RT["D"]), AdmissionPolicy(0.5),
                           ArrivalProcess(1e-6, 2000), workload_seed=0, arrival_seed=0)
    assert stats.blocked == 0


def test_huge_slack_never_blocks():
    stats = run_simulation(PLATFORM, TaskSource(RT["D"]), AdmissionPolicy(1e9),
                           ArrivalProcess(1e4, 2000), workload_seed=0, arrival_seed=0)
    assert stats.blocked == 0


def test_run_is_deterministic():
    cfg = SimConfig(PLATFORM, TaskSource(RT["A"]), 0.7, n_arrivals=3000)
    assert run_config(cfg, 11) == run_config(cfg, 11)
    assert run_config(cfg, 11) != run_config(cfg, 12)


def test_replicate_examples():
    cfg = SimConfig(PLATFORM, TaskSource(RT["A"]), 0.7, n_arrivals=3000)
    same = replicate(cfg, [5, 5, 5])
    assert same.ci95_halfwidth == 0.0
    assert same.blocking_probability == run_config(cfg, 5).blocking_probability

    spread = replicate(cfg, range(20))
    assert spread.ci95_halfwidth > 0
    assert spread.runs == 20 and spread.arrivals == 20 * 2700

    calm = replicate(SimConfig(PLATFORM, TaskSource(RT["A"]), 0.7, AdmissionPolicy(1e9),
                               n_arrivals=2000), [1, 2])
    assert (calm.blocking_probability, calm.ci95_halfwidth) == (0.0, 0.0)

    with pytest.raises(DomainError):
        replicate(cfg, [1])


def test_replicate_in_parallel_matches_serial():
    cfg = SimConfig(PLATFORM, TaskSource(RT["C"]), 1.2, n_arrivals=2000)
    assert replicate(cfg, range(4), workers=2) == replicate(cfg, range(4))


def test_aggregate_is_order_independent():
    runs = [SimStats(100, 100 - b, b, b / 100) for b in (3, 17, 9, 40)]
    assert aggregate(runs) == aggregate(runs[::-1])


def test_blocking_grows_with_load():
    cfg = SimConfig(PLATFORM, TaskSource(RT["A"]), 0.3, n_arrivals=5000)
    light = replicate(cfg, range(8)).blocking_probability
    heavy = replicate(SimConfig(PLATFORM, TaskSource(RT["A"]), 1.2, n_arrivals=5000),
                      range(8)).blocking_probability
    assert light < heavy
