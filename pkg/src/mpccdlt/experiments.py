"""Experiment drivers behind ``mpccdlt experiment``.

Each driver turns an :class:`ExperimentConfig` into one or more CSV tables.
Drivers are deterministic functions of the config: every random draw comes
from a generator seeded by config keys.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .constellation import (RT_NEIGHBORS, RT_W_RANGE, RT_Z_RANGE, normalize,
                            reference_cluster, sample_cluster, scale_bandwidth)
from .core import DivisibilitySpec, allocate, makespan_for_load
from .errors import DomainError, ParseError
from .formats import load_classes, load_cluster, parse_config, parse_interval
from .rtsim import AdmissionPolicy, SimConfig, replicate
from .sizing import DeadlineQuery, n_min
from .workload import (Interval, RtTaskClass, TaskSource, builtin_classes,
                       builtin_rt_classes, sample_tasks)

COMMON_DEFAULTS = {"output": None, "seed": "1", "workers": "1"}

PLATFORM_DEFAULTS = {
    "cluster": None,
    "platform": "sampled",
    "platform_seed": "42",
    "n_neighbors": str(RT_NEIGHBORS),
    "w_range": f"{RT_W_RANGE[0]}:{RT_W_RANGE[1]}",
    "z_range": f"{RT_Z_RANGE[0]}:{RT_Z_RANGE[1]}",
    "ci": "1",
}

RT_DEFAULTS = {
    **PLATFORM_DEFAULTS,
    "slack": "0.5",
    "n_arrivals": "10000",
    "warmup": "0.1",
    "n_pilot": "1000",
    "replications": "20",
    "size_range": "0.5:2.0",
}

DEFAULTS = {
    "scale": {"cluster": None, "classes_file": None, "classes": None,
              "L_multipliers": "1,2,4,8"},
    "sensitivity": {"cluster": None, "classes_file": None, "classes": None, "samples": "12"},
    "sizing": {**PLATFORM_DEFAULTS, "t_req_factor": "0.6", "beta": "0.1"},
    "rt-load": {**RT_DEFAULTS, "classes": "A,B,C,D", "loads": "0.3,0.7,1.2"},
    "rt-seqfrac": {**RT_DEFAULTS, "classes": "A,D", "load": "0.7",
                   "f_values": "0,0.1,0.2,0.3,0.4,0.5,0.6", "calibrate_f": "0"},
    "rt-bandwidth": {**RT_DEFAULTS, "classes": "B,C", "load": "0.7",
                     "bw_scales": "0.5,1,2,4", "calibrate_scale": "1"},
}

EXPERIMENTS = tuple(DEFAULTS)


@dataclass
class ExperimentConfig:
    experiment: str
    values: dict = field(default_factory=dict)   # key -> (text, line or None)
    source: str = "<config>"
    base_dir: Path = Path(".")

    def __post_init__(self):
        if self.experiment not in DEFAULTS:
            line = self.values.get("experiment", (None, None))[1]
            raise ParseError(f"unknown experiment {self.experiment!r}; "
                             f"choose from {', '.join(EXPERIMENTS)}", line, self.source)
        allowed = {"experiment", *COMMON_DEFAULTS, *DEFAULTS[self.experiment]}
        for key, (_, line) in self.values.items():
            if key not in allowed:
                raise ParseError(f"unknown key {key!r} for experiment {self.experiment!r}",
                                 line, self.source)

    @classmethod
    def from_text(cls, text, source="<config>", base_dir=Path(".")):
        values = parse_config(text, source)
        if "experiment" not in values:
            raise ParseError("missing 'experiment = ...'", None, source)
        return cls(values["experiment"][0], values, source, Path(base_dir))

    @classmethod
    def from_file(cls, path):
        path = Path(path)
        return cls.from_text(path.read_text(), str(path), path.parent)

    def set(self, key, value):
        self.values[key] = (str(value), None)
        self.__post_init__()

    def raw(self, key):
        if key in self.values:
            return self.values[key]
        default = {**COMMON_DEFAULTS, **DEFAULTS[self.experiment]}.get(key)
        return (default, None)

    def _convert(self, key, conv):
        text, line = self.raw(key)
        if text is None:
            return None
        try:
            return conv(text)
        except (ValueError, DomainError) as e:
            raise ParseError(f"bad value for {key}: {e}", line, self.source) from None

    def get_str(self, key):
        return self.raw(key)[0]

    def get_float(self, key):
        return self._convert(key, float)

    def get_int(self, key):
        return self._convert(key, int)

    def get_floats(self, key):
        values = self._convert(key, lambda s: [float(x) for x in s.split(",")])
        if not values:
            raise ParseError(f"{key} must be a nonempty list", self.raw(key)[1], self.source)
        return values

    def get_names(self, key):
        text = self.get_str(key)
        return None if text is None else [x.strip() for x in text.split(",") if x.strip()]

    def get_interval(self, key):
        text, line = self.raw(key)
        return parse_interval(text, key, line, self.source)

    def get_path(self, key):
        text = self.get_str(key)
        if text is None:
            return None
        p = Path(text)
        return p if p.is_absolute() else self.base_dir / p


@dataclass
class Table:
    path: Path | None
    header: tuple[str, ...]
    rows: list[tuple]


def _physical_cluster(cfg):
    path = cfg.get_path("cluster")
    return load_cluster(path) if path else reference_cluster()


def _platform(cfg):
    """Normalized platform for sizing and real-time experiments."""
    if cfg.get_str("cluster") is not None or cfg.get_str("platform") == "reference":
        return normalize(_physical_cluster(cfg), cfg.get_float("ci"))
    if cfg.get_str("platform") != "sampled":
        raise ParseError(f"platform must be 'sampled' or 'reference', got {cfg.get_str('platform')!r}",
                         cfg.raw("platform")[1], cfg.source)
    w, z = cfg.get_interval("w_range"), cfg.get_interval("z_range")
    return sample_cluster(cfg.get_int("n_neighbors"), (w.lo, w.hi), (z.lo, z.hi), cfg.get_int("platform_seed"))


def _select(cfg, classes, key="classes"):
    wanted = cfg.get_names(key)
    if wanted is None:
        return classes
    by_name = {c.name: c for c in classes}
    missing = [n for n in wanted if n not in by_name]
    if missing:
        raise ParseError(f"unknown class(es) {', '.join(missing)}; have {', '.join(by_name)}",
                         cfg.raw(key)[1], cfg.source)
    return [by_name[n] for n in wanted]


def _static_classes(cfg):
    path = cfg.get_path("classes_file")
    return _select(cfg, load_classes(path) if path else builtin_classes())


def _rt_classes(cfg):
    size = cfg.get_interval("size_range")
    return [replace(c, size_multiplier_range=size) for c in _select(cfg, builtin_rt_classes())]


def _out(cfg, suffix=""):
    p = cfg.get_path("output")
    if p is None or not suffix:
        return p
    return p.with_name(p.stem + suffix + p.suffix)


def run_scale(cfg):
    """Makespan against task size with gamma, beta and ci held at class midpoints."""
    cluster = _physical_cluster(cfg)
    rows = []
    for cls in _static_classes(cfg):
        platform = normalize(cluster, cls.ci_range.geometric_mid)
        alloc = allocate(platform, DivisibilitySpec(1.0 - cls.gamma_range.mid, cls.beta_range.mid))
        for c in cfg.get_floats("L_multipliers"):
            L = c * cls.L_range.lo
            rows.append((cls.name, L, alloc.t_star, makespan_for_load(alloc, L)))
    return [Table(_out(cfg), ("class", "L", "t_star", "makespan"), rows)]


def run_sensitivity(cfg):
    """Random tasks per class on a fixed topology; raw rows plus per-class means."""
    cluster = _physical_cluster(cfg)
    rng = np.random.default_rng(cfg.get_int("seed"))
    n = cfg.get_int("samples")
    header = ("class", "L", "gamma", "beta", "ci", "t_star_seconds")
    rows, means = [], []
    for cls in _static_classes(cfg):
        batch = sample_tasks(cls, rng, n)
        class_rows = []
        for i in range(n):
            task = batch[i]
            alloc = allocate(normalize(cluster, task.ci), DivisibilitySpec(task.f, task.beta))
            class_rows.append((cls.name, task.L, task.gamma, task.beta, task.ci,
                               makespan_for_load(alloc, task.L)))
        rows.extend(class_rows)
        means.append((cls.name, *(math.fsum(r[k] for r in class_rows) / n for k in range(1, 6))))
    return [Table(_out(cfg), header, rows), Table(_out(cfg, ".means"), header, means)]


def run_sizing(cfg):
    """Cumulative child contribution against the rate deficit, one row per cluster size."""
    platform = _platform(cfg)
    t_req = cfg.get_float("t_req_factor") * platform.w0
    report = n_min(DeadlineQuery(t_req, platform, cfg.get_float("beta")))
    rows = [(0, 0.0, report.delta, int(report.delta <= 0))]
    for k, cum in enumerate(report.cumulative, start=1):
        rows.append((k, cum, report.delta, int(cum >= report.delta)))
    return [Table(_out(cfg), ("n", "cumulative_g", "threshold", "feasible"), rows)]


def _rt_base(cfg):
    return dict(
        policy=AdmissionPolicy(cfg.get_float("slack")),
        n_arrivals=cfg.get_int("n_arrivals"),
        warmup=cfg.get_float("warmup"),
        n_pilot=cfg.get_int("n_pilot"),
    )


def _seeds(cfg):
    return range(cfg.get_int("seed"), cfg.get_int("seed") + cfg.get_int("replications"))


def _rt_rows(cfg, points):
    rows = []
    for key, sim in points:
        stats = replicate(sim, _seeds(cfg), workers=cfg.get_int("workers"))
        rows.append((*key, stats.blocking_probability, stats.ci95_halfwidth))
    rows.sort(key=lambda r: r[:2])
    return rows


def run_rt_load(cfg):
    platform, base = _platform(cfg), _rt_base(cfg)
    points = [((cls.name, a), SimConfig(platform, TaskSource(cls), a, **base))
              for cls in _rt_classes(cfg) for a in cfg.get_floats("loads")]
    return [Table(_out(cfg), ("class", "a", "mean_blocking", "ci95"), _rt_rows(cfg, points))]


def run_rt_seqfrac(cfg):
    """Blocking against the relay-only fraction at a fixed arrival rate.

    The rate is calibrated once against the class at ``calibrate_f`` and then
    held while ``f`` sweeps, so a larger relay-only part raises the real load.
    """
    platform, base, load = _platform(cfg), _rt_base(cfg), cfg.get_float("load")
    ref_f = cfg.get_float("calibrate_f")
    points = [((cls.name, f), SimConfig(platform, TaskSource(cls, f), load,
                                        calibration_source=TaskSource(cls, ref_f), **base))
              for cls in _rt_classes(cfg) for f in cfg.get_floats("f_values")]
    return [Table(_out(cfg), ("class", "f", "mean_blocking", "ci95"), _rt_rows(cfg, points))]


def run_rt_bandwidth(cfg):
    """Blocking against ISL bandwidth scale, rate calibrated at ``calibrate_scale``."""
    platform, base, load = _platform(cfg), _rt_base(cfg), cfg.get_float("load")
    ref = scale_bandwidth(platform, cfg.get_float("calibrate_scale"))
    points = [((cls.name, s), SimConfig(scale_bandwidth(platform, s), TaskSource(cls), load,
                                        calibration_platform=ref, **base))
              for cls in _rt_classes(cfg) for s in cfg.get_floats("bw_scales")]
    return [Table(_out(cfg), ("class", "bw_scale", "mean_blocking", "ci95"), _rt_rows(cfg, points))]


DRIVERS = {
    "scale": run_scale,
    "sensitivity": run_sensitivity,
    "sizing": run_sizing,
    "rt-load": run_rt_load,
    "rt-seqfrac": run_rt_seqfrac,
    "rt-bandwidth": run_rt_bandwidth,
}


def run_experiment(cfg: ExperimentConfig) -> list[Table]:
    return DRIVERS[cfg.experiment](cfg)
