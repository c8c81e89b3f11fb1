import pytest

from mpccdlt.errors import ParseError
from mpccdlt.experiments import ExperimentConfig, run_experiment
from mpccdlt.workload import builtin_classes


def cfg(text, tmp_path=None):
    return ExperimentConfig.from_text(text, base_dir=tmp_path or ".")


def test_scale_rows_are_linear():
    (table,) = run_experiment(cfg("experiment = scale\n"))
    assert table.header == ("class", "L", "t_star", "makespan")
    assert len(table.rows) == 16
    for name in {r[0] for r in table.rows}:
        rows = [r for r in table.rows if r[0] == name]
        base = rows[0]
        for (_, L, t, m), c in zip(rows, (1, 2, 4, 8)):
            assert L == c * base[1] and t == base[2] and m == c * base[3]


def test_scale_uses_class_file(tmp_path):
    (tmp_path / "c.txt").write_text("class Mine gamma=0.9:0.9 beta=0.1:0.1 L=10:10 ci=1e8:1e8\n")
    (table,) = run_experiment(cfg("experiment = scale\nclasses_file = c.txt\nL_multipliers = 1,3\n",
                                  tmp_path))
    assert [r[:2] for r in table.rows] == [("Mine", 10.0), ("Mine", 30.0)]


def test_sensitivity_shape_and_ranges():
    raw, means = run_experiment(cfg("experiment = sensitivity\nseed = 4\n"))
    assert raw.header == ("class", "L", "gamma", "beta", "ci", "t_star_seconds")
    assert len(raw.rows) == 48 and len(means.rows) == 4
    classes = {c.name: c for c in builtin_classes()}
    for name, L, gamma, beta, ci, t in raw.rows:
        c = classes[name]
        assert L in c.L_range and gamma in c.gamma_range and beta in c.beta_range and ci in c.ci_range
        assert t > 0
    iot = [r for r in raw.rows if r[0] == "IoT Agg."]
    assert means.rows[0][1] == pytest.approx(sum(r[1] for r in iot) / 12)


def test_sizing_flip_on_reference_topology():
    (table,) = run_experiment(cfg("experiment = sizing\nplatform = reference\nci = 1e7\n"))
    flags = [r[3] for r in table.rows]
    first = flags.index(1)
    assert first > 1                       # needs several neighbours
    assert flags == [0] * first + [1] * (len(flags) - first)


def test_unknown_class_and_bad_value():
    with pytest.raises(ParseError):
        run_experiment(cfg("experiment = rt-load\nclasses = A,Q\n"))
    with pytest.raises(ParseError):
        run_experiment(cfg("experiment = rt-load\nloads = 0.3,x\n"))
    with pytest.raises(ParseError):
        run_experiment(cfg("experiment = sizing\nplatform = moon\n"))


def test_small_rt_runs_have_expected_shape():
    base = "replications = 3\nn_arrivals = 2000\n"
    (load,) = run_experiment(cfg("experiment = rt-load\n" + base))
    assert [r[:2] for r in load.rows][:3] == [("A", 0.3), ("A", 0.7), ("A", 1.2)]
    (seq,) = run_experiment(cfg("experiment = rt-seqfrac\n" + base))
    assert len(seq.rows) == 14 and {r[0] for r in seq.rows} == {"A", "D"}
    (bw,) = run_experiment(cfg("experiment = rt-bandwidth\n" + base))
    assert [r[1] for r in bw.rows] == [0.5, 1.0, 2.0, 4.0] * 2
    for table in (load, seq, bw):
        assert all(0 <= r[2] <= 1 and r[3] >= 0 for r in table.rows)


def test_seqfrac_rate_is_held_across_the_sweep():
    # with the rate recalibrated at every f the curve would be flat; held, it rises
    (seq,) = run_experiment(cfg("experiment = rt-seqfrac\nclasses = A\nreplications = 4\n"
                                "n_arrivals = 3000\nf_values = 0, 0.6\n"))
    assert seq.rows[1][2] > seq.rows[0][2]
    (flat,) = run_experiment(cfg("experiment = rt-seqfrac\nclasses = A\nreplications = 4\n"
                                 "n_arrivals = 3000\nf_values = 0.6\ncalibrate_f = 0.6\n"))
    assert flat.rows[0][2] == pytest.approx(seq.rows[0][2], abs=0.03)
