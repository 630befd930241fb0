import csv
import io
import json

import pytest

from qpac import cli
from qpac.cli import EXIT_CHECK, EXIT_CONFIG, EXIT_OK, main
from qpac.harness import (CSV_COLUMNS, ConfigError, ExperimentConfig, ExperimentResult, build_class,
                          build_distribution, classical_sample_count, loglog_slope,
                          records_to_csv, run_experiment, summary_to_json)
from qpac.sim import make_rng


def write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return p


SMALL_LEARN = {"experiment": "learn", "class": {"name": "full", "domain_size": 5},
               "distribution": {"name": "perturbed-delta", "x0": 0},
               "epsilons": [0.1], "delta": 0.2, "trials": 6, "seed": 3}


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(experiment="nope")
    with pytest.raises(ConfigError):
        ExperimentConfig(experiment="learn", epsilons=[0.01, 0.02])
    with pytest.raises(ConfigError):
        ExperimentConfig(experiment="learn", epsilons=[])
    with pytest.raises(ConfigError):
        ExperimentConfig(experiment="learn", delta=1.5)
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"experiment": "learn", "bogus": 1})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"experiment": "vc"}, "learn")
    cfg = ExperimentConfig.from_dict(SMALL_LEARN)
    assert cfg.concept_class["domain_size"] == 5


def test_class_and_distribution_specs(tmp_path):
    assert len(build_class({"name": "points", "domain_size": 4})) == 4
    assert len(build_class({"name": "junta", "n": 2, "k": 1})) == 6
    inline = build_class({"name": "inline", "domain_size": 2, "concepts": ["01", "11"]})
    assert len(inline) == 2
    path = write(tmp_path, {"domain_size": 2, "concepts": ["00"]}, "cls.json")
    assert len(build_class({"name": "file", "path": str(path)})) == 1
    for bad in ({"name": "mystery"}, {"name": "junta", "n": 2}, {"name": "full", "domain_size": 99}):
        with pytest.raises(ConfigError):
            build_class(bad)
    rng = make_rng(0)
    assert build_distribution({"name": "perturbed-delta"}, 5, 0.05, rng).probs[0] == pytest.approx(0.8)
    with pytest.raises(ConfigError):
        build_distribution({"name": "explicit", "probs": [1.0]}, 3, 0.1, rng)
    with pytest.raises(ConfigError):
        build_distribution({"name": "gaussian"}, 3, 0.1, rng)


def test_helpers():
    assert loglog_slope([1, 2, 4], [1, 0.5, 0.25]) == pytest.approx(-1)
    assert classical_sample_count(256, 0.01, 0.2) == 716


def test_cli_exit_codes(tmp_path, capsys):
    cfg = write(tmp_path, SMALL_LEARN)
    assert main(["learn", "--config", str(cfg), "--check"]) == EXIT_OK
    summary = json.loads(capsys.readouterr().out)
    assert summary["passed"] is True
    bad = write(tmp_path, {"experiment": "learn", "epsilons": [2.0]}, "bad.json")
    assert main(["learn", "--config", str(bad)]) == EXIT_CONFIG
    assert main(["learn", "--config", str(tmp_path / "missing.json")]) == EXIT_CONFIG
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert main(["learn", "--config", str(broken)]) == EXIT_CONFIG
    capsys.readouterr()


def test_cli_check_failure_exit_code(tmp_path, monkeypatch, capsys):
    def failing(cfg):
        return ExperimentResult({"experiment": cfg.experiment, "passed": False}, [], False)

    monkeypatch.setattr(cli, "run_experiment", failing)
    cfg = write(tmp_path, SMALL_LEARN)
    assert main(["learn", "--config", str(cfg), "--check"]) == EXIT_CHECK
    assert main(["learn", "--config", str(cfg)]) == EXIT_OK
    capsys.readouterr()


def test_outputs_are_reproducible(tmp_path):
    cfg = write(tmp_path, SMALL_LEARN)
    outs = []
    for k in range(2):
        stem = tmp_path / f"run{k}"
        assert main(["learn", "--config", str(cfg), "--out", str(stem)]) == EXIT_OK
        outs.append((stem.with_suffix(".json").read_bytes(), stem.with_suffix(".csv").read_bytes()))
    assert outs[0] == outs[1]
    assert main(["learn", "--config", str(cfg), "--seed", "4", "--out", str(tmp_path / "o")]) == 0
    assert (tmp_path / "o.json").read_bytes() != outs[0][0]


def test_csv_schema(tmp_path):
    stem = tmp_path / "g"
    cfg = write(tmp_path, {"experiment": "grover-stats", "epsilons": [0.1], "trials": 4,
                           "scenarios": 3})
    assert main(["grover-stats", "--config", str(cfg), "--out", str(stem), "--check"]) == EXIT_OK
    rows = list(csv.reader(io.StringIO(stem.with_suffix(".csv").read_text())))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 1 + 12
    assert all(r[-1] == "0.0" for r in rows[1:])
    assert {r[5] for r in rows[1:]} <= {"0", "1"}


def test_timing_flag_fills_wall_clock(tmp_path):
    stem = tmp_path / "t"
    cfg = write(tmp_path, SMALL_LEARN)
    assert main(["learn", "--config", str(cfg), "--out", str(stem), "--timing"]) == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(stem.with_suffix(".csv").read_text())))
    assert any(float(r["wall_ms"]) > 0 for r in rows)


def test_learn_report_schema():
    res = run_experiment(ExperimentConfig.from_dict(SMALL_LEARN))
    assert len(res.records) == 6
    trial = res.summary["trials"][0]
    for key in ("epsilon", "delta", "seed", "T_E", "R", "transcript", "output_bits",
                "distance_to_truth", "oracle_calls_forward", "oracle_calls_inverse",
                "inner_epsilon", "inner_delta", "truth_bits", "stopped_by"):
        assert key in trial
    assert trial["inner_epsilon"] == pytest.approx(0.025)
    assert trial["T_E"] == 6
    for rec, rep in zip(res.records, res.summary["trials"]):
        assert rec.oracle_calls == rep["oracle_calls_forward"] + rep["oracle_calls_inverse"]
        assert rec.success == (rep["distance_to_truth"] <= rec.epsilon)


def test_singleton_class_learns_exactly():
    cfg = ExperimentConfig.from_dict({
        "experiment": "learn", "class": {"name": "inline", "domain_size": 3, "concepts": ["101"]},
        "distribution": {"name": "uniform"}, "epsilons": [0.1], "trials": 5})
    res = run_experiment(cfg)
    assert all(r.distance == 0 and r.oracle_calls == 0 for r in res.records)


def test_parallel_matches_serial():
    serial = run_experiment(ExperimentConfig.from_dict(SMALL_LEARN))
    parallel = run_experiment(ExperimentConfig.from_dict({**SMALL_LEARN, "workers": 2}))
    assert records_to_csv(serial.records) == records_to_csv(parallel.records)
    assert summary_to_json(serial.summary) == summary_to_json(parallel.summary)


def test_grover_stats_columns():
    res = run_experiment(ExperimentConfig.from_dict(
        {"experiment": "grover-stats", "class": {"name": "full", "domain_size": 6},
         "epsilons": [0.2, 0.01], "trials": 30, "scenarios": 6, "seed": 2}))
    assert res.passed
    for row in res.summary["scenarios"]:
        if row["kind"] == "mass-eq-eps":
            assert row["good_mass"] == pytest.approx(row["epsilon"])
            assert row["exact"] >= 0.09
        if row["kind"] == "mass-zero":
            assert row["exact"] == 0 and row["empirical"] == 0
        if row["closed_form"] is not None:
            assert row["closed_form"] == pytest.approx(row["exact"], abs=1e-9)


def test_reduction_and_vc_commands():
    res = run_experiment(ExperimentConfig(experiment="reduction-check", epsilons=[0.1], d=4))
    assert res.passed and len(res.summary["checks"]) == 16
    res = run_experiment(ExperimentConfig(experiment="reduction-check", epsilons=[0.1], d=6,
                                          samples=10))
    assert res.passed and len(res.summary["checks"]) == 10
    with pytest.raises(ConfigError):
        run_experiment(ExperimentConfig(experiment="reduction-check", d=9))
    with pytest.raises(ConfigError):
        run_experiment(ExperimentConfig(experiment="reduction-check", epsilons=[0.5]))
    res = run_experiment(ExperimentConfig(experiment="vc",
                                          concept_class={"name": "junta", "n": 4, "k": 2}))
    assert res.summary["vc_dimension"] <= res.summary["bound_log_binomial"]
    with pytest.raises(ConfigError):
        run_experiment(ExperimentConfig(experiment="junta"))


def test_scaling_needs_three_octaves():
    with pytest.raises(ConfigError):
        run_experiment(ExperimentConfig(experiment="scaling", epsilons=[0.02, 0.01, 0.005]))
    with pytest.raises(ConfigError):
        run_experiment(ExperimentConfig(experiment="scaling", epsilons=[0.02, 0.0025]))
