"""CLI verbs, exit codes and report files."""

import json

import pytest

from railsim import cli, suite

SCENARIO = """
[scenario]
label = cli demo
seed = 5

[traffic]
count = 60
interval = 20

[paths.0]
id = a
rate = 0.05
delay = normal
mean = 60
stddev = 10

[paths.1]
id = b
delay = constant
mean = 90
"""


@pytest.fixture
def scenario_file(tmp_path):
    path = tmp_path / "demo.scenario"
    path.write_text(SCENARIO)
    return path


def run(argv):
    return cli.main([str(a) for a in argv])


def test_simulate_writes_bundle(scenario_file, tmp_path, capsys):
    out = tmp_path / "out"
    assert run(["simulate", "--scenario", scenario_file, "--out", out]) == 0
    assert (out / "records.csv").exists()
    assert (out / "manifest.json").exists()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["count"] == 60
    assert set(summary["per_path"]) == {"a", "b"}
    header = (out / "records.csv").read_text().splitlines()[0]
    assert header == ("seq,send_ms,arrival_a_ms,arrival_b_ms,"
                      "rail_delay_ms,forward_ms,padding_ms")
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed"] == 5 and "scenario_sha256" in manifest


def test_simulate_rerun_is_byte_identical(scenario_file, tmp_path):
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    assert run(["simulate", "--scenario", scenario_file, "--out", out1]) == 0
    assert run(["simulate", "--scenario", scenario_file, "--out", out2]) == 0
    assert (out1 / "records.csv").read_bytes() == (out2 / "records.csv").read_bytes()
    assert (out1 / "manifest.json").read_bytes() == (out2 / "manifest.json").read_bytes()


def test_simulate_seed_override_changes_records(scenario_file, tmp_path):
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    run(["simulate", "--scenario", scenario_file, "--out", out1])
    run(["simulate", "--scenario", scenario_file, "--seed", 6, "--out", out2])
    assert (out1 / "records.csv").read_text() != (out2 / "records.csv").read_text()


def test_missing_scenario_is_usage_error(tmp_path, capsys):
    assert run(["simulate", "--scenario", tmp_path / "nope.scenario"]) == 1
    assert "scenario not found" in capsys.readouterr().err


def test_invalid_scenario_lists_problems(tmp_path, capsys):
    bad = tmp_path / "bad.scenario"
    bad.write_text("[traffic]\ncount = 0\n[paths.0]\nid = a\nrate = 7\n")
    assert run(["simulate", "--scenario", bad]) == 1
    err = capsys.readouterr().err
    assert "count" in err and "rate" in err


def test_usage_error_exit_code_is_one(capsys):
    assert run(["simulate"]) == 1  # --scenario missing
    assert run(["mos", "--loss", "nope"]) == 1


def test_sweep_verb(scenario_file, tmp_path):
    out = tmp_path / "sweep"
    assert run(["sweep", "--scenario", scenario_file,
                "--parameter", "paths.0.loss.rate",
                "--values", "0.0,0.1,0.2", "--out", out]) == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[0].startswith("paths.0.loss.rate,rail_loss,delivered_fraction")
    assert len(lines) == 4


def test_mos_point_prints_json(capsys):
    assert run(["mos", "--loss", 0.0, "--delay", 0.0]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["r_factor"] == pytest.approx(93.2)
    assert out["mos"] == pytest.approx(4.4093, abs=1e-4)


def test_mos_grid_table(tmp_path):
    out = tmp_path / "grid"
    assert run(["mos", "--grid", "--losses", "0:0.02:0.01",
                "--delays", "0:100:50", "--out", out]) == 0
    lines = (out / "mos_grid.csv").read_text().splitlines()
    assert lines[0] == "loss,delay_ms,r_factor,mos"
    assert len(lines) == 1 + 3 * 3


def test_mos_curve_verb(scenario_file, tmp_path):
    out = tmp_path / "curve"
    assert run(["mos-curve", "--scenario", scenario_file,
                "--deadlines", "50:200:50", "--end-system-delay", 40,
                "--out", out]) == 0
    lines = (out / "mos_curve.csv").read_text().splitlines()
    assert lines[0] == ("deadline_ms,one_way_ms,effective_loss,mos_rail,"
                        "mos_a,mos_b")
    assert len(lines) == 5
    summary = json.loads((out / "summary.json").read_text())
    assert 50 <= summary["optimal_deadline_ms"] <= 200


def test_tcp_model_verb(capsys):
    assert run(["tcp-model", "--paths", "0.01,10;0.01,100"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["better_than_every_path"] is True
    assert out["virtual_path"]["throughput_pps"] == pytest.approx(11201.818, rel=1e-4)


def test_tcp_model_bad_input(capsys):
    assert run(["tcp-model", "--paths", "0.0,10;0.01,100"]) == 1


def test_trace_analyze(tmp_path, capsys):
    trace = tmp_path / "t.trace"
    trace.write_text("1,10\n2,0\n3,30\n4,0\n5,50\n")
    out = tmp_path / "ta"
    assert run(["trace-analyze", "--trace", trace, "--out", out]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["entries"] == 5
    assert summary["loss"] == pytest.approx(0.4)
    assert run(["trace-analyze", "--trace", tmp_path / "missing.trace"]) == 1


def test_json_format_writes_json_tables(scenario_file, tmp_path):
    out = tmp_path / "json-out"
    assert run(["simulate", "--scenario", scenario_file, "--out", out,
                "--format", "json"]) == 0
    rows = json.loads((out / "records.json").read_text())
    assert len(rows) == 60 and rows[0]["seq"] == 0


def test_out_dir_env_default(scenario_file, tmp_path, monkeypatch):
    target = tmp_path / "from-env"
    monkeypatch.setenv(cli.ENV_OUT_DIR, str(target))
    assert run(["simulate", "--scenario", scenario_file]) == 0
    assert (target / "records.csv").exists()


def test_paper_suite_exit_two_on_failure(monkeypatch, capsys, tmp_path):
    from railsim.report import ReportBundle

    def fake_suite():
        bundle = ReportBundle(manifest={"tool": "railsim"})
        return bundle, [suite.Gate("always-fails", False, "synthetic")]

    monkeypatch.setattr(suite, "run_paper_suite", fake_suite)
    assert run(["paper-suite", "--out", tmp_path / "suite"]) == 2
    captured = capsys.readouterr()
    assert "FAIL" in captured.out
    assert "always-fails" in captured.err


def test_paper_suite_exit_zero_and_writes_bundle(monkeypatch, capsys, tmp_path):
    from railsim.report import ReportBundle

    def fake_suite():
        bundle = ReportBundle(manifest={"tool": "railsim"})
        bundle.add_table("demo", ["x"], [[1]])
        bundle.summaries = {"all_passed": True}
        return bundle, [suite.Gate("always-passes", True, "synthetic")]

    monkeypatch.setattr(suite, "run_paper_suite", fake_suite)
    out = tmp_path / "suite"
    assert run(["paper-suite", "--out", out]) == 0
    captured = capsys.readouterr()
    assert "[PASS] always-passes" in captured.out
    assert (out / "demo.csv").exists()
