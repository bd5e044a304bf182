"""Command line interface: exit codes, subcommands, config handling,
and end-to-end determinism."""

import json
import subprocess
import sys

import pytest

from adaptsim.cli import main
from adaptsim.model import Role
from adaptsim.snapshot import read_snapshot, write_snapshot


def test_no_subcommand_is_a_usage_error(capsys):
    assert main([]) == 1


def test_help_exits_cleanly(capsys):
    assert main(["--help"]) == 0
    assert "adaptsim" in capsys.readouterr().out


def test_list_engines(capsys):
    assert main(["list", "engines"]) == 0
    assert capsys.readouterr().out.splitlines() == [
        "monolithic",
        "mape",
        "event-healing",
        "event-optimizing",
        "noop",
    ]


def test_list_scenarios_and_issues(capsys):
    assert main(["list", "scenarios"]) == 0
    assert capsys.readouterr().out.splitlines() == ["healing", "optimization"]
    assert main(["list", "issues"]) == 0
    issues = capsys.readouterr().out.splitlines()
    assert len(issues) == 8
    assert "component-crash" in issues and "response-underrun" in issues


def test_list_rejects_unknown_topics(capsys):
    assert main(["list", "colors"]) == 1


# --------------------------------------------------------------------------
# generate


def test_generate_writes_a_loadable_model(tmp_path, capsys):
    out = tmp_path / "market.model"
    assert main(["generate", "--shops", "2", "--seed", "3", "--out", str(out)]) == 0
    assert "market.model" in capsys.readouterr().out
    arch = read_snapshot(out)
    assert len(arch.all_components()) == 36


def test_generate_rejects_zero_shops(tmp_path, capsys):
    out = tmp_path / "market.model"
    assert main(["generate", "--shops", "0", "--out", str(out)]) == 1
    assert "usage error" in capsys.readouterr().err
    assert not out.exists()


def test_generate_requires_an_output_path(capsys):
    assert main(["generate", "--shops", "1"]) == 1


# --------------------------------------------------------------------------
# simulate


def test_simulate_writes_a_report(tmp_path, capsys):
    out = tmp_path / "run"
    code = main(
        [
            "simulate",
            "--case", "healing",
            "--engine", "event-healing",
            "--shops", "1",
            "--rounds", "4",
            "--seed", "2",
            "--out", str(out),
        ]
    )
    assert code == 0
    stdout = capsys.readouterr().out
    assert "engine event-healing" in stdout
    assert "scenario healing" in stdout
    assert "rounds 4" in stdout
    assert f"report written to {out}" in stdout
    names = {p.name for p in out.iterdir()}
    assert {"utility.csv", "exectime.csv", "events.log", "summary.txt"} <= names


def test_simulate_defaults(capsys):
    assert main(["simulate", "--rounds", "0"]) == 0
    stdout = capsys.readouterr().out
    assert "engine mape" in stdout
    assert "scenario healing" in stdout
    assert "seed 1" in stdout
    assert "rounds 0" in stdout


@pytest.mark.parametrize(
    "argv",
    [
        ["simulate", "--shops", "-2", "--rounds", "1"],
        ["simulate", "--rounds", "-1"],
        ["simulate", "--engine", "bogus", "--rounds", "1"],
        ["simulate", "--case", "bogus", "--rounds", "1"],
        ["simulate", "--rounds", "1", "--snapshot-rounds", "2,x"],
    ],
)
def test_simulate_usage_errors(argv, capsys):
    assert main(argv) == 1


def test_simulate_snapshot_round_outside_the_run_is_a_runtime_fault(capsys):
    assert main(["simulate", "--rounds", "5", "--snapshot-rounds", "99"]) == 2
    assert "error" in capsys.readouterr().err


def test_simulate_reads_a_config_file(tmp_path, capsys):
    config = tmp_path / "run.json"
    config.write_text(
        json.dumps({"shops": 1, "rounds": 3, "engine": "noop", "seed": 8}),
        encoding="utf-8",
    )
    assert main(["simulate", "--config", str(config)]) == 0
    stdout = capsys.readouterr().out
    assert "engine noop" in stdout
    assert "rounds 3" in stdout
    assert "seed 8" in stdout


def test_flags_override_the_config_file(tmp_path, capsys):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"rounds": 3, "seed": 4, "shops": 1}), encoding="utf-8")
    assert main(["simulate", "--config", str(config), "--rounds", "5"]) == 0
    stdout = capsys.readouterr().out
    assert "rounds 5" in stdout  # the flag wins
    assert "seed 4" in stdout  # the file fills the rest


@pytest.mark.parametrize(
    "content",
    [
        '{"shoops": 1}',
        "[1, 2]",
        "{not json",
        '{"thresholds": {"bogus": 1}, "rounds": 1}',
    ],
)
def test_bad_config_files_are_usage_errors(tmp_path, content, capsys):
    config = tmp_path / "run.json"
    config.write_text(content, encoding="utf-8")
    assert main(["simulate", "--config", str(config)]) == 1
    assert "usage error" in capsys.readouterr().err


def test_missing_config_file_is_a_usage_error(tmp_path, capsys):
    assert main(["simulate", "--config", str(tmp_path / "absent.json")]) == 1


def test_config_thresholds_are_applied(tmp_path, capsys):
    config = tmp_path / "run.json"
    config.write_text(
        json.dumps({"shops": 1, "rounds": 2, "thresholds": {"exception_threshold": 3}}),
        encoding="utf-8",
    )
    assert main(["simulate", "--config", str(config)]) == 0


# --------------------------------------------------------------------------
# validate


def test_validate_accepts_a_fresh_model(tmp_path, capsys):
    model = tmp_path / "market.model"
    main(["generate", "--shops", "1", "--seed", "5", "--out", str(model)])
    capsys.readouterr()
    assert main(["validate", "--model", str(model)]) == 0
    assert "is valid" in capsys.readouterr().out
    assert main(["validate", "--model", str(model), "--case", "healing"]) == 0


def test_validate_reports_violations(tmp_path, capsys):
    model = tmp_path / "market.model"
    main(["generate", "--shops", "1", "--seed", "5", "--out", str(model)])
    arch = read_snapshot(model)
    sim = arch.handle(Role.SIMULATOR)
    sim.remove_connector(arch.all_connectors()[0])
    write_snapshot(arch, model)
    capsys.readouterr()
    assert main(["validate", "--model", str(model)]) == 2
    stdout = capsys.readouterr().out
    assert "unconnected" in stdout
    assert "violation(s)" in stdout


def test_validate_missing_model_is_a_runtime_fault(tmp_path, capsys):
    assert main(["validate", "--model", str(tmp_path / "absent.model")]) == 2
    assert "error" in capsys.readouterr().err


# --------------------------------------------------------------------------
# End to end


def test_simulations_are_reproducible_through_the_cli(tmp_path, capsys):
    argv = [
        "simulate",
        "--case", "healing",
        "--engine", "event-healing",
        "--shops", "2",
        "--rounds", "5",
        "--seed", "9",
    ]
    assert main(argv + ["--out", str(tmp_path / "first")]) == 0
    assert main(argv + ["--out", str(tmp_path / "second")]) == 0
    for name in ("utility.csv", "events.log"):
        first = (tmp_path / "first" / name).read_bytes()
        second = (tmp_path / "second" / name).read_bytes()
        assert first == second, name


def test_module_entry_point_runs():
    result = subprocess.run(
        [sys.executable, "-m", "adaptsim.cli", "list", "engines"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert result.returncode == 0
    assert "event-optimizing" in result.stdout
