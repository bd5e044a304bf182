"""Report files: delimited outputs, the event log, summaries, charts,
and byte-level determinism."""

import csv
import json
import random

from adaptsim.engines import build_engine
from adaptsim.events import ChangeEventKind
from adaptsim.kernel import SimulationConfig, run_simulation
from adaptsim.marketplace import Thresholds, build_case, generate_architecture
from adaptsim.report import (
    exectime_series,
    summary_lines,
    utility_series,
    write_report,
)

THRESHOLDS = Thresholds()


def simulate(out_dir=None, shops=2, rounds=6, seed=5, snapshot_rounds=frozenset()):
    arch = generate_architecture(shops, random.Random(seed), THRESHOLDS)
    case = build_case("healing", THRESHOLDS)
    engine = build_engine("event-healing", THRESHOLDS)
    config = SimulationConfig(
        rounds=rounds,
        scenario=case.scenario,
        injectors=case.injectors,
        validators=case.validators,
        utility=case.utility,
        seed=seed,
        snapshot_rounds=snapshot_rounds,
        output_dir=out_dir,
    )
    return run_simulation(arch, engine, config)


def test_utility_series_interleaves_the_two_measurements():
    report = simulate(rounds=2)
    xs, ys = utility_series(report)
    assert xs == [0.0, 0.5, 1.0, 1.5, 2.0]
    assert ys == [
        report.initial_utility,
        report.rounds[0].utility_after_injection,
        report.rounds[0].utility_after_adaptation,
        report.rounds[1].utility_after_injection,
        report.rounds[1].utility_after_adaptation,
    ]


def test_utility_series_of_an_empty_run():
    report = simulate(rounds=0)
    assert utility_series(report) == ([0.0], [report.initial_utility])


def test_exectime_series_is_one_point_per_round():
    report = simulate(rounds=4)
    rounds, times = exectime_series(report)
    assert rounds == [1, 2, 3, 4]
    assert all(t > 0.0 for t in times)


def test_utility_csv_schema_and_roundtrip(tmp_path):
    report = simulate(out_dir=tmp_path, rounds=5)
    with (tmp_path / "utility.csv").open(encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["round", "phase", "utility"]
    assert len(rows) == 1 + 2 * 5
    for record in report.rounds:
        injection_row = rows[2 * record.index - 1]
        adaptation_row = rows[2 * record.index]
        assert injection_row[:2] == [str(record.index), "afterInjection"]
        assert adaptation_row[:2] == [str(record.index), "afterAdaptation"]
        # repr() round-trips the exact float value through the file.
        assert float(injection_row[2]) == record.utility_after_injection
        assert float(adaptation_row[2]) == record.utility_after_adaptation


def test_exectime_csv_schema(tmp_path):
    report = simulate(out_dir=tmp_path, rounds=5)
    with (tmp_path / "exectime.csv").open(encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["round", "execution_time_ms"]
    assert [row[0] for row in rows[1:]] == [str(r.index) for r in report.rounds]
    for row, record in zip(rows[1:], report.rounds):
        assert float(row[1]) == record.execution_time_ms


def test_event_log_lines_parse(tmp_path):
    report = simulate(out_dir=tmp_path, rounds=6)
    lines = (tmp_path / "events.log").read_text(encoding="utf-8").splitlines()
    assert len(lines) == len(report.event_log)
    known_kinds = {kind.value for kind in ChangeEventKind}
    timestamps = []
    for line in lines:
        round_index, step, timestamp, kind, subject_uid, payload = line.split(",", 5)
        assert int(round_index) >= 1
        assert int(step) in (1, 3, 5)
        timestamps.append(int(timestamp))
        assert kind in known_kinds
        assert subject_uid
        assert isinstance(json.loads(payload), dict)
    assert timestamps == sorted(timestamps)
    assert len(set(timestamps)) == len(timestamps)


def test_summary_is_eleven_labeled_lines(tmp_path):
    report = simulate(out_dir=tmp_path, rounds=3)
    lines = summary_lines(report)
    assert len(lines) == 11
    expected_prefixes = [
        "architecture ",
        "engine event-healing",
        "scenario healing",
        "seed 5",
        "rounds 3",
        "initial_utility ",
        "final_utility ",
        "mean_execution_time_ms ",
        "max_execution_time_ms ",
        "rounds_fully_healed 3 of 3",
        "engine_model_accesses ",
    ]
    for line, prefix in zip(lines, expected_prefixes):
        assert line.startswith(prefix), (line, prefix)
    on_disk = (tmp_path / "summary.txt").read_text(encoding="utf-8")
    assert on_disk == "\n".join(lines) + "\n"


def test_write_report_produces_the_full_file_set(tmp_path):
    simulate(out_dir=tmp_path, rounds=4, snapshot_rounds=frozenset({1, 3}))
    names = {p.name for p in tmp_path.iterdir()}
    assert names == {
        "utility.csv",
        "exectime.csv",
        "events.log",
        "summary.txt",
        "utility.svg",
        "exectime.svg",
        "snapshot-round-0001.model",
        "snapshot-round-0003.model",
    }


def test_charts_are_svg_documents(tmp_path):
    simulate(out_dir=tmp_path, rounds=3)
    for name in ("utility.svg", "exectime.svg"):
        text = (tmp_path / name).read_text(encoding="utf-8")
        assert text.startswith("<?xml")
        assert "<svg" in text


def test_deterministic_outputs_are_byte_identical(tmp_path):
    first = tmp_path / "first"
    second = tmp_path / "second"
    simulate(out_dir=first, rounds=6, snapshot_rounds=frozenset({4}))
    simulate(out_dir=second, rounds=6, snapshot_rounds=frozenset({4}))
    # Wall-clock timings differ run to run; everything else must not.
    for name in ("utility.csv", "events.log", "utility.svg", "snapshot-round-0004.model"):
        assert (first / name).read_bytes() == (second / name).read_bytes(), name
    assert (first / "exectime.csv").exists() and (second / "exectime.csv").exists()


def test_different_seeds_change_the_outputs(tmp_path):
    first = tmp_path / "first"
    second = tmp_path / "second"
    simulate(out_dir=first, rounds=6, seed=5)
    simulate(out_dir=second, rounds=6, seed=6)
    assert (first / "events.log").read_bytes() != (second / "events.log").read_bytes()
