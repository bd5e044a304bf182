"""Report files for a finished simulation run.

A run's directory holds delimited text (utility.csv, exectime.csv,
events.log, summary.txt), any requested model snapshots, and two SVG
charts rendered with matplotlib: the utility step chart with the two
measurements of every round, and the per-round engine execution time.

Everything except the execution-time figures is deterministic for a
given configuration and seed: utility values, the event log, and the
utility chart come out byte-identical run after run.  Wall-clock
execution times naturally differ, so exectime.csv, the timing lines of
summary.txt, and exectime.svg are exempt.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .kernel import SimulationReport

UTILITY_CSV = "utility.csv"
EXECTIME_CSV = "exectime.csv"
EVENTS_LOG = "events.log"
SUMMARY_TXT = "summary.txt"
UTILITY_SVG = "utility.svg"
EXECTIME_SVG = "exectime.svg"


def utility_series(report: SimulationReport) -> tuple[list[float], list[float]]:
    """X/Y pairs of the utility trajectory: the initial value at round
    zero, then the after-injection and after-adaptation measurement of
    every round."""
    xs: list[float] = [0.0]
    ys: list[float] = [report.initial_utility]
    for record in report.rounds:
        xs.append(record.index - 0.5)
        ys.append(record.utility_after_injection)
        xs.append(float(record.index))
        ys.append(record.utility_after_adaptation)
    return xs, ys


def exectime_series(report: SimulationReport) -> tuple[list[int], list[float]]:
    rounds = [r.index for r in report.rounds]
    times = [r.execution_time_ms for r in report.rounds]
    return rounds, times


def write_utility_csv(report: SimulationReport, path: Path) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["round", "phase", "utility"])
        for record in report.rounds:
            writer.writerow([record.index, "afterInjection", repr(record.utility_after_injection)])
            writer.writerow([record.index, "afterAdaptation", repr(record.utility_after_adaptation)])


def write_exectime_csv(report: SimulationReport, path: Path) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["round", "execution_time_ms"])
        for record in report.rounds:
            writer.writerow([record.index, repr(record.execution_time_ms)])


def write_event_log(report: SimulationReport, path: Path) -> None:
    """One line per change event: round,step,timestamp,kind,subjectUid,payload.

    The payload is canonical JSON and comes last, so the line splits
    cleanly on the first five commas."""
    with path.open("w", encoding="utf-8", newline="") as fh:
        for round_index, step, event in report.event_log:
            payload = json.dumps(event.payload, sort_keys=True, separators=(",", ":"))
            fh.write(
                f"{round_index},{step},{event.timestamp},{event.kind.value},{event.subject_uid},{payload}\n"
            )


def summary_lines(report: SimulationReport) -> list[str]:
    healed = report.rounds_fully_healed
    return [
        f"architecture {report.architecture_name}",
        f"engine {report.engine_name}",
        f"scenario {report.scenario_name}",
        f"seed {report.seed}",
        f"rounds {len(report.rounds)}",
        f"initial_utility {report.initial_utility!r}",
        f"final_utility {report.final_utility!r}",
        f"mean_execution_time_ms {report.mean_execution_time_ms:.3f}",
        f"max_execution_time_ms {report.max_execution_time_ms:.3f}",
        f"rounds_fully_healed {healed} of {len(report.rounds)}",
        f"engine_model_accesses {report.engine_model_accesses}",
    ]


def write_summary(report: SimulationReport, path: Path) -> None:
    path.write_text("\n".join(summary_lines(report)) + "\n", encoding="utf-8")


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    return plt


def _save_deterministic(fig, path: Path, salt: str) -> None:
    # A fixed hash salt and no date metadata keep the SVG bytes stable.
    import matplotlib

    with matplotlib.rc_context({"svg.hashsalt": salt}):
        fig.savefig(path, format="svg", metadata={"Date": None})


def render_utility_chart(report: SimulationReport, path: Path) -> None:
    plt = _pyplot()
    xs, ys = utility_series(report)
    fig, ax = plt.subplots(figsize=(8.0, 4.5), dpi=100)
    ax.step(xs, ys, where="post", color="#1f77b4", linewidth=1.2)
    ax.plot(xs, ys, linestyle="none", marker=".", markersize=4, color="#1f77b4")
    ax.set_xlabel("round")
    ax.set_ylabel("utility")
    ax.set_title(f"utility per round ({report.engine_name}, seed {report.seed})")
    ax.grid(True, linewidth=0.3, alpha=0.5)
    fig.tight_layout()
    _save_deterministic(fig, path, report.architecture_name)
    plt.close(fig)


def render_exectime_chart(report: SimulationReport, path: Path) -> None:
    plt = _pyplot()
    xs, ys = exectime_series(report)
    fig, ax = plt.subplots(figsize=(8.0, 4.5), dpi=100)
    ax.plot(xs, ys, marker="o", markersize=3, linewidth=1.0, color="#d62728")
    ax.set_xlabel("round")
    ax.set_ylabel("execution time [ms]")
    ax.set_title(f"engine execution time per round ({report.engine_name})")
    ax.grid(True, linewidth=0.3, alpha=0.5)
    fig.tight_layout()
    _save_deterministic(fig, path, report.architecture_name)
    plt.close(fig)


def write_report(report: SimulationReport, out_dir: str | Path) -> None:
    """Write the full report directory: delimited files, snapshots, charts."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_utility_csv(report, out / UTILITY_CSV)
    write_exectime_csv(report, out / EXECTIME_CSV)
    write_event_log(report, out / EVENTS_LOG)
    write_summary(report, out / SUMMARY_TXT)
    for round_index in sorted(report.snapshots):
        name = f"snapshot-round-{round_index:04d}.model"
        (out / name).write_text(report.snapshots[round_index], encoding="utf-8")
    render_utility_chart(report, out / UTILITY_SVG)
    render_exectime_chart(report, out / EXECTIME_SVG)
