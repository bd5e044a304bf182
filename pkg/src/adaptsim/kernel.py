"""The round-based simulation loop.

Each round runs six steps: inject issues, measure utility, hand the
drained change events to the adaptation engine (stopping the clock on
it), measure how long the engine took, validate and refresh the model,
and measure utility again.  The engine runs on a worker thread with a
timeout; a hanging or crashing engine fails its round (and loses its
handle) without taking the simulation down, while a faulty injector or
validator aborts the run, because the world itself is broken then.
"""

from __future__ import annotations

import random
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from .events import ChangeEvent
from .marketplace import IssueKind, Violation
from .model import Architecture, Role
from .snapshot import serialize_architecture


class SimulationError(Exception):
    """The simulation itself (not the engine under test) failed."""


@dataclass
class SimulationConfig:
    rounds: int
    scenario: object
    injectors: dict[IssueKind, object]
    validators: list
    utility: object
    seed: int = 0
    snapshot_rounds: frozenset[int] = frozenset()
    output_dir: Path | None = None
    engine_timeout_s: float = 60.0

    def validate(self) -> None:
        if self.rounds < 0:
            raise SimulationError(f"rounds must be non-negative, got {self.rounds}")
        if self.engine_timeout_s <= 0:
            raise SimulationError("engine timeout must be positive")
        kinds = set(getattr(self.scenario, "kinds", ()))
        missing = kinds - set(self.injectors)
        if missing:
            names = ", ".join(sorted(k.value for k in missing))
            raise SimulationError(f"scenario needs injectors for: {names}")
        for r in self.snapshot_rounds:
            if not 1 <= r <= self.rounds:
                raise SimulationError(f"snapshot round {r} outside 1..{self.rounds}")


@dataclass
class RoundRecord:
    index: int
    injected: list[tuple[str, str]]
    utility_after_injection: float
    execution_time_ms: float
    utility_after_adaptation: float
    violations: list[Violation] = field(default_factory=list)
    strategies: list[tuple[str, str]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    engine_failed: bool = False

    @property
    def clean(self) -> bool:
        return not self.engine_failed and not self.violations


@dataclass
class SimulationReport:
    architecture_name: str
    engine_name: str
    scenario_name: str
    seed: int
    rounds: list[RoundRecord]
    initial_utility: float
    final_utility: float
    engine_model_accesses: int
    event_log: list[tuple[int, int, ChangeEvent]]
    snapshots: dict[int, str]

    @property
    def mean_execution_time_ms(self) -> float:
        if not self.rounds:
            return 0.0
        return sum(r.execution_time_ms for r in self.rounds) / len(self.rounds)

    @property
    def max_execution_time_ms(self) -> float:
        return max((r.execution_time_ms for r in self.rounds), default=0.0)

    @property
    def rounds_fully_healed(self) -> int:
        return sum(1 for r in self.rounds if r.clean)


def _run_engine_guarded(engine, handle, events, timeout_s: float):
    """Run one adapt call on a worker thread.

    Returns (outcome or None, elapsed ms, error text or None).  On
    timeout the handle is revoked so a zombie engine thread can no
    longer touch the model."""
    box: dict = {}

    def work() -> None:
        started = time.perf_counter()
        try:
            box["outcome"] = engine.adapt(handle, events)
        except BaseException as error:  # noqa: BLE001 - engine faults must not kill the run
            box["error"] = error
        finally:
            box["elapsed_ms"] = (time.perf_counter() - started) * 1000.0

    thread = threading.Thread(target=work, name=f"engine-{engine.name}", daemon=True)
    thread.start()
    thread.join(timeout_s)
    if thread.is_alive():
        handle.revoke()
        return None, timeout_s * 1000.0, f"engine timed out after {timeout_s:g} s"
    if "error" in box:
        error = box["error"]
        return None, box["elapsed_ms"], f"engine raised {type(error).__name__}: {error}"
    return box["outcome"], box["elapsed_ms"], None


def run_simulation(
    arch: Architecture,
    engine,
    config: SimulationConfig,
    rng: random.Random | None = None,
) -> SimulationReport:
    """Drive the engine through ``config.rounds`` rounds and report.

    ``rng`` continues an existing random stream (the one that generated
    the architecture, usually); by default a fresh one is seeded from
    the config.  When ``config.output_dir`` is set the report is also
    written to disk before returning.
    """
    config.validate()
    if rng is None:
        rng = random.Random(config.seed)
    simulator = arch.handle(Role.SIMULATOR)
    arch.events.clear()

    event_log: list[tuple[int, int, ChangeEvent]] = []
    position = {"round": 0, "step": 0}
    arch.events.set_tap(lambda ev: event_log.append((position["round"], position["step"], ev)))
    try:
        for validator in config.validators:
            prime = getattr(validator, "prime", None)
            if prime is not None:
                prime(simulator)
        initial_utility = config.utility.utility(arch)
        records: list[RoundRecord] = []
        snapshots: dict[int, str] = {}
        engine_accesses = 0

        for round_index in range(1, config.rounds + 1):
            # Step 1: inject this round's issues.
            position["round"], position["step"] = round_index, 1
            injected: list[tuple[str, str]] = []
            try:
                plan = config.scenario.next_injections(round_index, arch, rng)
                for kind, target in plan:
                    config.injectors[kind].inject(simulator, target)
                    injected.append((kind.value, getattr(target, "uid", "?")))
            except Exception as error:
                raise SimulationError(f"round {round_index}: injector failed: {error}") from error

            # Step 2: utility after injection.
            position["step"] = 2
            utility_after_injection = config.utility.utility(arch)

            # Steps 3 and 4: the engine adapts on drained events, timed.
            position["step"] = 3
            events = arch.events.drain()
            engine_handle = arch.handle(Role.ENGINE)
            outcome, elapsed_ms, failure = _run_engine_guarded(
                engine, engine_handle, events, config.engine_timeout_s
            )
            engine_accesses += engine_handle.model_accesses

            record = RoundRecord(
                index=round_index,
                injected=injected,
                utility_after_injection=utility_after_injection,
                execution_time_ms=elapsed_ms,
                utility_after_adaptation=0.0,
            )
            if failure is not None:
                record.engine_failed = True
                record.notes.append(failure)
            elif outcome is not None:
                record.strategies = list(outcome.strategies)
                record.notes.extend(outcome.notes)

            # Step 5: validate and refresh the model.
            position["step"] = 5
            try:
                for validator in config.validators:
                    record.violations.extend(validator.validate(simulator))
            except Exception as error:
                raise SimulationError(f"round {round_index}: validator failed: {error}") from error

            # Step 6: utility after adaptation.
            position["step"] = 6
            record.utility_after_adaptation = config.utility.utility(arch)

            if round_index in config.snapshot_rounds:
                snapshots[round_index] = serialize_architecture(arch)
            records.append(record)

        final_utility = records[-1].utility_after_adaptation if records else initial_utility
    finally:
        arch.events.set_tap(None)

    report = SimulationReport(
        architecture_name=arch.name,
        engine_name=engine.name,
        scenario_name=getattr(config.scenario, "name", "custom"),
        seed=config.seed,
        rounds=records,
        initial_utility=initial_utility,
        final_utility=final_utility,
        engine_model_accesses=engine_accesses,
        event_log=event_log,
        snapshots=snapshots,
    )
    if config.output_dir is not None:
        from .report import write_report

        write_report(report, config.output_dir)
    return report
