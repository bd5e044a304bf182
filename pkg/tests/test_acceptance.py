"""Acceptance gate: eight end-to-end criteria, one test each.

Every test prints a single `criterion N <slug>: PASS|FAIL` line so a run
of this module reads as a checklist.  Stated time budgets are asserted
with a wall clock.
"""

import random
import time

from adaptsim.cli import main
from adaptsim.engines import build_engine
from adaptsim.events import ChangeEventKind
from adaptsim.kernel import SimulationConfig, run_simulation
from adaptsim.marketplace import (
    BLUEPRINT,
    FILTER_METHOD,
    ITEM_FILTER_FQ,
    HealthUtility,
    ResponseAwareUtility,
    Thresholds,
    build_case,
    generate_architecture,
)
from adaptsim.model import ComponentState, Role
from adaptsim.report import write_utility_csv
from adaptsim.snapshot import parse_architecture, serialize_architecture

from test_marketplace import _hand_built_shop, oracle_utility

THRESHOLDS = Thresholds()


def conclude(number, slug, body):
    try:
        body()
    except BaseException:
        print(f"criterion {number} {slug}: FAIL")
        raise
    print(f"criterion {number} {slug}: PASS")


def make_config(case, rounds, seed, **overrides):
    return SimulationConfig(
        rounds=rounds,
        scenario=case.scenario,
        injectors=case.injectors,
        validators=case.validators,
        utility=case.utility,
        seed=seed,
        **overrides,
    )


def run_case(case_name, engine_name, shops, rounds, seed, **overrides):
    arch = generate_architecture(shops, random.Random(seed), THRESHOLDS)
    case = build_case(case_name, THRESHOLDS)
    engine = build_engine(engine_name, THRESHOLDS)
    report = run_simulation(arch, engine, make_config(case, rounds, seed, **overrides))
    return arch, report


# --------------------------------------------------------------------------


def test_criterion_1_utility_oracle():
    def check():
        started = time.perf_counter()
        rng = random.Random(1234)
        for index in range(100):
            shops = rng.randint(1, 50)
            arch = generate_architecture(shops, random.Random(index), THRESHOLDS)
            computed = HealthUtility(THRESHOLDS).utility(arch)
            expected = oracle_utility(arch, THRESHOLDS)
            assert abs(computed - expected) <= 1e-9, (index, shops, computed, expected)
        elapsed = time.perf_counter() - started
        assert elapsed < 5.0, f"took {elapsed:.2f}s"

    conclude(1, "utility-oracle", check)


def test_criterion_2_healing_restores_utility_for_100_rounds():
    def check():
        started = time.perf_counter()
        arch, report = run_case("healing", "event-healing", shops=5, rounds=100, seed=1)
        assert len(report.rounds) == 100
        previous_after_adaptation = report.initial_utility
        for record in report.rounds:
            assert record.violations == [], record.index
            assert not record.engine_failed, record.index
            assert record.utility_after_adaptation == report.initial_utility, record.index
            assert record.utility_after_injection <= previous_after_adaptation, record.index
            previous_after_adaptation = record.utility_after_adaptation
        elapsed = time.perf_counter() - started
        assert elapsed < 30.0, f"took {elapsed:.2f}s"

    conclude(2, "healing-step-pattern", check)


def test_criterion_3_healers_write_identical_utility_files(tmp_path):
    def check():
        files = {}
        for engine_name in ("monolithic", "mape", "event-healing"):
            arch, report = run_case("healing", engine_name, shops=5, rounds=30, seed=1)
            path = tmp_path / f"{engine_name}-utility.csv"
            write_utility_csv(report, path)
            files[engine_name] = path.read_bytes()
        assert files["monolithic"] == files["mape"]
        assert files["monolithic"] == files["event-healing"]

    conclude(3, "cross-engine-equivalence", check)


def test_criterion_4_optimization_keeps_pipes_ordered_and_fast():
    def check():
        arch, report = run_case("optimization", "event-optimizing", shops=3, rounds=50, seed=9)
        assert len(report.rounds) == 50
        underutilized_rounds = 0
        for record in report.rounds:
            assert not record.engine_failed, record.index
            messages = [v.message for v in record.violations]
            assert not any("slower than its successor" in m for m in messages), record.index
            assert not any("above the upper threshold" in m for m in messages), record.index
            underutilized_rounds += any("underutilized" in m for m in messages)
        if underutilized_rounds:
            # The only tolerated leftover: every remembered filter would
            # overshoot the upper bound, and the engine said so.
            notes = [note for record in report.rounds for note in record.notes]
            assert any("underutilized" in note for note in notes)

        # Hand-computed penalty checks: a misplaced filter of utility 10
        # costs 5 of the shop's base 100, and a missed response goal
        # keeps 80 percent of the rest.
        arch, sim, tenant = _hand_built_shop()
        utility = ResponseAwareUtility(THRESHOLDS, BLUEPRINT)
        sim.set_monitored_property(tenant, "search-response-time", value="100.0", unit="ms")
        assert utility.shop_utility(tenant) == 95.0
        sim.set_monitored_property(tenant, "search-response-time", value="450.0", unit="ms")
        assert utility.shop_utility(tenant) == 76.0

    conclude(4, "pipe-optimization", check)


EXPECTED_PAYLOAD_KEYS = {
    ChangeEventKind.COMPONENT_ADDED: {"tenant", "type", "typeName"},
    ChangeEventKind.COMPONENT_LIFECYCLE_CHANGED: {"old", "new"},
    ChangeEventKind.COMPONENT_REMOVED: {"tenant", "type", "typeName", "state"},
    ChangeEventKind.CONNECTOR_ADDED: {
        "fqName", "sourceComponent", "sourceInterface", "targetComponent", "targetInterface",
    },
    ChangeEventKind.CONNECTOR_REMOVED: {
        "fqName", "sourceComponent", "sourceInterface", "targetComponent", "targetInterface",
    },
    ChangeEventKind.CONNECTOR_REROUTED: {
        "fqName", "sourceComponent", "oldTargetComponent", "oldTargetInterface",
        "newTargetComponent", "newTargetInterface",
    },
    ChangeEventKind.PARAMETER_VALUE_CHANGED: {"component", "name", "old", "new"},
    ChangeEventKind.EXCEPTION_OCCURRED: {"component", "exception", "method", "exceptionType"},
    ChangeEventKind.PERFORMANCE_STATS_UPDATED: {
        "component", "interface", "method", "minMs", "maxMs", "totalMs", "invocationCount",
    },
    ChangeEventKind.MONITORED_PROPERTY_ADDED: {"owner", "name", "value"},
    ChangeEventKind.MONITORED_PROPERTY_UPDATED: {"owner", "name", "old", "new"},
}


class _CountingEngine:
    def __init__(self, inner):
        self.inner = inner
        self.name = inner.name
        self.drained = []

    def adapt(self, handle, events):
        self.drained.extend(events)
        return self.inner.adapt(handle, events)


def test_criterion_5_event_completeness():
    def check():
        # Drained events are exactly the emitted events, in order.
        arch = generate_architecture(3, random.Random(6), THRESHOLDS)
        case = build_case("healing", THRESHOLDS)
        engine = _CountingEngine(build_engine("event-healing", THRESHOLDS))
        report = run_simulation(arch, engine, make_config(case, 25, seed=6))
        still_buffered = arch.events.drain()
        logged = [event for _, _, event in report.event_log]
        assert engine.drained + still_buffered == logged

        # Every event carries the payload its kind documents.
        _, optimization_report = run_case(
            "optimization", "event-optimizing", shops=2, rounds=25, seed=6
        )
        for _, _, event in report.event_log + optimization_report.event_log:
            assert set(event.payload) == EXPECTED_PAYLOAD_KEYS[event.kind], event.kind

        # One scripted pass over every mutation, checking kind counts.
        arch = generate_architecture(1, random.Random(3), THRESHOLDS)
        sim = arch.handle(Role.SIMULATOR)
        tenant = arch.tenants[0]
        filter_component = next(
            c for c in tenant.components
            if BLUEPRINT.role_of_type(c.type.name).is_filter
        )
        query = BLUEPRINT.find_role_component(tenant, "query-service")
        expected_kinds = []

        sim.set_state(filter_component, ComponentState.UNKNOWN)
        sim.set_state(filter_component, ComponentState.DEPLOYED)
        sim.set_state(filter_component, ComponentState.STARTED)
        expected_kinds += [ChangeEventKind.COMPONENT_LIFECYCLE_CHANGED] * 3
        provided = filter_component.provided(ITEM_FILTER_FQ)
        sim.record_exception(provided, FILTER_METHOD, "market.errors.RemoteCallFailure", "x")
        expected_kinds.append(ChangeEventKind.EXCEPTION_OCCURRED)
        sim.update_performance_stats(
            provided, FILTER_METHOD, min_ms=1.0, max_ms=2.0, total_ms=30.0, invocation_count=20
        )
        expected_kinds.append(ChangeEventKind.PERFORMANCE_STATS_UPDATED)
        sim.set_parameter(filter_component, "batch-size", "128")
        expected_kinds.append(ChangeEventKind.PARAMETER_VALUE_CHANGED)
        sim.set_monitored_property(tenant, "load", value="0.5")
        sim.set_monitored_property(tenant, "load", value="0.7")
        expected_kinds += [
            ChangeEventKind.MONITORED_PROPERTY_ADDED,
            ChangeEventKind.MONITORED_PROPERTY_UPDATED,
        ]
        extra = sim.instantiate(filter_component.type, tenant)
        expected_kinds.append(ChangeEventKind.COMPONENT_ADDED)
        connector = sim.connect(extra.required(ITEM_FILTER_FQ), query.provided(ITEM_FILTER_FQ))
        expected_kinds.append(ChangeEventKind.CONNECTOR_ADDED)
        sim.reroute(connector, filter_component.provided(ITEM_FILTER_FQ))
        expected_kinds.append(ChangeEventKind.CONNECTOR_REROUTED)
        sim.remove_connector(connector)
        expected_kinds.append(ChangeEventKind.CONNECTOR_REMOVED)
        sim.remove_component(extra)
        expected_kinds.append(ChangeEventKind.COMPONENT_REMOVED)
        drained = arch.events.drain()
        assert [e.kind for e in drained] == expected_kinds
        for event in drained:
            assert set(event.payload) == EXPECTED_PAYLOAD_KEYS[event.kind], event.kind

        # Losing a component with k connectors yields exactly k+1 events.
        victim = tenant.components[0]
        k = arch.connectivity(victim)
        assert k > 0
        sim.remove_component(victim)
        cascade = arch.events.drain()
        assert len(cascade) == k + 1
        assert [e.kind for e in cascade] == (
            [ChangeEventKind.CONNECTOR_REMOVED] * k + [ChangeEventKind.COMPONENT_REMOVED]
        )

    conclude(5, "event-completeness", check)


def test_criterion_6_scales_to_100_shops():
    def check():
        started = time.perf_counter()
        arch = generate_architecture(100, random.Random(1), THRESHOLDS)
        assert len(arch.all_components()) == 1800

        case = build_case("healing", THRESHOLDS)
        engine = build_engine("event-healing", THRESHOLDS)
        report = run_simulation(arch, engine, make_config(case, 10, seed=1))
        assert len(report.rounds) == 10
        assert all(record.execution_time_ms > 0.0 for record in report.rounds)

        arch = generate_architecture(100, random.Random(1), THRESHOLDS)
        case = build_case("healing", THRESHOLDS)
        baseline = build_engine("monolithic", THRESHOLDS)
        baseline_report = run_simulation(arch, baseline, make_config(case, 10, seed=1))
        assert report.engine_model_accesses < baseline_report.engine_model_accesses

        elapsed = time.perf_counter() - started
        assert elapsed < 60.0, f"took {elapsed:.2f}s"

    conclude(6, "scalability", check)


def test_criterion_7_repeated_runs_are_byte_identical(tmp_path):
    def check():
        invocations = {
            "healing": [
                "simulate", "--case", "healing", "--engine", "event-healing",
                "--shops", "3", "--rounds", "10", "--seed", "5",
            ],
            "optimization": [
                "simulate", "--case", "optimization", "--engine", "event-optimizing",
                "--shops", "2", "--rounds", "10", "--seed", "5",
            ],
        }
        for label, argv in invocations.items():
            first = tmp_path / label / "first"
            second = tmp_path / label / "second"
            assert main(argv + ["--out", str(first)]) == 0
            assert main(argv + ["--out", str(second)]) == 0
            for name in ("utility.csv", "events.log"):
                assert (first / name).read_bytes() == (second / name).read_bytes(), (label, name)

    conclude(7, "determinism", check)


def test_criterion_8_snapshots_roundtrip_at_every_configured_round():
    def check():
        arch, report = run_case(
            "healing", "event-healing", shops=2, rounds=10, seed=4,
            snapshot_rounds=frozenset(range(1, 11)),
        )
        assert sorted(report.snapshots) == list(range(1, 11))
        for round_index, text in report.snapshots.items():
            copy = parse_architecture(text)
            assert serialize_architecture(copy) == text, round_index

    conclude(8, "snapshot-roundtrip", check)
