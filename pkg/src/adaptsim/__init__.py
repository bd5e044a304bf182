"""Simulation harness for architecture-model-based self-adaptation.

The package keeps an in-memory component architecture of a marketplace
(shops as tenants, services and item filters as components), injects
failures or performance disturbances round by round, and lets an
adaptation engine repair the model through a role-restricted handle
while utility functions and validators measure how well it did.
"""

from .events import ChangeEvent, ChangeEventKind, EventQueue
from .model import (
    AdaptationStrategy,
    Architecture,
    Component,
    ComponentState,
    ComponentType,
    Connector,
    HandleRevoked,
    InterfaceType,
    Issue,
    ModelError,
    ModelHandle,
    MonitoredProperty,
    ObservedException,
    PerformanceStats,
    PermissionDenied,
    Role,
    Tenant,
    WorkingData,
)
from .marketplace import (
    BLUEPRINT,
    Blueprint,
    Case,
    FailureHistory,
    HealthUtility,
    IssueKind,
    ResponseAwareUtility,
    Thresholds,
    Violation,
    build_case,
    component_utility,
    generate_architecture,
    pipe_filters,
    pipe_response_time_ms,
)
from .engines import ENGINE_NAMES, EngineOutcome, build_engine
from .kernel import (
    RoundRecord,
    SimulationConfig,
    SimulationError,
    SimulationReport,
    run_simulation,
)
from .snapshot import (
    SnapshotError,
    parse_architecture,
    read_snapshot,
    serialize_architecture,
    write_snapshot,
)

__version__ = "0.1.0"

__all__ = [
    "AdaptationStrategy",
    "Architecture",
    "BLUEPRINT",
    "Blueprint",
    "Case",
    "ChangeEvent",
    "ChangeEventKind",
    "Component",
    "ComponentState",
    "ComponentType",
    "Connector",
    "ENGINE_NAMES",
    "EngineOutcome",
    "EventQueue",
    "FailureHistory",
    "HandleRevoked",
    "HealthUtility",
    "InterfaceType",
    "Issue",
    "IssueKind",
    "ModelError",
    "ModelHandle",
    "MonitoredProperty",
    "ObservedException",
    "PerformanceStats",
    "PermissionDenied",
    "ResponseAwareUtility",
    "Role",
    "RoundRecord",
    "SimulationConfig",
    "SimulationError",
    "SimulationReport",
    "SnapshotError",
    "Tenant",
    "Thresholds",
    "Violation",
    "WorkingData",
    "build_case",
    "build_engine",
    "component_utility",
    "generate_architecture",
    "parse_architecture",
    "pipe_filters",
    "pipe_response_time_ms",
    "read_snapshot",
    "run_simulation",
    "serialize_architecture",
    "write_snapshot",
    "__version__",
]
