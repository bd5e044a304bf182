"""In-memory component architecture runtime model.

The model is a causally connected view of a running multi-tenant system:
component types and interface types describe what can be deployed,
tenants group the deployed components, and connectors wire required to
provided interfaces within a tenant.  Runtime observations (exceptions,
performance statistics, monitored properties) and annotations (working
data, issues, adaptation strategies) live on top of that structure.

All mutation goes through a :class:`ModelHandle`.  Handles carry a role:
the simulator's handle may do everything, while an adaptation engine's
handle is restricted to architectural reconfiguration.  Every mutation
emits a change event on the architecture's queue.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Any, Iterable

from .events import ChangeEvent, ChangeEventKind, EventQueue


class ModelError(Exception):
    """A mutation or query was rejected; the model is unchanged."""


class PermissionDenied(ModelError):
    """The handle's role does not permit the attempted operation."""


class HandleRevoked(ModelError):
    """The handle was revoked and can no longer touch the model."""


class ComponentState(enum.Enum):
    UNDEPLOYED = "UNDEPLOYED"
    DEPLOYED = "DEPLOYED"
    STARTED = "STARTED"
    UNKNOWN = "UNKNOWN"


class Role(enum.Enum):
    SIMULATOR = "SIMULATOR"
    ENGINE = "ENGINE"


# Lifecycle transitions open to every handle.  Only the simulator may
# push a component into UNKNOWN (a detected crash); leaving UNKNOWN goes
# through DEPLOYED.
_COMMON_TRANSITIONS: frozenset[tuple[ComponentState, ComponentState]] = frozenset(
    {
        (ComponentState.UNDEPLOYED, ComponentState.DEPLOYED),
        (ComponentState.DEPLOYED, ComponentState.UNDEPLOYED),
        (ComponentState.DEPLOYED, ComponentState.STARTED),
        (ComponentState.STARTED, ComponentState.DEPLOYED),
        (ComponentState.UNKNOWN, ComponentState.DEPLOYED),
    }
)
_SIMULATOR_ONLY_TRANSITIONS: frozenset[tuple[ComponentState, ComponentState]] = frozenset(
    {
        (ComponentState.UNDEPLOYED, ComponentState.UNKNOWN),
        (ComponentState.DEPLOYED, ComponentState.UNKNOWN),
        (ComponentState.STARTED, ComponentState.UNKNOWN),
    }
)

_DATA_TYPES = ("bool", "int", "real", "string")
_INT_RE = re.compile(r"^[+-]?[0-9]+$")


def check_value_encoding(data_type: str, value: str) -> None:
    """Reject a value string that does not encode the given data type."""
    if data_type not in _DATA_TYPES:
        raise ModelError(f"unknown data type {data_type!r}")
    if not isinstance(value, str):
        raise ModelError(f"value must be a string encoding, got {type(value).__name__}")
    if data_type == "bool" and value not in ("true", "false"):
        raise ModelError(f"bool value must be 'true' or 'false', got {value!r}")
    if data_type == "int" and not _INT_RE.match(value):
        raise ModelError(f"int value must be a decimal integer, got {value!r}")
    if data_type == "real":
        try:
            float(value)
        except ValueError:
            raise ModelError(f"real value must parse as a float, got {value!r}") from None


# --------------------------------------------------------------------------
# Type level


@dataclass(frozen=True)
class MethodSpecification:
    uid: str
    signature: str


@dataclass(frozen=True)
class InterfaceType:
    """A named contract; fq_name is unique within an architecture."""

    uid: str
    fq_name: str
    methods: tuple[MethodSpecification, ...]

    def method(self, signature: str) -> MethodSpecification:
        for m in self.methods:
            if m.signature == signature:
                return m
        raise ModelError(f"interface {self.fq_name} has no method {signature!r}")


@dataclass(frozen=True)
class ParameterType:
    uid: str
    name: str
    data_type: str
    default_value: str


@dataclass(frozen=True)
class ComponentType:
    """Immutable blueprint for components.

    ``criticality`` is the default criticality handed to instances;
    ``reliability`` must lie in [0, 1].
    """

    uid: str
    name: str
    reliability: float
    criticality: float
    parameter_types: tuple[ParameterType, ...]
    required_interface_types: tuple[InterfaceType, ...]
    provided_interface_types: tuple[InterfaceType, ...]


# --------------------------------------------------------------------------
# Deployment level


@dataclass
class Parameter:
    uid: str
    type: ParameterType
    value: str


@dataclass
class RequiredInterface:
    uid: str
    type: InterfaceType
    owner: "Component" = field(repr=False)
    connector: "Connector | None" = None


@dataclass
class ProvidedInterface:
    uid: str
    type: InterfaceType
    owner: "Component" = field(repr=False)
    connectors: list["Connector"] = field(default_factory=list)
    exceptions: list["ObservedException"] = field(default_factory=list)
    performance_stats: list["PerformanceStats"] = field(default_factory=list)

    def stats_for(self, signature: str) -> "PerformanceStats | None":
        for s in self.performance_stats:
            if s.method.signature == signature:
                return s
        return None


@dataclass
class Component:
    uid: str
    type: ComponentType
    tenant: "Tenant" = field(repr=False)
    state: ComponentState = ComponentState.UNDEPLOYED
    criticality: float = 0.0
    parameters: list[Parameter] = field(default_factory=list)
    required_interfaces: list[RequiredInterface] = field(default_factory=list)
    provided_interfaces: list[ProvidedInterface] = field(default_factory=list)
    monitored_properties: list["MonitoredProperty"] = field(default_factory=list)

    def parameter(self, name: str) -> Parameter:
        for p in self.parameters:
            if p.type.name == name:
                return p
        raise ModelError(f"component {self.uid} has no parameter {name!r}")

    def required(self, fq_name: str) -> RequiredInterface:
        for r in self.required_interfaces:
            if r.type.fq_name == fq_name:
                return r
        raise ModelError(f"component {self.uid} requires no interface {fq_name!r}")

    def provided(self, fq_name: str) -> ProvidedInterface:
        for p in self.provided_interfaces:
            if p.type.fq_name == fq_name:
                return p
        raise ModelError(f"component {self.uid} provides no interface {fq_name!r}")

    def exception_count(self) -> int:
        return sum(len(p.exceptions) for p in self.provided_interfaces)


@dataclass
class Connector:
    """Wires one required interface to a provided interface of the same
    interface type inside the same tenant."""

    uid: str
    source: RequiredInterface
    target: ProvidedInterface


@dataclass
class Tenant:
    uid: str
    name: str
    components: list[Component] = field(default_factory=list)
    connectors: list[Connector] = field(default_factory=list)
    monitored_properties: list["MonitoredProperty"] = field(default_factory=list)

    def property_named(self, name: str) -> "MonitoredProperty | None":
        for m in self.monitored_properties:
            if m.name == name:
                return m
        return None


# --------------------------------------------------------------------------
# Runtime observations


@dataclass
class ObservedException:
    uid: str
    interface: ProvidedInterface = field(repr=False)
    method: MethodSpecification
    exception_type: str
    message: str
    stack_trace: str


@dataclass
class PerformanceStats:
    uid: str
    interface: ProvidedInterface = field(repr=False)
    method: MethodSpecification
    min_time_ms: float
    max_time_ms: float
    total_time_ms: float
    invocation_count: int

    @property
    def average_ms(self) -> float | None:
        """Mean observed time; undefined until at least one invocation."""
        if self.invocation_count <= 0:
            return None
        return self.total_time_ms / self.invocation_count


@dataclass
class MonitoredProperty:
    uid: str
    name: str
    data_type: str
    unit: str
    value: str
    description: str
    owner_uid: str

    def as_float(self) -> float:
        if self.data_type not in ("int", "real"):
            raise ModelError(f"property {self.name!r} is not numeric")
        return float(self.value)


# --------------------------------------------------------------------------
# Annotations

PropertyOwner = Tenant | Component


@dataclass
class WorkingData:
    """Engine-private memory attached to the model (e.g. remembered
    stats of a component the engine removed).  ``concerns`` holds uids."""

    name: str
    value: str
    concerns: list[str] = field(default_factory=list)
    uid: str = ""


@dataclass
class Issue:
    """A detected problem.  ``impacts`` holds uids of affected elements."""

    name: str
    utility_drop: float
    impacts: list[str] = field(default_factory=list)
    description: str = ""
    uid: str = ""


@dataclass
class AdaptationStrategy:
    """A planned repair.  Must reference the issue it addresses."""

    name: str
    utility_increase: float
    costs: float
    assigned_issue: Issue | None = None
    input_parameters: list[str] = field(default_factory=list)
    uid: str = ""


Annotation = WorkingData | Issue | AdaptationStrategy


# --------------------------------------------------------------------------
# Architecture


class Architecture:
    """Root of one runtime model.

    Construction helpers (``add_interface_type`` and friends) build the
    type level and tenants; everything below that is mutated through
    role-checked handles.  A per-architecture logical clock stamps
    change events, and a single uid counter names every element.
    """

    def __init__(self, name: str) -> None:
        self.name = name
        self.interface_types: list[InterfaceType] = []
        self.component_types: list[ComponentType] = []
        self.tenants: list[Tenant] = []
        self.annotations: list[Annotation] = []
        self.events = EventQueue()
        self._registry: dict[str, Any] = {}
        self._uid_counter = 0
        self._clock = 0

    # -- identity and time

    def next_uid(self, prefix: str) -> str:
        self._uid_counter += 1
        return f"{prefix}{self._uid_counter}"

    def tick(self) -> int:
        self._clock += 1
        return self._clock

    @property
    def clock(self) -> int:
        return self._clock

    def _register(self, element: Any, uid: str) -> None:
        if uid in self._registry:
            raise ModelError(f"uid {uid!r} already registered")
        self._registry[uid] = element

    def _unregister(self, uid: str) -> None:
        self._registry.pop(uid, None)

    def find_by_uid(self, uid: str) -> Any | None:
        return self._registry.get(uid)

    def registered_uids(self) -> list[str]:
        return list(self._registry)

    def _emit(self, kind: ChangeEventKind, subject_uid: str, payload: dict[str, Any]) -> None:
        self.events.emit(ChangeEvent(kind, self.tick(), subject_uid, payload))

    # -- type level construction

    def interface_type(self, fq_name: str) -> InterfaceType:
        for it in self.interface_types:
            if it.fq_name == fq_name:
                return it
        raise ModelError(f"no interface type {fq_name!r}")

    def component_type_named(self, name: str) -> ComponentType:
        for ct in self.component_types:
            if ct.name == name:
                return ct
        raise ModelError(f"no component type {name!r}")

    def add_interface_type(self, fq_name: str, methods: Iterable[str]) -> InterfaceType:
        if any(it.fq_name == fq_name for it in self.interface_types):
            raise ModelError(f"interface type {fq_name!r} already exists")
        specs = []
        for sig in methods:
            uid = self.next_uid("m")
            spec = MethodSpecification(uid, sig)
            self._register(spec, uid)
            specs.append(spec)
        it = InterfaceType(self.next_uid("if"), fq_name, tuple(specs))
        self._register(it, it.uid)
        self.interface_types.append(it)
        return it

    def add_component_type(
        self,
        name: str,
        *,
        reliability: float,
        criticality: float,
        parameters: Iterable[tuple[str, str, str]] = (),
        requires: Iterable[InterfaceType] = (),
        provides: Iterable[InterfaceType] = (),
    ) -> ComponentType:
        if not 0.0 <= reliability <= 1.0:
            raise ModelError(f"reliability must be within [0, 1], got {reliability}")
        ptypes = []
        for pname, dtype, default in parameters:
            check_value_encoding(dtype, default)
            uid = self.next_uid("pt")
            pt = ParameterType(uid, pname, dtype, default)
            self._register(pt, uid)
            ptypes.append(pt)
        ct = ComponentType(
            self.next_uid("ct"),
            name,
            reliability,
            criticality,
            tuple(ptypes),
            tuple(requires),
            tuple(provides),
        )
        self._register(ct, ct.uid)
        self.component_types.append(ct)
        return ct

    def add_tenant(self, name: str) -> Tenant:
        tenant = Tenant(self.next_uid("t"), name)
        self._register(tenant, tenant.uid)
        self.tenants.append(tenant)
        return tenant

    def handle(self, role: Role) -> "ModelHandle":
        return ModelHandle(self, role)

    # -- convenience queries (uncounted; handles wrap these)

    def all_components(self) -> list[Component]:
        return [c for t in self.tenants for c in t.components]

    def all_connectors(self) -> list[Connector]:
        return [x for t in self.tenants for x in t.connectors]

    def connectivity(self, component: Component) -> int:
        n = sum(1 for r in component.required_interfaces if r.connector is not None)
        n += sum(len(p.connectors) for p in component.provided_interfaces)
        return n


class ModelHandle:
    """Role-checked access to one architecture.

    Every element retrieval and every mutation bumps ``model_accesses``,
    which approximates how much of the model the holder touched; the
    simulation kernel reports this per engine.  Collection queries count
    one access per element returned.
    """

    def __init__(self, architecture: Architecture, role: Role) -> None:
        self._arch = architecture
        self.role = role
        self.model_accesses = 0
        self._revoked = False

    # -- plumbing

    def _check_alive(self) -> None:
        if self._revoked:
            raise HandleRevoked("handle was revoked")

    def _count(self, n: int = 1) -> None:
        self.model_accesses += n

    def _require_simulator(self, op: str) -> None:
        if self.role is not Role.SIMULATOR:
            raise PermissionDenied(f"{op} requires the simulator role")

    def _require_registered(self, element: Any, what: str) -> None:
        uid = getattr(element, "uid", None)
        if uid is None or self._arch.find_by_uid(uid) is not element:
            raise ModelError(f"{what} is not part of this architecture")

    def revoke(self) -> None:
        self._revoked = True

    @property
    def architecture_name(self) -> str:
        return self._arch.name

    # -- queries

    def tenants(self) -> list[Tenant]:
        self._check_alive()
        result = list(self._arch.tenants)
        self._count(len(result))
        return result

    def components(self, tenant: Tenant | None = None) -> list[Component]:
        self._check_alive()
        result = list(tenant.components) if tenant is not None else self._arch.all_components()
        self._count(len(result))
        return result

    def connectors(self, tenant: Tenant | None = None) -> list[Connector]:
        self._check_alive()
        result = list(tenant.connectors) if tenant is not None else self._arch.all_connectors()
        self._count(len(result))
        return result

    def component_types(self) -> list[ComponentType]:
        self._check_alive()
        result = list(self._arch.component_types)
        self._count(len(result))
        return result

    def interface_types(self) -> list[InterfaceType]:
        self._check_alive()
        result = list(self._arch.interface_types)
        self._count(len(result))
        return result

    def components_of_type(self, component_type: ComponentType) -> list[Component]:
        self._check_alive()
        result = [c for c in self._arch.all_components() if c.type is component_type]
        self._count(len(result))
        return result

    def find_by_uid(self, uid: str) -> Any | None:
        self._check_alive()
        self._count()
        return self._arch.find_by_uid(uid)

    def connectivity(self, component: Component) -> int:
        self._check_alive()
        self._count()
        return self._arch.connectivity(component)

    def tenant_of(self, component: Component) -> Tenant:
        self._check_alive()
        self._count()
        return component.tenant

    def provider_of(self, required: RequiredInterface) -> ProvidedInterface | None:
        self._check_alive()
        self._count()
        return required.connector.target if required.connector is not None else None

    def annotations(self, kind: type | None = None) -> list[Annotation]:
        self._check_alive()
        result = [a for a in self._arch.annotations if kind is None or isinstance(a, kind)]
        self._count(len(result))
        return result

    # -- deployment mutations (open to both roles)

    def instantiate(
        self,
        component_type: ComponentType,
        tenant: Tenant,
        criticality: float | None = None,
    ) -> Component:
        """Create an UNDEPLOYED component of the given type in the tenant.

        Parameters start at their declared defaults and one interface is
        created per entry of the type's required/provided lists; nothing
        is connected yet.
        """
        self._check_alive()
        self._count()
        arch = self._arch
        self._require_registered(component_type, "component type")
        self._require_registered(tenant, "tenant")
        comp = Component(
            uid=arch.next_uid("c"),
            type=component_type,
            tenant=tenant,
            state=ComponentState.UNDEPLOYED,
            criticality=component_type.criticality if criticality is None else criticality,
        )
        arch._register(comp, comp.uid)
        for pt in component_type.parameter_types:
            par = Parameter(arch.next_uid("par"), pt, pt.default_value)
            arch._register(par, par.uid)
            comp.parameters.append(par)
        for it in component_type.required_interface_types:
            ri = RequiredInterface(arch.next_uid("r"), it, comp)
            arch._register(ri, ri.uid)
            comp.required_interfaces.append(ri)
        for it in component_type.provided_interface_types:
            pi = ProvidedInterface(arch.next_uid("p"), it, comp)
            arch._register(pi, pi.uid)
            comp.provided_interfaces.append(pi)
        tenant.components.append(comp)
        arch._emit(
            ChangeEventKind.COMPONENT_ADDED,
            comp.uid,
            {"tenant": tenant.uid, "type": component_type.uid, "typeName": component_type.name},
        )
        return comp

    def set_state(self, component: Component, new_state: ComponentState) -> None:
        """Move a component along the lifecycle.

        Both roles may walk UNDEPLOYED <-> DEPLOYED <-> STARTED and leave
        UNKNOWN via DEPLOYED; only the simulator may enter UNKNOWN.
        Entering UNDEPLOYED discards the exceptions observed on the
        component's provided interfaces: an undeployed component starts
        from a clean slate when it comes back.
        """
        self._check_alive()
        self._count()
        self._require_registered(component, "component")
        old = component.state
        transition = (old, new_state)
        if transition in _SIMULATOR_ONLY_TRANSITIONS:
            self._require_simulator(f"transition {old.value} -> {new_state.value}")
        elif transition not in _COMMON_TRANSITIONS:
            raise ModelError(f"illegal lifecycle transition {old.value} -> {new_state.value}")
        component.state = new_state
        if new_state is ComponentState.UNDEPLOYED:
            for p in component.provided_interfaces:
                for ex in p.exceptions:
                    self._arch._unregister(ex.uid)
                p.exceptions.clear()
        self._arch._emit(
            ChangeEventKind.COMPONENT_LIFECYCLE_CHANGED,
            component.uid,
            {"old": old.value, "new": new_state.value},
        )

    def remove_component(self, component: Component) -> None:
        """Remove a component and everything attached to it.

        Connectors touching the component are removed first, each with
        its own event, so observers can tell a cascade from a lone
        connector loss by the removal event that follows.
        """
        self._check_alive()
        self._count()
        self._require_registered(component, "component")
        arch = self._arch
        tenant = component.tenant
        attached: list[Connector] = []
        for r in component.required_interfaces:
            if r.connector is not None:
                attached.append(r.connector)
        for p in component.provided_interfaces:
            attached.extend(p.connectors)
        for conn in attached:
            self._remove_connector_internal(conn)
        for par in component.parameters:
            arch._unregister(par.uid)
        for r in component.required_interfaces:
            arch._unregister(r.uid)
        for p in component.provided_interfaces:
            for ex in p.exceptions:
                arch._unregister(ex.uid)
            for st in p.performance_stats:
                arch._unregister(st.uid)
            arch._unregister(p.uid)
        for mp in component.monitored_properties:
            arch._unregister(mp.uid)
        arch._unregister(component.uid)
        tenant.components.remove(component)
        arch._emit(
            ChangeEventKind.COMPONENT_REMOVED,
            component.uid,
            {
                "tenant": tenant.uid,
                "type": component.type.uid,
                "typeName": component.type.name,
                "state": component.state.value,
            },
        )

    def connect(self, required: RequiredInterface, provided: ProvidedInterface) -> Connector:
        """Wire an unconnected required interface to a matching provider."""
        self._check_alive()
        self._count()
        self._require_registered(required, "required interface")
        self._require_registered(provided, "provided interface")
        if required.connector is not None:
            raise ModelError(f"required interface {required.uid} is already connected")
        if required.type.fq_name != provided.type.fq_name:
            raise ModelError(
                f"interface type mismatch: {required.type.fq_name} vs {provided.type.fq_name}"
            )
        if required.owner.tenant is not provided.owner.tenant:
            raise ModelError("connectors may not cross tenant boundaries")
        arch = self._arch
        conn = Connector(arch.next_uid("x"), required, provided)
        arch._register(conn, conn.uid)
        required.connector = conn
        provided.connectors.append(conn)
        required.owner.tenant.connectors.append(conn)
        arch._emit(
            ChangeEventKind.CONNECTOR_ADDED,
            conn.uid,
            self._connector_payload(conn),
        )
        return conn

    def reroute(self, connector: Connector, new_provided: ProvidedInterface) -> None:
        """Point an existing connector at a different provider."""
        self._check_alive()
        self._count()
        self._require_registered(connector, "connector")
        self._require_registered(new_provided, "provided interface")
        if connector.source.type.fq_name != new_provided.type.fq_name:
            raise ModelError(
                "interface type mismatch: "
                f"{connector.source.type.fq_name} vs {new_provided.type.fq_name}"
            )
        if connector.source.owner.tenant is not new_provided.owner.tenant:
            raise ModelError("connectors may not cross tenant boundaries")
        old = connector.target
        if new_provided is old:
            return
        old.connectors.remove(connector)
        connector.target = new_provided
        new_provided.connectors.append(connector)
        self._arch._emit(
            ChangeEventKind.CONNECTOR_REROUTED,
            connector.uid,
            {
                "fqName": connector.source.type.fq_name,
                "sourceComponent": connector.source.owner.uid,
                "oldTargetComponent": old.owner.uid,
                "oldTargetInterface": old.uid,
                "newTargetComponent": new_provided.owner.uid,
                "newTargetInterface": new_provided.uid,
            },
        )

    def remove_connector(self, connector: Connector) -> None:
        self._check_alive()
        self._count()
        self._require_registered(connector, "connector")
        self._remove_connector_internal(connector)

    def _remove_connector_internal(self, connector: Connector) -> None:
        payload = self._connector_payload(connector)
        connector.source.connector = None
        connector.target.connectors.remove(connector)
        connector.source.owner.tenant.connectors.remove(connector)
        self._arch._unregister(connector.uid)
        self._arch._emit(ChangeEventKind.CONNECTOR_REMOVED, connector.uid, payload)

    @staticmethod
    def _connector_payload(conn: Connector) -> dict[str, Any]:
        return {
            "fqName": conn.source.type.fq_name,
            "sourceComponent": conn.source.owner.uid,
            "sourceInterface": conn.source.uid,
            "targetComponent": conn.target.owner.uid,
            "targetInterface": conn.target.uid,
        }

    def set_parameter(self, component: Component, name: str, value: str) -> None:
        """Change a parameter value; the string must encode the declared type."""
        self._check_alive()
        self._count()
        self._require_registered(component, "component")
        par = component.parameter(name)
        check_value_encoding(par.type.data_type, value)
        old = par.value
        par.value = value
        self._arch._emit(
            ChangeEventKind.PARAMETER_VALUE_CHANGED,
            par.uid,
            {"component": component.uid, "name": name, "old": old, "new": value},
        )

    # -- runtime observations (simulator only)

    def record_exception(
        self,
        provided: ProvidedInterface,
        method_signature: str,
        exception_type: str,
        message: str,
        stack_trace: str = "",
    ) -> ObservedException:
        self._check_alive()
        self._count()
        self._require_simulator("record_exception")
        self._require_registered(provided, "provided interface")
        method = provided.type.method(method_signature)
        ex = ObservedException(
            self._arch.next_uid("ex"), provided, method, exception_type, message, stack_trace
        )
        self._arch._register(ex, ex.uid)
        provided.exceptions.append(ex)
        self._arch._emit(
            ChangeEventKind.EXCEPTION_OCCURRED,
            provided.uid,
            {
                "component": provided.owner.uid,
                "exception": ex.uid,
                "method": method.signature,
                "exceptionType": exception_type,
            },
        )
        return ex

    def update_performance_stats(
        self,
        provided: ProvidedInterface,
        method_signature: str,
        *,
        min_ms: float,
        max_ms: float,
        total_ms: float,
        invocation_count: int,
    ) -> PerformanceStats:
        """Create or overwrite the stats of one method on one interface."""
        self._check_alive()
        self._count()
        self._require_simulator("update_performance_stats")
        self._require_registered(provided, "provided interface")
        if min_ms > max_ms:
            raise ModelError(f"min {min_ms} exceeds max {max_ms}")
        if total_ms < 0 or invocation_count < 0:
            raise ModelError("totals must be non-negative")
        method = provided.type.method(method_signature)
        stats = provided.stats_for(method_signature)
        if stats is None:
            stats = PerformanceStats(
                self._arch.next_uid("ps"), provided, method, min_ms, max_ms, total_ms, invocation_count
            )
            self._arch._register(stats, stats.uid)
            provided.performance_stats.append(stats)
        else:
            stats.min_time_ms = min_ms
            stats.max_time_ms = max_ms
            stats.total_time_ms = total_ms
            stats.invocation_count = invocation_count
        self._arch._emit(
            ChangeEventKind.PERFORMANCE_STATS_UPDATED,
            stats.uid,
            {
                "component": provided.owner.uid,
                "interface": provided.uid,
                "method": method.signature,
                "minMs": min_ms,
                "maxMs": max_ms,
                "totalMs": total_ms,
                "invocationCount": invocation_count,
            },
        )
        return stats

    def set_monitored_property(
        self,
        owner: PropertyOwner,
        name: str,
        *,
        data_type: str = "real",
        unit: str = "",
        value: str,
        description: str = "",
    ) -> MonitoredProperty:
        """Attach or update a named observation on a tenant or component."""
        self._check_alive()
        self._count()
        self._require_simulator("set_monitored_property")
        self._require_registered(owner, "property owner")
        check_value_encoding(data_type, value)
        existing = None
        for mp in owner.monitored_properties:
            if mp.name == name:
                existing = mp
                break
        if existing is None:
            mp = MonitoredProperty(
                self._arch.next_uid("mp"), name, data_type, unit, value, description, owner.uid
            )
            self._arch._register(mp, mp.uid)
            owner.monitored_properties.append(mp)
            self._arch._emit(
                ChangeEventKind.MONITORED_PROPERTY_ADDED,
                mp.uid,
                {"owner": owner.uid, "name": name, "value": value},
            )
            return mp
        if existing.data_type != data_type:
            raise ModelError(
                f"property {name!r} already exists with data type {existing.data_type!r}"
            )
        old = existing.value
        existing.value = value
        existing.unit = unit or existing.unit
        if description:
            existing.description = description
        self._arch._emit(
            ChangeEventKind.MONITORED_PROPERTY_UPDATED,
            existing.uid,
            {"owner": owner.uid, "name": name, "old": old, "new": value},
        )
        return existing

    # -- annotations (engine working memory; no change events)

    def annotate(self, annotation: Annotation) -> Annotation:
        self._check_alive()
        self._count()
        if isinstance(annotation, AdaptationStrategy):
            if annotation.assigned_issue is None:
                raise ModelError("an adaptation strategy requires an assigned issue")
            if self._arch.find_by_uid(annotation.assigned_issue.uid) is not annotation.assigned_issue:
                raise ModelError("the assigned issue is not annotated on this architecture")
        if annotation.uid:
            raise ModelError("annotation was already added")
        annotation.uid = self._arch.next_uid("a")
        self._arch._register(annotation, annotation.uid)
        self._arch.annotations.append(annotation)
        return annotation

    def remove_annotation(self, annotation: Annotation) -> None:
        self._check_alive()
        self._count()
        self._require_registered(annotation, "annotation")
        self._arch.annotations.remove(annotation)
        self._arch._unregister(annotation.uid)

    def clear_annotations(self) -> None:
        self._check_alive()
        self._count()
        for a in self._arch.annotations:
            self._arch._unregister(a.uid)
        self._arch.annotations.clear()
