"""Marketplace content: shop blueprint, failure injection, validation.

A generated architecture hosts one tenant per shop.  Every shop runs the
same 18 components: eight core services plus a pipe of ten item filters
between the query service (front) and item management (back).  Filters
are wired in ascending order of their average response time; the shop's
end-to-end search time is tracked as a monitored property on the tenant.

This module also provides the utility functions, the issue injectors
with their selection scenarios, and the validators that check a model
after each adaptation round.
"""

from __future__ import annotations

import enum
import json
import math
import random
from dataclasses import dataclass, field

from .model import (
    Architecture,
    Component,
    ComponentState,
    Connector,
    ModelHandle,
    Role,
    Tenant,
    WorkingData,
)

ITEM_FILTER_FQ = "market.search.ItemFilter"
FILTER_METHOD = "Item[] filter(Item[] items)"
RESPONSE_TIME_PROPERTY = "search-response-time"


@dataclass(frozen=True)
class Thresholds:
    """Tunable limits shared by injectors, validators, and engines."""

    exception_threshold: int = 5  # more observed exceptions make a component unusable
    repeat_threshold: int = 3  # n-th failure of one component calls for a replacement type
    base_query_time_ms: float = 25.0  # search time floor with an empty filter pipe
    response_time_upper_ms: float = 400.0
    response_time_lower_ms: float = 150.0

    @classmethod
    def from_mapping(cls, data: dict) -> "Thresholds":
        allowed = set(cls.__dataclass_fields__)
        unknown = set(data) - allowed
        if unknown:
            raise ValueError(f"unknown threshold keys: {sorted(unknown)}")
        return cls(**data)


# --------------------------------------------------------------------------
# Blueprint


@dataclass(frozen=True)
class RoleSpec:
    """One of the 18 component roles every shop deploys.

    Each role has a primary and an alternative component type with the
    same interfaces, reliability, and criticality, so swapping the
    implementation never changes the utility a healthy instance yields.
    """

    role: str
    primary: str
    alternative: str
    reliability: float
    criticality: float
    requires: tuple[str, ...]
    provides: tuple[str, ...]
    parameters: tuple[tuple[str, str, str], ...]
    is_filter: bool = False


_I = {
    "auth": "market.auth.Authentication",
    "persistence": "market.persistence.Persistence",
    "query": "market.persistence.Query",
    "items": "market.items.ItemManagement",
    "users": "market.users.UserManagement",
    "trade": "market.trade.BidAndBuy",
    "inventory": "market.inventory.Inventory",
    "reputation": "market.reputation.Reputation",
    "filter": ITEM_FILTER_FQ,
}

INTERFACE_METHODS: dict[str, tuple[str, ...]] = {
    _I["auth"]: ("Session authenticate(Credentials c)", "void invalidate(Session s)"),
    _I["persistence"]: ("void store(Entity e)", "Entity load(Id id)"),
    _I["query"]: ("Item[] findItems(QuerySpec q)",),
    _I["items"]: ("Item[] search(QuerySpec q)", "void listItem(Item i)"),
    _I["users"]: ("User register(Profile p)", "User lookup(Id id)"),
    _I["trade"]: ("void placeBid(Bid b)", "Receipt buyNow(Item i)"),
    _I["inventory"]: ("int available(Item i)",),
    _I["reputation"]: ("Rating ratingOf(User u)",),
    _I["filter"]: (FILTER_METHOD,),
}


def _core(role, primary, reliability, criticality, requires, provides, parameters):
    return RoleSpec(
        role,
        primary,
        primary + " B",
        reliability,
        criticality,
        requires,
        provides,
        parameters,
    )


def _filter_role(role, primary, reliability):
    return RoleSpec(
        role,
        primary,
        primary + " B",
        reliability,
        1.0,
        (_I["filter"],),
        (_I["filter"],),
        (("batch-size", "int", "64"),),
        is_filter=True,
    )


CORE_ROLES: tuple[RoleSpec, ...] = (
    _core(
        "query-service",
        "Query Service",
        0.97,
        5.0,
        (_I["persistence"],),
        (_I["query"], _I["filter"]),
        (("cache-size", "int", "256"),),
    ),
    _core(
        "persistence-service",
        "Persistence Service",
        0.99,
        5.0,
        (),
        (_I["persistence"],),
        (("pool-size", "int", "16"),),
    ),
    _core(
        "auth-service",
        "Authentication Service",
        0.98,
        5.0,
        (_I["persistence"],),
        (_I["auth"],),
        (("token-ttl-s", "int", "3600"),),
    ),
    _core(
        "item-management",
        "Item Management Service",
        0.95,
        2.0,
        (_I["filter"], _I["query"], _I["persistence"], _I["auth"]),
        (_I["items"],),
        (("page-size", "int", "50"),),
    ),
    _core(
        "user-management",
        "User Management Service",
        0.94,
        2.0,
        (_I["persistence"], _I["auth"]),
        (_I["users"],),
        (("session-limit", "int", "4"),),
    ),
    _core(
        "bid-and-buy",
        "Bid and Buy Service",
        0.96,
        2.0,
        (_I["items"], _I["inventory"], _I["reputation"], _I["auth"], _I["persistence"]),
        (_I["trade"],),
        (("bid-increment", "real", "1.0"),),
    ),
    _core(
        "inventory-service",
        "Inventory Service",
        0.93,
        2.0,
        (_I["persistence"],),
        (_I["inventory"],),
        (("restock-threshold", "int", "5"),),
    ),
    _core(
        "reputation-service",
        "Reputation Service",
        0.92,
        2.0,
        (_I["persistence"], _I["users"]),
        (_I["reputation"],),
        (("min-reviews", "int", "3"),),
    ),
)

FILTER_ROLES: tuple[RoleSpec, ...] = (
    _filter_role("filter-availability", "Availability Filter", 0.990),
    _filter_role("filter-category", "Category Filter", 0.989),
    _filter_role("filter-price-range", "Price Range Filter", 0.992),
    _filter_role("filter-seller-rating", "Seller Rating Filter", 0.987),
    _filter_role("filter-region", "Region Filter", 0.991),
    _filter_role("filter-buy-now", "Buy Now Filter", 0.993),
    _filter_role("filter-deadline", "Auction Deadline Filter", 0.988),
    _filter_role("filter-recommendation", "Recommendation Filter", 0.986),
    _filter_role("filter-past-sales", "Past Sales Filter", 0.985),
    _filter_role("filter-fraud-screening", "Fraud Screening Filter", 0.994),
)

# Which role serves each interface; the filter interface is positional
# (pipe wiring) and deliberately absent here.
PROVIDER_ROLE_BY_FQ: dict[str, str] = {
    _I["persistence"]: "persistence-service",
    _I["auth"]: "auth-service",
    _I["query"]: "query-service",
    _I["items"]: "item-management",
    _I["users"]: "user-management",
    _I["trade"]: "bid-and-buy",
    _I["inventory"]: "inventory-service",
    _I["reputation"]: "reputation-service",
}


class Blueprint:
    """Role table of one shop plus lookup helpers."""

    def __init__(self) -> None:
        self.roles: tuple[RoleSpec, ...] = CORE_ROLES + FILTER_ROLES
        self._by_type_name: dict[str, RoleSpec] = {}
        for role in self.roles:
            self._by_type_name[role.primary] = role
            self._by_type_name[role.alternative] = role
        self._by_role = {r.role: r for r in self.roles}

    @property
    def shop_size(self) -> int:
        return len(self.roles)

    @property
    def filter_roles(self) -> tuple[RoleSpec, ...]:
        return FILTER_ROLES

    def role_of_type(self, type_name: str) -> RoleSpec | None:
        return self._by_type_name.get(type_name)

    def role_named(self, role: str) -> RoleSpec:
        return self._by_role[role]

    def expected_degree(self, role: RoleSpec) -> int:
        """Connector count of this role's component in a healthy shop."""
        degree = len(role.requires)
        for other in self.roles:
            for fq in other.requires:
                if fq != ITEM_FILTER_FQ and PROVIDER_ROLE_BY_FQ.get(fq) == role.role:
                    degree += 1
        if ITEM_FILTER_FQ in role.provides:
            degree += 1  # the pipe hangs exactly one consumer on it
        return degree

    def find_role_component(self, tenant: Tenant, role: str) -> Component | None:
        spec = self._by_role[role]
        for c in tenant.components:
            if c.type.name in (spec.primary, spec.alternative):
                return c
        return None

    def missing_roles(self, tenant: Tenant) -> list[RoleSpec]:
        present = set()
        for c in tenant.components:
            spec = self._by_type_name.get(c.type.name)
            if spec is not None:
                present.add(spec.role)
        return [r for r in self.roles if r.role not in present]


BLUEPRINT = Blueprint()


# --------------------------------------------------------------------------
# Generation


def generate_architecture(
    num_shops: int,
    rng: random.Random,
    thresholds: Thresholds | None = None,
    name: str = "marketplace",
    blueprint: Blueprint = BLUEPRINT,
) -> Architecture:
    """Build a marketplace with ``num_shops`` identical, healthy shops.

    Randomness (filter speeds, invocation counts, parameter values) is
    drawn exclusively from ``rng``, so equal seeds give equal models.
    The change events of the construction itself are discarded: the
    simulation starts from a quiet, fully started architecture.
    """
    if num_shops < 1:
        raise ValueError("an architecture needs at least one shop")
    thresholds = thresholds or Thresholds()
    arch = Architecture(name)
    itypes = {fq: arch.add_interface_type(fq, methods) for fq, methods in INTERFACE_METHODS.items()}
    types: dict[str, tuple] = {}
    for role in blueprint.roles:
        requires = tuple(itypes[fq] for fq in role.requires)
        provides = tuple(itypes[fq] for fq in role.provides)
        primary = arch.add_component_type(
            role.primary,
            reliability=role.reliability,
            criticality=role.criticality,
            parameters=role.parameters,
            requires=requires,
            provides=provides,
        )
        alternative = arch.add_component_type(
            role.alternative,
            reliability=role.reliability,
            criticality=role.criticality,
            parameters=role.parameters,
            requires=requires,
            provides=provides,
        )
        types[role.role] = (primary, alternative)

    sim = arch.handle(Role.SIMULATOR)
    for shop_index in range(1, num_shops + 1):
        tenant = arch.add_tenant(f"shop-{shop_index}")
        # Filter speeds decide the pipe order: fastest sits at the front.
        speeds = [(role, rng.uniform(5.0, 25.0)) for role in blueprint.filter_roles]
        speeds.sort(key=lambda item: item[1])

        by_role: dict[str, Component] = {}
        for role in CORE_ROLES:
            by_role[role.role] = sim.instantiate(types[role.role][0], tenant)
        pipe: list[tuple[Component, float]] = []
        for role, avg in speeds:
            comp = sim.instantiate(types[role.role][0], tenant)
            by_role[role.role] = comp
            pipe.append((comp, avg))

        for comp in by_role.values():
            for par in comp.parameters:
                if par.type.data_type == "int":
                    base = int(par.type.default_value)
                    value = rng.randint(max(1, base // 2), base * 2)
                    sim.set_parameter(comp, par.type.name, str(value))

        for role in blueprint.roles:
            comp = by_role[role.role]
            for fq in role.requires:
                if fq == ITEM_FILTER_FQ:
                    continue
                provider = by_role[PROVIDER_ROLE_BY_FQ[fq]]
                sim.connect(comp.required(fq), provider.provided(fq))
        upstream = by_role["query-service"].provided(ITEM_FILTER_FQ)
        for comp, _avg in pipe:
            sim.connect(comp.required(ITEM_FILTER_FQ), upstream)
            upstream = comp.provided(ITEM_FILTER_FQ)
        sim.connect(by_role["item-management"].required(ITEM_FILTER_FQ), upstream)

        for comp in by_role.values():
            sim.set_state(comp, ComponentState.DEPLOYED)
            sim.set_state(comp, ComponentState.STARTED)

        for comp, avg in pipe:
            count = rng.randint(50, 500)
            sim.update_performance_stats(
                comp.provided(ITEM_FILTER_FQ),
                FILTER_METHOD,
                min_ms=avg * rng.uniform(0.3, 0.8),
                max_ms=avg * rng.uniform(1.2, 3.0),
                total_ms=avg * count,
                invocation_count=count,
            )
        sync_response_time_property(sim, tenant, thresholds, blueprint)

    arch.events.clear()
    return arch


# --------------------------------------------------------------------------
# Pipe helpers


def pipe_filters(tenant: Tenant, blueprint: Blueprint = BLUEPRINT) -> list[Component] | None:
    """The tenant's filter chain from front (after the query service) to
    back (before item management), or None if the chain is broken."""
    query = blueprint.find_role_component(tenant, "query-service")
    items = blueprint.find_role_component(tenant, "item-management")
    if query is None or items is None:
        return None
    chain: list[Component] = []
    seen: set[str] = set()
    current = query.provided(ITEM_FILTER_FQ)
    while True:
        if len(current.connectors) != 1:
            return None
        owner = current.connectors[0].source.owner
        if owner is items:
            return chain
        role = blueprint.role_of_type(owner.type.name)
        if role is None or not role.is_filter or owner.uid in seen:
            return None
        chain.append(owner)
        seen.add(owner.uid)
        current = owner.provided(ITEM_FILTER_FQ)


def filter_average_ms(component: Component) -> float | None:
    stats = component.provided(ITEM_FILTER_FQ).stats_for(FILTER_METHOD)
    return None if stats is None else stats.average_ms


def pipe_response_time_ms(tenant: Tenant, thresholds: Thresholds, blueprint: Blueprint = BLUEPRINT) -> float | None:
    """Recompute the search response time from the current pipe stats."""
    chain = pipe_filters(tenant, blueprint)
    if chain is None:
        return None
    averages = [a for a in (filter_average_ms(f) for f in chain) if a is not None]
    return thresholds.base_query_time_ms + math.fsum(averages)


def sync_response_time_property(
    sim: ModelHandle, tenant: Tenant, thresholds: Thresholds, blueprint: Blueprint = BLUEPRINT
) -> None:
    """Write the recomputed response time unless it is already current."""
    response = pipe_response_time_ms(tenant, thresholds, blueprint)
    if response is None:
        return
    value = repr(response)
    existing = tenant.property_named(RESPONSE_TIME_PROPERTY)
    if existing is not None and existing.value == value:
        return
    sim.set_monitored_property(
        tenant,
        RESPONSE_TIME_PROPERTY,
        data_type="real",
        unit="ms",
        value=value,
        description="end-to-end item search time",
    )


# --------------------------------------------------------------------------
# Utility functions


def component_utility(component: Component, thresholds: Thresholds) -> float:
    """Reliability times criticality times connector count; zero for a
    component that is not running or drowns in exceptions."""
    if component.state is not ComponentState.STARTED:
        return 0.0
    if component.exception_count() > thresholds.exception_threshold:
        return 0.0
    degree = sum(1 for r in component.required_interfaces if r.connector is not None)
    degree += sum(len(p.connectors) for p in component.provided_interfaces)
    return component.type.reliability * component.criticality * degree


class HealthUtility:
    """Architecture utility as the sum of per-component utilities."""

    name = "health"

    def __init__(self, thresholds: Thresholds) -> None:
        self.thresholds = thresholds

    def utility(self, arch: Architecture) -> float:
        return math.fsum(
            component_utility(c, self.thresholds) for t in arch.tenants for c in t.components
        )


class ResponseAwareUtility:
    """Health utility with pipe penalties per shop.

    Every filter that is slower than its immediate successor costs half
    its own utility, and a shop whose search response time exceeds the
    upper threshold keeps only 80 percent of its utility.
    """

    name = "response-aware"

    def __init__(self, thresholds: Thresholds, blueprint: Blueprint = BLUEPRINT) -> None:
        self.thresholds = thresholds
        self.blueprint = blueprint

    def shop_utility(self, tenant: Tenant) -> float:
        base = math.fsum(component_utility(c, self.thresholds) for c in tenant.components)
        penalty = 0.0
        chain = pipe_filters(tenant, self.blueprint)
        if chain:
            averages = [filter_average_ms(f) for f in chain]
            for i in range(len(chain) - 1):
                a, b = averages[i], averages[i + 1]
                if a is not None and b is not None and a > b:
                    penalty += 0.5 * component_utility(chain[i], self.thresholds)
        value = base - penalty
        prop = tenant.property_named(RESPONSE_TIME_PROPERTY)
        if prop is not None and prop.as_float() > self.thresholds.response_time_upper_ms:
            value *= 0.8
        return value

    def utility(self, arch: Architecture) -> float:
        return math.fsum(self.shop_utility(t) for t in arch.tenants)


# --------------------------------------------------------------------------
# Issue injection


class IssueKind(enum.Enum):
    COMPONENT_CRASH = "component-crash"
    EXCEPTION_BURST = "exception-burst"
    COMPONENT_LOSS = "component-loss"
    RECURRING_FAILURE = "recurring-failure"
    CONNECTOR_LOSS = "connector-loss"
    FILTER_MISORDER = "filter-misorder"
    RESPONSE_OVERRUN = "response-overrun"
    RESPONSE_UNDERRUN = "response-underrun"


class FailureHistory:
    """How often each component was hit by a crash or exception burst.

    Keyed by component uid, so a replaced component starts over."""

    def __init__(self) -> None:
        self._hits: dict[str, int] = {}

    def record(self, uid: str) -> None:
        self._hits[uid] = self._hits.get(uid, 0) + 1

    def count(self, uid: str) -> int:
        return self._hits.get(uid, 0)


class ComponentCrashInjector:
    """Push a running component into the UNKNOWN state."""

    kind = IssueKind.COMPONENT_CRASH

    def __init__(self, history: FailureHistory) -> None:
        self.history = history

    def targets(self, arch: Architecture) -> list[Component]:
        return [c for c in arch.all_components() if c.state is ComponentState.STARTED]

    def inject(self, sim: ModelHandle, component: Component) -> None:
        sim.set_state(component, ComponentState.UNKNOWN)
        self.history.record(component.uid)


class ExceptionBurstInjector:
    """Record one more exception than the tolerated limit."""

    kind = IssueKind.EXCEPTION_BURST

    def __init__(self, thresholds: Thresholds, history: FailureHistory) -> None:
        self.thresholds = thresholds
        self.history = history

    def targets(self, arch: Architecture) -> list[Component]:
        return [
            c
            for c in arch.all_components()
            if c.state is ComponentState.STARTED
            and any(p.type.methods for p in c.provided_interfaces)
        ]

    def inject(self, sim: ModelHandle, component: Component) -> None:
        interface = next(p for p in component.provided_interfaces if p.type.methods)
        method = interface.type.methods[0].signature
        for i in range(self.thresholds.exception_threshold + 1):
            sim.record_exception(
                interface,
                method,
                "market.errors.RemoteCallFailure",
                f"call {i + 1} failed",
                f"at {component.type.name}#{method}",
            )
        self.history.record(component.uid)


class ComponentLossInjector:
    """Remove a component outright; its connectors cascade away."""

    kind = IssueKind.COMPONENT_LOSS

    def targets(self, arch: Architecture) -> list[Component]:
        return arch.all_components()

    def inject(self, sim: ModelHandle, component: Component) -> None:
        sim.remove_component(component)


class RecurringFailureInjector:
    """Hit a component that already failed repeatedly once more.

    Re-applies a crash to running targets on even prior hit counts and
    an exception burst otherwise, so repeated selections alternate."""

    kind = IssueKind.RECURRING_FAILURE

    def __init__(
        self,
        crash: ComponentCrashInjector,
        burst: ExceptionBurstInjector,
        history: FailureHistory,
        thresholds: Thresholds,
    ) -> None:
        self.crash = crash
        self.burst = burst
        self.history = history
        self.thresholds = thresholds

    def targets(self, arch: Architecture) -> list[Component]:
        needed = self.thresholds.repeat_threshold - 1
        return [
            c
            for c in arch.all_components()
            if c.state is ComponentState.STARTED and self.history.count(c.uid) >= needed
        ]

    def inject(self, sim: ModelHandle, component: Component) -> None:
        use_crash = (
            component.state is ComponentState.STARTED
            and self.history.count(component.uid) % 2 == 0
        )
        if use_crash:
            self.crash.inject(sim, component)
        else:
            self.burst.inject(sim, component)


class ConnectorLossInjector:
    """Sever one connector without touching its endpoints."""

    kind = IssueKind.CONNECTOR_LOSS

    def targets(self, arch: Architecture) -> list[Connector]:
        return arch.all_connectors()

    def inject(self, sim: ModelHandle, connector: Connector) -> None:
        sim.remove_connector(connector)


def _scale_filter_stats(sim: ModelHandle, component: Component, factor: float) -> None:
    interface = component.provided(ITEM_FILTER_FQ)
    stats = interface.stats_for(FILTER_METHOD)
    assert stats is not None
    sim.update_performance_stats(
        interface,
        FILTER_METHOD,
        min_ms=stats.min_time_ms * factor,
        max_ms=stats.max_time_ms * factor,
        total_ms=stats.total_time_ms * factor,
        invocation_count=stats.invocation_count,
    )


class FilterMisorderInjector:
    """Slow the front filter down past everyone else, creating exactly
    one adjacent inversion in the pipe."""

    kind = IssueKind.FILTER_MISORDER

    def __init__(self, thresholds: Thresholds, blueprint: Blueprint = BLUEPRINT) -> None:
        self.thresholds = thresholds
        self.blueprint = blueprint

    def applicable(self, tenant: Tenant) -> bool:
        chain = pipe_filters(tenant, self.blueprint)
        if chain is None or len(chain) < 2:
            return False
        return all(filter_average_ms(f) is not None for f in chain)

    def inject(self, sim: ModelHandle, tenant: Tenant) -> None:
        chain = pipe_filters(tenant, self.blueprint)
        assert chain is not None and len(chain) >= 2
        averages = [filter_average_ms(f) for f in chain]
        front = chain[0]
        target = max(a for a in averages if a is not None) * 1.25
        _scale_filter_stats(sim, front, target / averages[0])
        sync_response_time_property(sim, tenant, self.thresholds, self.blueprint)


class ResponseOverrunInjector:
    """Scale all filter stats up until the search time breaks the upper
    threshold.  Uniform scaling keeps the pipe order intact."""

    kind = IssueKind.RESPONSE_OVERRUN

    def __init__(self, thresholds: Thresholds, blueprint: Blueprint = BLUEPRINT) -> None:
        self.thresholds = thresholds
        self.blueprint = blueprint

    def _scale_to(self, sim: ModelHandle, tenant: Tenant, target_response: float) -> None:
        chain = pipe_filters(tenant, self.blueprint)
        assert chain
        averages = [filter_average_ms(f) for f in chain]
        total = math.fsum(a for a in averages if a is not None)
        assert total > 0
        factor = (target_response - self.thresholds.base_query_time_ms) / total
        for f, a in zip(chain, averages):
            if a is not None:
                _scale_filter_stats(sim, f, factor)
        sync_response_time_property(sim, tenant, self.thresholds, self.blueprint)

    def applicable(self, tenant: Tenant) -> bool:
        chain = pipe_filters(tenant, self.blueprint)
        return bool(chain) and any(filter_average_ms(f) is not None for f in chain)

    def inject(self, sim: ModelHandle, tenant: Tenant) -> None:
        self._scale_to(sim, tenant, self.thresholds.response_time_upper_ms * 1.2)


class ResponseUnderrunInjector(ResponseOverrunInjector):
    """Scale filter stats down so far that the pipe is underutilized.

    Only meaningful for a shop that runs fewer filters than the
    blueprint carries, where re-adding a skipped filter is possible."""

    kind = IssueKind.RESPONSE_UNDERRUN

    def applicable(self, tenant: Tenant) -> bool:
        if not super().applicable(tenant):
            return False
        chain = pipe_filters(tenant, self.blueprint)
        assert chain is not None
        return len(chain) < len(self.blueprint.filter_roles)

    def inject(self, sim: ModelHandle, tenant: Tenant) -> None:
        self._scale_to(sim, tenant, self.thresholds.response_time_lower_ms * 0.8)


# --------------------------------------------------------------------------
# Scenarios


class FailureScenario:
    """Per round, pick one failure kind with at least one target, then a
    target, both uniformly at random."""

    name = "healing"

    def __init__(self, injectors: dict[IssueKind, object]) -> None:
        order = (
            IssueKind.COMPONENT_CRASH,
            IssueKind.EXCEPTION_BURST,
            IssueKind.COMPONENT_LOSS,
            IssueKind.RECURRING_FAILURE,
            IssueKind.CONNECTOR_LOSS,
        )
        self.kinds = tuple(k for k in order if k in injectors)
        self._injectors = injectors

    def next_injections(self, round_index: int, arch: Architecture, rng: random.Random):
        available = []
        for kind in self.kinds:
            targets = self._injectors[kind].targets(arch)  # type: ignore[attr-defined]
            if targets:
                available.append((kind, targets))
        if not available:
            return []
        kind, targets = available[rng.randrange(len(available))]
        return [(kind, targets[rng.randrange(len(targets))])]


class PipeScenario:
    """Per round, pick one shop, then one applicable pipe disturbance."""

    name = "optimization"

    def __init__(self, injectors: dict[IssueKind, object]) -> None:
        order = (
            IssueKind.FILTER_MISORDER,
            IssueKind.RESPONSE_OVERRUN,
            IssueKind.RESPONSE_UNDERRUN,
        )
        self.kinds = tuple(k for k in order if k in injectors)
        self._injectors = injectors

    def next_injections(self, round_index: int, arch: Architecture, rng: random.Random):
        if not arch.tenants:
            return []
        tenant = arch.tenants[rng.randrange(len(arch.tenants))]
        applicable = [
            k for k in self.kinds if self._injectors[k].applicable(tenant)  # type: ignore[attr-defined]
        ]
        if not applicable:
            return []
        kind = applicable[rng.randrange(len(applicable))]
        return [(kind, tenant)]


# --------------------------------------------------------------------------
# Validators


@dataclass(frozen=True)
class Violation:
    validator: str
    subject_uid: str
    message: str


class StructuralValidator:
    """Checks every architecture must pass regardless of the scenario."""

    name = "architecture"

    def validate(self, sim: ModelHandle) -> list[Violation]:
        violations: list[Violation] = []
        seen_uids: set[str] = set()
        seen_fq: set[str] = set()

        def claim(uid: str) -> None:
            if uid in seen_uids:
                violations.append(Violation(self.name, uid, "duplicate uid"))
            seen_uids.add(uid)

        for it in sim.interface_types():
            claim(it.uid)
            if it.fq_name in seen_fq:
                violations.append(Violation(self.name, it.uid, f"duplicate interface name {it.fq_name}"))
            seen_fq.add(it.fq_name)
            for m in it.methods:
                claim(m.uid)
        known_types = set()
        for ct in sim.component_types():
            claim(ct.uid)
            known_types.add(ct.uid)
            for pt in ct.parameter_types:
                claim(pt.uid)
        for tenant in sim.tenants():
            claim(tenant.uid)
            for mp in tenant.monitored_properties:
                claim(mp.uid)
            for c in sim.components(tenant):
                claim(c.uid)
                if c.type.uid not in known_types:
                    violations.append(Violation(self.name, c.uid, "component of unregistered type"))
                if c.state is ComponentState.UNKNOWN:
                    violations.append(Violation(self.name, c.uid, "component in UNKNOWN state"))
                for par in c.parameters:
                    claim(par.uid)
                for r in c.required_interfaces:
                    claim(r.uid)
                    if r.connector is None:
                        violations.append(
                            Violation(self.name, r.uid, f"required {r.type.fq_name} unconnected")
                        )
                for p in c.provided_interfaces:
                    claim(p.uid)
                    for ex in p.exceptions:
                        claim(ex.uid)
                    for st in p.performance_stats:
                        claim(st.uid)
                for mp in c.monitored_properties:
                    claim(mp.uid)
            for conn in sim.connectors(tenant):
                claim(conn.uid)
                source_tenant = conn.source.owner.tenant
                target_tenant = conn.target.owner.tenant
                if source_tenant is not tenant or target_tenant is not tenant:
                    violations.append(Violation(self.name, conn.uid, "connector crosses tenants"))
                if conn.source.type.fq_name != conn.target.type.fq_name:
                    violations.append(Violation(self.name, conn.uid, "connector joins unlike interfaces"))
        return violations


class ServiceHealthValidator:
    """Every shop runs its full component set and nothing drowns in
    exceptions."""

    name = "service-health"

    def __init__(self, thresholds: Thresholds, blueprint: Blueprint = BLUEPRINT) -> None:
        self.thresholds = thresholds
        self.blueprint = blueprint

    def validate(self, sim: ModelHandle) -> list[Violation]:
        violations: list[Violation] = []
        for tenant in sim.tenants():
            components = sim.components(tenant)
            if len(components) != self.blueprint.shop_size:
                violations.append(
                    Violation(
                        self.name,
                        tenant.uid,
                        f"shop runs {len(components)} of {self.blueprint.shop_size} components",
                    )
                )
            for role in self.blueprint.missing_roles(tenant):
                violations.append(Violation(self.name, tenant.uid, f"missing role {role.role}"))
            for c in components:
                count = c.exception_count()
                if count > self.thresholds.exception_threshold:
                    violations.append(
                        Violation(self.name, c.uid, f"{count} exceptions exceed the limit")
                    )
        return violations


class PipeOrderValidator:
    """Keeps the pipe world honest after each round.

    Restores performance stats on re-added filters (from the engine's
    restored-filter working data, falling back to the profile this
    validator last saw), recomputes the response time property, and
    reports ordering and threshold violations.
    """

    name = "pipe"

    def __init__(self, thresholds: Thresholds, blueprint: Blueprint = BLUEPRINT) -> None:
        self.thresholds = thresholds
        self.blueprint = blueprint
        self._profiles: dict[tuple[str, str], dict] = {}

    def prime(self, sim: ModelHandle) -> None:
        """Learn the initial stats so later re-adds can be restored."""
        for tenant in sim.tenants():
            chain = pipe_filters(tenant, self.blueprint)
            if chain:
                self._remember(tenant, chain)

    def _remember(self, tenant: Tenant, chain: list[Component]) -> None:
        for f in chain:
            stats = f.provided(ITEM_FILTER_FQ).stats_for(FILTER_METHOD)
            if stats is not None:
                self._profiles[(tenant.uid, f.type.uid)] = {
                    "min": stats.min_time_ms,
                    "max": stats.max_time_ms,
                    "total": stats.total_time_ms,
                    "count": stats.invocation_count,
                }

    def _restore_stats(self, sim: ModelHandle, tenant: Tenant, component: Component) -> bool:
        profile = None
        for ann in sim.annotations(WorkingData):
            if (
                ann.name == "restored-filter"
                and tenant.uid in ann.concerns
                and component.uid in ann.concerns
            ):
                profile = json.loads(ann.value)
                sim.remove_annotation(ann)
                break
        if profile is None:
            profile = self._profiles.get((tenant.uid, component.type.uid))
        if profile is None:
            return False
        sim.update_performance_stats(
            component.provided(ITEM_FILTER_FQ),
            FILTER_METHOD,
            min_ms=profile["min"],
            max_ms=profile["max"],
            total_ms=profile["total"],
            invocation_count=profile["count"],
        )
        return True

    def validate(self, sim: ModelHandle) -> list[Violation]:
        violations: list[Violation] = []
        for tenant in sim.tenants():
            chain = pipe_filters(tenant, self.blueprint)
            if chain is None:
                violations.append(Violation(self.name, tenant.uid, "filter pipe broken"))
                continue
            for f in chain:
                if filter_average_ms(f) is None and not self._restore_stats(sim, tenant, f):
                    violations.append(
                        Violation(self.name, f.uid, "filter lacks performance statistics")
                    )
            averages = [filter_average_ms(f) for f in chain]
            for i in range(len(chain) - 1):
                a, b = averages[i], averages[i + 1]
                if a is not None and b is not None and a > b:
                    violations.append(
                        Violation(
                            self.name,
                            chain[i].uid,
                            f"filter slower than its successor ({a:.3f} > {b:.3f} ms)",
                        )
                    )
            sync_response_time_property(sim, tenant, self.thresholds, self.blueprint)
            response = pipe_response_time_ms(tenant, self.thresholds, self.blueprint)
            if response is not None:
                if response > self.thresholds.response_time_upper_ms:
                    violations.append(
                        Violation(
                            self.name,
                            tenant.uid,
                            f"response time {response:.1f} ms above the upper threshold",
                        )
                    )
                elif response < self.thresholds.response_time_lower_ms and blueprint_missing_filters(
                    tenant, self.blueprint
                ):
                    violations.append(
                        Violation(
                            self.name,
                            tenant.uid,
                            f"pipe underutilized at {response:.1f} ms with filters skipped",
                        )
                    )
            self._remember(tenant, chain)
        return violations


def blueprint_missing_filters(tenant: Tenant, blueprint: Blueprint = BLUEPRINT) -> list[RoleSpec]:
    return [r for r in blueprint.missing_roles(tenant) if r.is_filter]


# --------------------------------------------------------------------------
# Case bundles


@dataclass
class Case:
    """Everything scenario-specific a simulation run needs."""

    name: str
    scenario: object
    injectors: dict[IssueKind, object]
    validators: list
    utility: object
    history: FailureHistory | None = None


def build_case(name: str, thresholds: Thresholds, blueprint: Blueprint = BLUEPRINT) -> Case:
    if name == "healing":
        history = FailureHistory()
        crash = ComponentCrashInjector(history)
        burst = ExceptionBurstInjector(thresholds, history)
        injectors: dict[IssueKind, object] = {
            IssueKind.COMPONENT_CRASH: crash,
            IssueKind.EXCEPTION_BURST: burst,
            IssueKind.COMPONENT_LOSS: ComponentLossInjector(),
            IssueKind.RECURRING_FAILURE: RecurringFailureInjector(crash, burst, history, thresholds),
            IssueKind.CONNECTOR_LOSS: ConnectorLossInjector(),
        }
        return Case(
            name,
            FailureScenario(injectors),
            injectors,
            [StructuralValidator(), ServiceHealthValidator(thresholds, blueprint)],
            HealthUtility(thresholds),
            history,
        )
    if name == "optimization":
        injectors = {
            IssueKind.FILTER_MISORDER: FilterMisorderInjector(thresholds, blueprint),
            IssueKind.RESPONSE_OVERRUN: ResponseOverrunInjector(thresholds, blueprint),
            IssueKind.RESPONSE_UNDERRUN: ResponseUnderrunInjector(thresholds, blueprint),
        }
        return Case(
            name,
            PipeScenario(injectors),
            injectors,
            [StructuralValidator(), PipeOrderValidator(thresholds, blueprint)],
            ResponseAwareUtility(thresholds, blueprint),
        )
    raise ValueError(f"unknown case {name!r}; expected 'healing' or 'optimization'")


CASE_NAMES = ("healing", "optimization")
