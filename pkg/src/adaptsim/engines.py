"""Adaptation engines.

Three self-healers (a scan-everything baseline, the same logic split
into explicit monitor/analyze/plan/execute stages, and an event-driven
variant), one event-driven self-optimizer for the filter pipes, and a
do-nothing engine for baselines.

Engines only ever see a role-restricted model handle for the duration of
one ``adapt`` call and must not keep references across rounds; whatever
an engine wants to remember about the model it stores as annotations
(working data) or primitive values (uid-keyed counters).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .marketplace import (
    BLUEPRINT,
    FILTER_METHOD,
    ITEM_FILTER_FQ,
    PROVIDER_ROLE_BY_FQ,
    Blueprint,
    IssueKind,
    RoleSpec,
    Thresholds,
    filter_average_ms,
    pipe_filters,
)
from .model import (
    AdaptationStrategy,
    Component,
    ComponentState,
    ComponentType,
    Issue,
    ModelHandle,
    RequiredInterface,
    Tenant,
    WorkingData,
)
from .events import ChangeEvent, ChangeEventKind

STRATEGY_COSTS = {
    "restart": 1.0,
    "redeploy": 2.0,
    "replace": 4.0,
    "replace-alternative": 5.0,
    "reconnect": 1.0,
    "reorder-pipe": 2.0,
    "skip-filters": 3.0,
    "readd-filters": 3.0,
}

STRATEGY_FOR_KIND = {
    IssueKind.COMPONENT_CRASH: "restart",
    IssueKind.EXCEPTION_BURST: "redeploy",
    IssueKind.COMPONENT_LOSS: "replace",
    IssueKind.RECURRING_FAILURE: "replace-alternative",
    IssueKind.CONNECTOR_LOSS: "reconnect",
}

SKIPPED_FILTER_DATA = "skipped-filter"
RESTORED_FILTER_DATA = "restored-filter"


@dataclass
class EngineOutcome:
    """What one adapt call did: (strategy, subject uid) pairs plus notes."""

    strategies: list[tuple[str, str]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def applied(self, strategy: str, subject_uid: str) -> None:
        self.strategies.append((strategy, subject_uid))

    def note(self, text: str) -> None:
        self.notes.append(text)


# --------------------------------------------------------------------------
# Repair toolbox, shared by all healers


def restart_component(handle: ModelHandle, component: Component) -> None:
    """Bring a crashed component back: UNKNOWN -> DEPLOYED -> STARTED."""
    handle.set_state(component, ComponentState.DEPLOYED)
    handle.set_state(component, ComponentState.STARTED)


def redeploy_component(handle: ModelHandle, component: Component) -> None:
    """Take a component all the way down and up again.

    Passing through UNDEPLOYED discards the exceptions observed on it,
    which is the point of a redeploy."""
    down = {
        ComponentState.STARTED: (ComponentState.DEPLOYED, ComponentState.UNDEPLOYED),
        ComponentState.DEPLOYED: (ComponentState.UNDEPLOYED,),
        ComponentState.UNKNOWN: (ComponentState.DEPLOYED, ComponentState.UNDEPLOYED),
        ComponentState.UNDEPLOYED: (),
    }
    for state in down[component.state]:
        handle.set_state(component, state)
    handle.set_state(component, ComponentState.DEPLOYED)
    handle.set_state(component, ComponentState.STARTED)


def alternative_type(handle: ModelHandle, blueprint: Blueprint, component: Component) -> ComponentType:
    """The other implementation of the component's role."""
    role = blueprint.role_of_type(component.type.name)
    if role is None:
        raise LookupError(f"component type {component.type.name!r} belongs to no role")
    wanted = role.alternative if component.type.name == role.primary else role.primary
    for ct in handle.component_types():
        if ct.name == wanted:
            return ct
    raise LookupError(f"no component type named {wanted!r}")


def primary_type(handle: ModelHandle, role: RoleSpec) -> ComponentType:
    for ct in handle.component_types():
        if ct.name == role.primary:
            return ct
    raise LookupError(f"no component type named {role.primary!r}")


def rebuild_pipe(handle: ModelHandle, blueprint: Blueprint, tenant: Tenant) -> bool:
    """Rewire the tenant's filter chain into ascending average order.

    Filters without statistics go to the back, keeping their relative
    order.  Existing connectors are rerouted, missing ones created, so a
    cut or shuffled pipe comes out whole."""
    query = blueprint.find_role_component(tenant, "query-service")
    items = blueprint.find_role_component(tenant, "item-management")
    if query is None or items is None:
        return False
    components = handle.components(tenant)
    filters = []
    for c in components:
        role = blueprint.role_of_type(c.type.name)
        if role is not None and role.is_filter:
            filters.append(c)
    order = sorted(
        enumerate(filters),
        key=lambda pair: (filter_average_ms(pair[1]) is None, filter_average_ms(pair[1]) or 0.0, pair[0]),
    )
    upstream = query.provided(ITEM_FILTER_FQ)
    for _, f in order:
        _attach(handle, f.required(ITEM_FILTER_FQ), upstream)
        upstream = f.provided(ITEM_FILTER_FQ)
    _attach(handle, items.required(ITEM_FILTER_FQ), upstream)
    return True


def _attach(handle: ModelHandle, required: RequiredInterface, provided) -> None:
    if required.connector is None:
        handle.connect(required, provided)
    elif required.connector.target is not provided:
        handle.reroute(required.connector, provided)


def install_component(
    handle: ModelHandle, blueprint: Blueprint, tenant: Tenant, component_type: ComponentType
) -> Component:
    """Instantiate, start, and fully wire a component into its shop."""
    component = handle.instantiate(component_type, tenant)
    handle.set_state(component, ComponentState.DEPLOYED)
    handle.set_state(component, ComponentState.STARTED)
    touches_pipe = False
    for r in component.required_interfaces:
        fq = r.type.fq_name
        if fq == ITEM_FILTER_FQ:
            touches_pipe = True
            continue
        if r.connector is not None:
            continue
        provider = blueprint.find_role_component(tenant, PROVIDER_ROLE_BY_FQ[fq])
        if provider is not None:
            handle.connect(r, provider.provided(fq))
    provided_fqs = {p.type.fq_name for p in component.provided_interfaces}
    if ITEM_FILTER_FQ in provided_fqs:
        touches_pipe = True
        provided_fqs.discard(ITEM_FILTER_FQ)
    if provided_fqs:
        for c in handle.components(tenant):
            for r in c.required_interfaces:
                if r.connector is None and r.type.fq_name in provided_fqs:
                    handle.connect(r, component.provided(r.type.fq_name))
    if touches_pipe:
        rebuild_pipe(handle, blueprint, tenant)
    return component


# --------------------------------------------------------------------------
# Failure detection, shared by the scan-based healers


@dataclass
class Finding:
    kind: IssueKind
    tenant: Tenant
    component: Component | None = None
    role: RoleSpec | None = None
    required: RequiredInterface | None = None
    utility_drop: float = 0.0

    def subject_uid(self) -> str:
        if self.component is not None:
            return self.component.uid
        if self.required is not None:
            return self.required.uid
        return self.tenant.uid


def detect_failures(
    handle: ModelHandle,
    blueprint: Blueprint,
    thresholds: Thresholds,
    repair_counts: dict[str, int],
) -> list[Finding]:
    """One full scan: broken components, missing roles, dangling wires."""
    findings: list[Finding] = []
    for tenant in handle.tenants():
        components = handle.components(tenant)
        for c in components:
            broken_state = c.state is ComponentState.UNKNOWN
            too_many = c.exception_count() > thresholds.exception_threshold
            if not broken_state and not too_many:
                continue
            recurring = repair_counts.get(c.uid, 0) >= thresholds.repeat_threshold - 1
            if recurring:
                kind = IssueKind.RECURRING_FAILURE
            elif broken_state:
                kind = IssueKind.COMPONENT_CRASH
            else:
                kind = IssueKind.EXCEPTION_BURST
            drop = c.type.reliability * c.criticality * handle.connectivity(c)
            findings.append(Finding(kind, tenant, component=c, utility_drop=drop))
        for role in blueprint.missing_roles(tenant):
            drop = role.reliability * role.criticality * blueprint.expected_degree(role)
            findings.append(Finding(IssueKind.COMPONENT_LOSS, tenant, role=role, utility_drop=drop))
        for c in components:
            for r in c.required_interfaces:
                if r.connector is not None:
                    continue
                drop = c.type.reliability * c.criticality
                provider_role = PROVIDER_ROLE_BY_FQ.get(r.type.fq_name)
                if provider_role is not None:
                    provider = blueprint.find_role_component(tenant, provider_role)
                    if provider is not None:
                        drop += provider.type.reliability * provider.criticality
                findings.append(
                    Finding(IssueKind.CONNECTOR_LOSS, tenant, component=c, required=r, utility_drop=drop)
                )
    return findings


def apply_finding(
    handle: ModelHandle,
    blueprint: Blueprint,
    thresholds: Thresholds,
    repair_counts: dict[str, int],
    finding: Finding,
    outcome: EngineOutcome,
) -> None:
    """Execute the repair for one finding, re-checking its precondition
    first: an earlier repair this round may have fixed it already."""
    kind = finding.kind
    if kind is IssueKind.COMPONENT_CRASH:
        c = finding.component
        assert c is not None
        if c.state is ComponentState.UNKNOWN:
            restart_component(handle, c)
            repair_counts[c.uid] = repair_counts.get(c.uid, 0) + 1
            outcome.applied("restart", c.uid)
    elif kind is IssueKind.EXCEPTION_BURST:
        c = finding.component
        assert c is not None
        if c.exception_count() > thresholds.exception_threshold:
            redeploy_component(handle, c)
            repair_counts[c.uid] = repair_counts.get(c.uid, 0) + 1
            outcome.applied("redeploy", c.uid)
    elif kind is IssueKind.RECURRING_FAILURE:
        c = finding.component
        assert c is not None
        still_broken = (
            c.state is ComponentState.UNKNOWN
            or c.exception_count() > thresholds.exception_threshold
        )
        if still_broken:
            new_type = alternative_type(handle, blueprint, c)
            tenant = handle.tenant_of(c)
            repair_counts.pop(c.uid, None)
            handle.remove_component(c)
            replacement = install_component(handle, blueprint, tenant, new_type)
            outcome.applied("replace-alternative", replacement.uid)
    elif kind is IssueKind.COMPONENT_LOSS:
        role = finding.role
        assert role is not None
        if blueprint.find_role_component(finding.tenant, role.role) is None:
            replacement = install_component(
                handle, blueprint, finding.tenant, primary_type(handle, role)
            )
            outcome.applied("replace", replacement.uid)
    elif kind is IssueKind.CONNECTOR_LOSS:
        r = finding.required
        assert r is not None and finding.component is not None
        if handle.find_by_uid(finding.component.uid) is None or r.connector is not None:
            return
        if r.type.fq_name == ITEM_FILTER_FQ:
            if rebuild_pipe(handle, blueprint, finding.tenant):
                outcome.applied("reconnect", r.uid)
            return
        provider_role = PROVIDER_ROLE_BY_FQ.get(r.type.fq_name)
        provider = (
            blueprint.find_role_component(finding.tenant, provider_role)
            if provider_role is not None
            else None
        )
        if provider is not None:
            handle.connect(r, provider.provided(r.type.fq_name))
            outcome.applied("reconnect", r.uid)


# --------------------------------------------------------------------------
# Healers


class MonolithicHealer:
    """Scans the whole model every round and repairs what it finds.

    Ignores the change events on purpose: this is the baseline whose
    model-access count the event-driven healer is measured against."""

    name = "monolithic"

    def __init__(self, thresholds: Thresholds, blueprint: Blueprint = BLUEPRINT) -> None:
        self.thresholds = thresholds
        self.blueprint = blueprint
        self._repair_counts: dict[str, int] = {}

    def adapt(self, handle: ModelHandle, events: list[ChangeEvent]) -> EngineOutcome:
        outcome = EngineOutcome()
        findings = detect_failures(handle, self.blueprint, self.thresholds, self._repair_counts)
        for finding in findings:
            apply_finding(handle, self.blueprint, self.thresholds, self._repair_counts, finding, outcome)
        return outcome


class MapeHealer:
    """The monolithic healer's logic split into monitor, analyze, plan,
    and execute stages, with issues and strategies annotated on the
    model between the stages."""

    name = "mape"

    def __init__(self, thresholds: Thresholds, blueprint: Blueprint = BLUEPRINT) -> None:
        self.thresholds = thresholds
        self.blueprint = blueprint
        self._repair_counts: dict[str, int] = {}

    def adapt(self, handle: ModelHandle, events: list[ChangeEvent]) -> EngineOutcome:
        outcome = EngineOutcome()
        # Monitor: fresh scan of the model.
        findings = detect_failures(handle, self.blueprint, self.thresholds, self._repair_counts)
        # Analyze: one issue annotation per finding.
        handle.clear_annotations()
        analyzed: list[tuple[Finding, Issue]] = []
        for f in findings:
            issue = Issue(
                name=f.kind.value,
                utility_drop=f.utility_drop,
                impacts=[f.subject_uid()],
                description=f"detected in {f.tenant.name}",
            )
            handle.annotate(issue)
            analyzed.append((f, issue))
        # Plan: one strategy per issue, priced from the cost table.
        planned: list[tuple[Finding, AdaptationStrategy]] = []
        for f, issue in analyzed:
            strategy = AdaptationStrategy(
                name=STRATEGY_FOR_KIND[f.kind],
                utility_increase=issue.utility_drop,
                costs=STRATEGY_COSTS[STRATEGY_FOR_KIND[f.kind]],
                assigned_issue=issue,
                input_parameters=list(issue.impacts),
            )
            handle.annotate(strategy)
            planned.append((f, strategy))
        # Execute: run the repairs.
        for f, _strategy in planned:
            apply_finding(handle, self.blueprint, self.thresholds, self._repair_counts, f, outcome)
        return outcome


class EventDrivenHealer:
    """Repairs only what the drained change events point at.

    Touches a handful of elements per round instead of scanning all of
    them; applies the same repair rules as the scan-based healers."""

    name = "event-healing"

    def __init__(self, thresholds: Thresholds, blueprint: Blueprint = BLUEPRINT) -> None:
        self.thresholds = thresholds
        self.blueprint = blueprint
        self._repair_counts: dict[str, int] = {}
        self._self_removed: set[str] = set()

    def adapt(self, handle: ModelHandle, events: list[ChangeEvent]) -> EngineOutcome:
        outcome = EngineOutcome()
        removed_in_batch = {
            e.subject_uid for e in events if e.kind is ChangeEventKind.COMPONENT_REMOVED
        }
        handled: set[str] = set()
        for event in events:
            if event.kind is ChangeEventKind.COMPONENT_LIFECYCLE_CHANGED:
                if event.payload.get("new") != ComponentState.UNKNOWN.value:
                    continue
                component = handle.find_by_uid(event.subject_uid)
                if (
                    component is None
                    or component.uid in handled
                    or component.state is not ComponentState.UNKNOWN
                ):
                    continue
                handled.add(component.uid)
                self._repair_broken(handle, component, outcome)
            elif event.kind is ChangeEventKind.EXCEPTION_OCCURRED:
                component_uid = event.payload.get("component", "")
                if component_uid in handled:
                    continue
                component = handle.find_by_uid(component_uid)
                if component is None:
                    continue
                if component.exception_count() > self.thresholds.exception_threshold:
                    handled.add(component.uid)
                    self._repair_broken(handle, component, outcome)
            elif event.kind is ChangeEventKind.COMPONENT_REMOVED:
                if event.subject_uid in self._self_removed:
                    self._self_removed.discard(event.subject_uid)
                    continue
                tenant = handle.find_by_uid(event.payload.get("tenant", ""))
                lost_type = handle.find_by_uid(event.payload.get("type", ""))
                if not isinstance(tenant, Tenant) or not isinstance(lost_type, ComponentType):
                    continue
                role = self.blueprint.role_of_type(lost_type.name)
                if role is None or self.blueprint.find_role_component(tenant, role.role) is not None:
                    continue
                replacement = install_component(handle, self.blueprint, tenant, lost_type)
                outcome.applied("replace", replacement.uid)
            elif event.kind is ChangeEventKind.CONNECTOR_REMOVED:
                payload = event.payload
                if (
                    payload.get("sourceComponent") in removed_in_batch
                    or payload.get("targetComponent") in removed_in_batch
                ):
                    continue  # cascade of a removal; the removal event drives the repair
                required = handle.find_by_uid(payload.get("sourceInterface", ""))
                if not isinstance(required, RequiredInterface) or required.connector is not None:
                    continue
                provided = handle.find_by_uid(payload.get("targetInterface", ""))
                if provided is not None:
                    handle.connect(required, provided)
                    outcome.applied("reconnect", required.uid)
                else:
                    tenant = handle.tenant_of(required.owner)
                    if rebuild_pipe(handle, self.blueprint, tenant):
                        outcome.applied("reconnect", required.uid)
        return outcome

    def _repair_broken(self, handle: ModelHandle, component: Component, outcome: EngineOutcome) -> None:
        counts = self._repair_counts
        if counts.get(component.uid, 0) >= self.thresholds.repeat_threshold - 1:
            new_type = alternative_type(handle, self.blueprint, component)
            tenant = handle.tenant_of(component)
            counts.pop(component.uid, None)
            self._self_removed.add(component.uid)
            handle.remove_component(component)
            replacement = install_component(handle, self.blueprint, tenant, new_type)
            outcome.applied("replace-alternative", replacement.uid)
        elif component.state is ComponentState.UNKNOWN:
            restart_component(handle, component)
            counts[component.uid] = counts.get(component.uid, 0) + 1
            outcome.applied("restart", component.uid)
        elif component.exception_count() > self.thresholds.exception_threshold:
            redeploy_component(handle, component)
            counts[component.uid] = counts.get(component.uid, 0) + 1
            outcome.applied("redeploy", component.uid)


# --------------------------------------------------------------------------
# Optimizer


class EventDrivenOptimizer:
    """Keeps each shop's filter pipe ordered and its response time
    between the thresholds.

    Reordering reroutes connectors only.  When the response time
    overruns the upper threshold, the slowest filters are skipped one by
    one (their stats remembered as working data) until the projection
    fits.  When it underruns the lower threshold, remembered filters are
    re-added fastest first while the projection stays within the upper
    threshold."""

    name = "event-optimizing"

    def __init__(self, thresholds: Thresholds, blueprint: Blueprint = BLUEPRINT) -> None:
        self.thresholds = thresholds
        self.blueprint = blueprint

    def adapt(self, handle: ModelHandle, events: list[ChangeEvent]) -> EngineOutcome:
        outcome = EngineOutcome()
        tenants: list[Tenant] = []
        for event in events:
            tenant = self._tenant_of_event(handle, event)
            if tenant is not None and tenant not in tenants:
                tenants.append(tenant)
        for tenant in tenants:
            self._optimize(handle, tenant, outcome)
        return outcome

    def _tenant_of_event(self, handle: ModelHandle, event: ChangeEvent) -> Tenant | None:
        kind = event.kind
        payload = event.payload
        if kind in (
            ChangeEventKind.MONITORED_PROPERTY_ADDED,
            ChangeEventKind.MONITORED_PROPERTY_UPDATED,
        ):
            owner = handle.find_by_uid(payload.get("owner", ""))
            if isinstance(owner, Tenant):
                return owner
            if isinstance(owner, Component):
                return handle.tenant_of(owner)
        elif kind is ChangeEventKind.PERFORMANCE_STATS_UPDATED:
            component = handle.find_by_uid(payload.get("component", ""))
            if isinstance(component, Component):
                return handle.tenant_of(component)
        elif kind in (ChangeEventKind.COMPONENT_ADDED, ChangeEventKind.COMPONENT_REMOVED):
            tenant = handle.find_by_uid(payload.get("tenant", ""))
            if isinstance(tenant, Tenant):
                return tenant
        elif kind in (
            ChangeEventKind.CONNECTOR_ADDED,
            ChangeEventKind.CONNECTOR_REMOVED,
            ChangeEventKind.CONNECTOR_REROUTED,
        ):
            component = handle.find_by_uid(payload.get("sourceComponent", ""))
            if isinstance(component, Component):
                return handle.tenant_of(component)
        elif kind is ChangeEventKind.COMPONENT_LIFECYCLE_CHANGED:
            component = handle.find_by_uid(event.subject_uid)
            if isinstance(component, Component):
                return handle.tenant_of(component)
        return None

    def _optimize(self, handle: ModelHandle, tenant: Tenant, outcome: EngineOutcome) -> None:
        handle.components(tenant)  # deliberate touch: the walk below reads this tenant
        chain = pipe_filters(tenant, self.blueprint)
        if chain is None:
            outcome.note(f"{tenant.name}: filter pipe broken, nothing to optimize")
            return
        query = self.blueprint.find_role_component(tenant, "query-service")
        items = self.blueprint.find_role_component(tenant, "item-management")
        assert query is not None and items is not None
        # Averages of filters this call re-added: their stats materialize
        # only when the validator runs, but the engine already knows them.
        known: dict[str, float] = {}
        chain = self._reorder(handle, tenant, chain, known, query, items, outcome)
        chain = self._skip_slow_filters(handle, tenant, chain, known, outcome)
        self._readd_filters(handle, tenant, chain, known, query, items, outcome)

    @staticmethod
    def _avg_of(component: Component, known: dict[str, float]) -> float | None:
        avg = filter_average_ms(component)
        return known.get(component.uid) if avg is None else avg

    def _response(self, chain: list[Component], known: dict[str, float]) -> float:
        averages = [a for a in (self._avg_of(f, known) for f in chain) if a is not None]
        return self.thresholds.base_query_time_ms + math.fsum(averages)

    def _reorder(self, handle, tenant, chain, known, query, items, outcome) -> list[Component]:
        def key(pair):
            index, component = pair
            avg = self._avg_of(component, known)
            return (avg is None, avg or 0.0, index)

        desired = [c for _, c in sorted(enumerate(chain), key=key)]
        if desired == chain:
            return chain
        upstream = query.provided(ITEM_FILTER_FQ)
        for f in desired:
            connector = f.required(ITEM_FILTER_FQ).connector
            assert connector is not None  # the chain walk proved the pipe intact
            if connector.target is not upstream:
                handle.reroute(connector, upstream)
            upstream = f.provided(ITEM_FILTER_FQ)
        tail = items.required(ITEM_FILTER_FQ).connector
        assert tail is not None
        if tail.target is not upstream:
            handle.reroute(tail, upstream)
        outcome.applied("reorder-pipe", tenant.uid)
        return desired

    def _skip_slow_filters(self, handle, tenant, chain, known, outcome) -> list[Component]:
        response = self._response(chain, known)
        while response > self.thresholds.response_time_upper_ms:
            candidates = [f for f in chain if self._avg_of(f, known) is not None]
            if not candidates:
                outcome.note(
                    f"{tenant.name}: response target unreachable, no removable filter left"
                )
                break
            slowest = max(candidates, key=lambda f: self._avg_of(f, known))
            stats = slowest.provided(ITEM_FILTER_FQ).stats_for(FILTER_METHOD)
            assert stats is not None
            data = json.dumps(
                {
                    "type": slowest.type.uid,
                    "min": stats.min_time_ms,
                    "max": stats.max_time_ms,
                    "total": stats.total_time_ms,
                    "count": stats.invocation_count,
                },
                sort_keys=True,
            )
            successor = slowest.provided(ITEM_FILTER_FQ).connectors[0]
            predecessor = slowest.required(ITEM_FILTER_FQ).connector
            assert predecessor is not None
            handle.reroute(successor, predecessor.target)
            handle.annotate(
                WorkingData(SKIPPED_FILTER_DATA, data, concerns=[tenant.uid, slowest.type.uid])
            )
            outcome.applied("skip-filters", slowest.uid)
            handle.remove_component(slowest)
            chain = [f for f in chain if f is not slowest]
            response = self._response(chain, known)
        return chain

    def _readd_filters(self, handle, tenant, chain, known, query, items, outcome) -> None:
        response = self._response(chain, known)
        if response >= self.thresholds.response_time_lower_ms:
            return
        remembered = []
        for ann in handle.annotations(WorkingData):
            if ann.name == SKIPPED_FILTER_DATA and tenant.uid in ann.concerns:
                profile = json.loads(ann.value)
                average = profile["total"] / profile["count"]
                remembered.append((average, ann, profile))
        remembered.sort(key=lambda item: (item[0], item[1].uid))
        for average, ann, profile in remembered:
            current = [a for a in (self._avg_of(f, known) for f in chain) if a is not None]
            projected = self.thresholds.base_query_time_ms + math.fsum(current + [average])
            if projected > self.thresholds.response_time_upper_ms:
                # Ascending order: every later candidate is slower still.
                if self._response(chain, known) < self.thresholds.response_time_lower_ms:
                    outcome.note(
                        f"{tenant.name}: pipe stays underutilized, every remembered"
                        " filter would overshoot the upper response bound"
                    )
                break
            component_type = handle.find_by_uid(profile["type"])
            if not isinstance(component_type, ComponentType):
                continue
            component = handle.instantiate(component_type, tenant)
            handle.set_state(component, ComponentState.DEPLOYED)
            handle.set_state(component, ComponentState.STARTED)
            index = len(chain)
            for i, f in enumerate(chain):
                avg = self._avg_of(f, known)
                if avg is None or avg > average:
                    index = i
                    break
            predecessor = (
                chain[index - 1].provided(ITEM_FILTER_FQ)
                if index > 0
                else query.provided(ITEM_FILTER_FQ)
            )
            successor = (
                chain[index].required(ITEM_FILTER_FQ)
                if index < len(chain)
                else items.required(ITEM_FILTER_FQ)
            )
            handle.connect(component.required(ITEM_FILTER_FQ), predecessor)
            assert successor.connector is not None
            handle.reroute(successor.connector, component.provided(ITEM_FILTER_FQ))
            handle.remove_annotation(ann)
            handle.annotate(
                WorkingData(
                    RESTORED_FILTER_DATA,
                    ann.value,
                    concerns=[tenant.uid, component.uid, component_type.uid],
                )
            )
            chain.insert(index, component)
            known[component.uid] = average
            outcome.applied("readd-filters", component.uid)


class NoopEngine:
    """Does nothing; useful to watch issues accumulate."""

    name = "noop"

    def adapt(self, handle: ModelHandle, events: list[ChangeEvent]) -> EngineOutcome:
        return EngineOutcome()


# --------------------------------------------------------------------------
# Registry

ENGINE_NAMES = ("monolithic", "mape", "event-healing", "event-optimizing", "noop")


def build_engine(name: str, thresholds: Thresholds, blueprint: Blueprint = BLUEPRINT):
    if name == "monolithic":
        return MonolithicHealer(thresholds, blueprint)
    if name == "mape":
        return MapeHealer(thresholds, blueprint)
    if name == "event-healing":
        return EventDrivenHealer(thresholds, blueprint)
    if name == "event-optimizing":
        return EventDrivenOptimizer(thresholds, blueprint)
    if name == "noop":
        return NoopEngine()
    raise ValueError(f"unknown engine {name!r}; expected one of {', '.join(ENGINE_NAMES)}")
