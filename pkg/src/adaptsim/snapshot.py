"""Canonical text serialization of an architecture model.

The format is line oriented: one element per line, nested elements
indented below their owner, sections in a fixed order.  The writer is
canonical (model order, repr floats, fixed quoting), so serializing the
same model always yields the same bytes, and parse followed by serialize
reproduces a canonical file byte for byte.

The parser restores element identity: uids, the logical clock, and the
uid counter survive a round trip, so a reloaded model continues exactly
where the saved one stopped.  Pending change events are not part of a
snapshot; a snapshot captures state, not history.
"""

from __future__ import annotations

from pathlib import Path

from .model import (
    AdaptationStrategy,
    Architecture,
    Component,
    ComponentState,
    ComponentType,
    Connector,
    InterfaceType,
    Issue,
    MethodSpecification,
    MonitoredProperty,
    ObservedException,
    Parameter,
    ParameterType,
    PerformanceStats,
    ProvidedInterface,
    RequiredInterface,
    Tenant,
    WorkingData,
)

FORMAT_TAG = "adaptsim-model"
FORMAT_VERSION = 1


class SnapshotError(Exception):
    """The snapshot text does not describe a well-formed model."""


# --------------------------------------------------------------------------
# Lexical helpers

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}
_UNESCAPES = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t"}


def _quote(s: str) -> str:
    out = []
    for ch in s:
        out.append(_ESCAPES.get(ch, ch))
    return '"' + "".join(out) + '"'


def _tokenize(line: str, lineno: int) -> list[str | tuple[str]]:
    """Split a line into bare tokens (str) and quoted strings (1-tuples)."""
    tokens: list[str | tuple[str]] = []
    i, n = 0, len(line)
    while i < n:
        ch = line[i]
        if ch == " ":
            i += 1
            continue
        if ch == '"':
            i += 1
            buf = []
            while True:
                if i >= n:
                    raise SnapshotError(f"line {lineno}: unterminated string")
                c = line[i]
                if c == "\\":
                    if i + 1 >= n or line[i + 1] not in _UNESCAPES:
                        raise SnapshotError(f"line {lineno}: bad escape")
                    buf.append(_UNESCAPES[line[i + 1]])
                    i += 2
                elif c == '"':
                    i += 1
                    break
                else:
                    buf.append(c)
                    i += 1
            tokens.append(("".join(buf),))
        else:
            j = i
            while j < n and line[j] not in ' "':
                j += 1
            tokens.append(line[i:j])
            i = j
    return tokens


def _fmt(value: float | int) -> str:
    return repr(float(value)) if isinstance(value, float) else str(value)


# --------------------------------------------------------------------------
# Writer


def serialize_architecture(arch: Architecture) -> str:
    lines: list[str] = []

    def put(depth: int, *tokens: str) -> None:
        lines.append("  " * depth + " ".join(tokens))

    put(0, FORMAT_TAG, str(FORMAT_VERSION))
    put(0, "architecture", _quote(arch.name), "clock", str(arch.clock), "uids", str(arch._uid_counter))
    put(0, "[interface-types]")
    for it in arch.interface_types:
        put(0, "interface-type", it.uid, _quote(it.fq_name))
        for m in it.methods:
            put(1, "method", m.uid, _quote(m.signature))
    put(0, "[component-types]")
    for ct in arch.component_types:
        put(
            0,
            "component-type",
            ct.uid,
            _quote(ct.name),
            "reliability",
            _fmt(ct.reliability),
            "criticality",
            _fmt(ct.criticality),
        )
        for pt in ct.parameter_types:
            put(1, "parameter-type", pt.uid, _quote(pt.name), pt.data_type, _quote(pt.default_value))
        if ct.required_interface_types:
            put(1, "requires", *(it.uid for it in ct.required_interface_types))
        if ct.provided_interface_types:
            put(1, "provides", *(it.uid for it in ct.provided_interface_types))
    put(0, "[tenants]")
    for tenant in arch.tenants:
        put(0, "tenant", tenant.uid, _quote(tenant.name))
        for mp in tenant.monitored_properties:
            _put_property(put, 1, mp)
        for comp in tenant.components:
            put(
                1,
                "component",
                comp.uid,
                comp.type.uid,
                comp.state.value,
                "criticality",
                _fmt(comp.criticality),
            )
            for par in comp.parameters:
                put(2, "parameter", par.uid, par.type.uid, _quote(par.value))
            for r in comp.required_interfaces:
                put(2, "required", r.uid, r.type.uid)
            for p in comp.provided_interfaces:
                put(2, "provided", p.uid, p.type.uid)
                for ex in p.exceptions:
                    put(
                        3,
                        "exception",
                        ex.uid,
                        ex.method.uid,
                        _quote(ex.exception_type),
                        _quote(ex.message),
                        _quote(ex.stack_trace),
                    )
                for st in p.performance_stats:
                    put(
                        3,
                        "perf",
                        st.uid,
                        st.method.uid,
                        _fmt(st.min_time_ms),
                        _fmt(st.max_time_ms),
                        _fmt(st.total_time_ms),
                        str(st.invocation_count),
                    )
            for mp in comp.monitored_properties:
                _put_property(put, 2, mp)
        for conn in tenant.connectors:
            put(1, "connector", conn.uid, conn.source.uid, conn.target.uid)
    put(0, "[annotations]")
    for ann in arch.annotations:
        if isinstance(ann, WorkingData):
            put(0, "working-data", ann.uid, _quote(ann.name), _quote(ann.value), "concerns", *ann.concerns)
        elif isinstance(ann, Issue):
            put(
                0,
                "issue",
                ann.uid,
                _quote(ann.name),
                _fmt(ann.utility_drop),
                _quote(ann.description),
                "impacts",
                *ann.impacts,
            )
        elif isinstance(ann, AdaptationStrategy):
            assert ann.assigned_issue is not None
            put(
                0,
                "strategy",
                ann.uid,
                _quote(ann.name),
                _fmt(ann.utility_increase),
                _fmt(ann.costs),
                ann.assigned_issue.uid,
                "inputs",
                *ann.input_parameters,
            )
    return "\n".join(lines) + "\n"


def _put_property(put, depth: int, mp: MonitoredProperty) -> None:
    put(
        depth,
        "property",
        mp.uid,
        _quote(mp.name),
        mp.data_type,
        _quote(mp.unit),
        _quote(mp.value),
        _quote(mp.description),
    )


# --------------------------------------------------------------------------
# Parser


class _Reader:
    """Cursor over tokenized lines with typed accessors."""

    def __init__(self, tokens: list[str | tuple[str]], lineno: int) -> None:
        self.tokens = tokens
        self.lineno = lineno
        self.pos = 0

    def error(self, why: str) -> SnapshotError:
        return SnapshotError(f"line {self.lineno}: {why}")

    @property
    def exhausted(self) -> bool:
        return self.pos >= len(self.tokens)

    def bare(self, what: str) -> str:
        if self.exhausted or not isinstance(self.tokens[self.pos], str):
            raise self.error(f"expected {what}")
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok  # type: ignore[return-value]

    def string(self, what: str) -> str:
        if self.exhausted or not isinstance(self.tokens[self.pos], tuple):
            raise self.error(f"expected quoted {what}")
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok[0]  # type: ignore[index]

    def keyword(self, kw: str) -> None:
        got = self.bare(f"keyword {kw!r}")
        if got != kw:
            raise self.error(f"expected keyword {kw!r}, got {got!r}")

    def number(self, what: str) -> float:
        tok = self.bare(what)
        try:
            return float(tok)
        except ValueError:
            raise self.error(f"{what} must be a number, got {tok!r}") from None

    def integer(self, what: str) -> int:
        tok = self.bare(what)
        try:
            return int(tok)
        except ValueError:
            raise self.error(f"{what} must be an integer, got {tok!r}") from None

    def rest_bare(self) -> list[str]:
        out = []
        while not self.exhausted:
            out.append(self.bare("uid"))
        return out

    def done(self) -> None:
        if not self.exhausted:
            raise self.error("trailing tokens")


def parse_architecture(text: str) -> Architecture:
    readers: list[_Reader] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        readers.append(_Reader(_tokenize(line, lineno), lineno))
    if not readers:
        raise SnapshotError("empty snapshot")

    it = iter(readers)

    def next_reader() -> _Reader | None:
        return next(it, None)

    r = next_reader()
    assert r is not None
    tag = r.bare("format tag")
    if tag != FORMAT_TAG:
        raise r.error(f"not a model snapshot (tag {tag!r})")
    version = r.integer("format version")
    if version != FORMAT_VERSION:
        raise r.error(f"unsupported format version {version}")
    r.done()

    r = next_reader()
    if r is None:
        raise SnapshotError("missing architecture header")
    r.keyword("architecture")
    arch = Architecture(r.string("architecture name"))
    r.keyword("clock")
    clock = r.integer("clock")
    r.keyword("uids")
    uid_counter = r.integer("uid counter")
    r.done()

    elements: dict[str, object] = {}

    def register(obj, uid: str, reader: _Reader) -> None:
        if uid in elements:
            raise reader.error(f"duplicate uid {uid!r}")
        elements[uid] = obj
        arch._register(obj, uid)

    def lookup(uid: str, cls, reader: _Reader):
        obj = elements.get(uid)
        if not isinstance(obj, cls):
            raise reader.error(f"uid {uid!r} does not name a {cls.__name__}")
        return obj

    section = None
    tenant: Tenant | None = None
    component: Component | None = None
    provided: ProvidedInterface | None = None
    interface_type: InterfaceType | None = None
    component_type: ComponentType | None = None
    # Mutable staging for frozen type objects.
    ct_parts: dict[str, list] = {}

    def flush_component_type() -> None:
        nonlocal component_type
        if component_type is None:
            return
        ct = ComponentType(
            component_type.uid,
            component_type.name,
            component_type.reliability,
            component_type.criticality,
            tuple(ct_parts["params"]),
            tuple(ct_parts["requires"]),
            tuple(ct_parts["provides"]),
        )
        elements[ct.uid] = ct
        arch._registry[ct.uid] = ct
        arch.component_types.append(ct)
        component_type = None

    def flush_interface_type() -> None:
        nonlocal interface_type
        if interface_type is None:
            return
        it_obj = InterfaceType(interface_type.uid, interface_type.fq_name, tuple(ct_parts["methods"]))
        elements[it_obj.uid] = it_obj
        arch._registry[it_obj.uid] = it_obj
        arch.interface_types.append(it_obj)
        interface_type = None

    while True:
        r = next_reader()
        if r is None:
            break
        head = r.bare("directive")
        if head.startswith("["):
            flush_interface_type()
            flush_component_type()
            if head not in ("[interface-types]", "[component-types]", "[tenants]", "[annotations]"):
                raise r.error(f"unknown section {head!r}")
            section = head
            tenant = component = provided = None
            r.done()
            continue

        if head == "interface-type":
            if section != "[interface-types]":
                raise r.error("interface-type outside its section")
            flush_interface_type()
            uid = r.bare("uid")
            fq_name = r.string("fq name")
            r.done()
            if uid in elements:
                raise r.error(f"duplicate uid {uid!r}")
            interface_type = InterfaceType(uid, fq_name, ())
            elements[uid] = interface_type
            ct_parts["methods"] = []
        elif head == "method":
            if interface_type is None:
                raise r.error("method outside an interface-type")
            uid = r.bare("uid")
            sig = r.string("signature")
            r.done()
            m = MethodSpecification(uid, sig)
            register(m, uid, r)
            ct_parts["methods"].append(m)
        elif head == "component-type":
            if section != "[component-types]":
                raise r.error("component-type outside its section")
            flush_component_type()
            uid = r.bare("uid")
            name = r.string("name")
            r.keyword("reliability")
            reliability = r.number("reliability")
            r.keyword("criticality")
            criticality = r.number("criticality")
            r.done()
            if uid in elements:
                raise r.error(f"duplicate uid {uid!r}")
            component_type = ComponentType(uid, name, reliability, criticality, (), (), ())
            elements[uid] = component_type
            ct_parts["params"] = []
            ct_parts["requires"] = []
            ct_parts["provides"] = []
        elif head == "parameter-type":
            if component_type is None:
                raise r.error("parameter-type outside a component-type")
            uid = r.bare("uid")
            name = r.string("name")
            data_type = r.bare("data type")
            default = r.string("default value")
            r.done()
            pt = ParameterType(uid, name, data_type, default)
            register(pt, uid, r)
            ct_parts["params"].append(pt)
        elif head in ("requires", "provides"):
            if component_type is None:
                raise r.error(f"{head} outside a component-type")
            uids = r.rest_bare()
            ct_parts[head].extend(lookup(u, InterfaceType, r) for u in uids)
        elif head == "tenant":
            if section != "[tenants]":
                raise r.error("tenant outside its section")
            uid = r.bare("uid")
            name = r.string("name")
            r.done()
            tenant = Tenant(uid, name)
            register(tenant, uid, r)
            arch.tenants.append(tenant)
            component = provided = None
        elif head == "component":
            if tenant is None:
                raise r.error("component outside a tenant")
            uid = r.bare("uid")
            ct = lookup(r.bare("type uid"), ComponentType, r)
            state_tok = r.bare("state")
            try:
                state = ComponentState(state_tok)
            except ValueError:
                raise r.error(f"unknown state {state_tok!r}") from None
            r.keyword("criticality")
            criticality = r.number("criticality")
            r.done()
            component = Component(uid, ct, tenant, state, criticality)
            register(component, uid, r)
            tenant.components.append(component)
            provided = None
        elif head == "parameter":
            if component is None:
                raise r.error("parameter outside a component")
            uid = r.bare("uid")
            pt = lookup(r.bare("parameter type uid"), ParameterType, r)
            value = r.string("value")
            r.done()
            par = Parameter(uid, pt, value)
            register(par, uid, r)
            component.parameters.append(par)
        elif head == "required":
            if component is None:
                raise r.error("required outside a component")
            uid = r.bare("uid")
            itype = lookup(r.bare("interface type uid"), InterfaceType, r)
            r.done()
            ri = RequiredInterface(uid, itype, component)
            register(ri, uid, r)
            component.required_interfaces.append(ri)
        elif head == "provided":
            if component is None:
                raise r.error("provided outside a component")
            uid = r.bare("uid")
            itype = lookup(r.bare("interface type uid"), InterfaceType, r)
            r.done()
            provided = ProvidedInterface(uid, itype, component)
            register(provided, uid, r)
            component.provided_interfaces.append(provided)
        elif head == "exception":
            if provided is None:
                raise r.error("exception outside a provided interface")
            uid = r.bare("uid")
            method = lookup(r.bare("method uid"), MethodSpecification, r)
            ex_type = r.string("exception type")
            message = r.string("message")
            trace = r.string("stack trace")
            r.done()
            ex = ObservedException(uid, provided, method, ex_type, message, trace)
            register(ex, uid, r)
            provided.exceptions.append(ex)
        elif head == "perf":
            if provided is None:
                raise r.error("perf outside a provided interface")
            uid = r.bare("uid")
            method = lookup(r.bare("method uid"), MethodSpecification, r)
            min_ms = r.number("min")
            max_ms = r.number("max")
            total_ms = r.number("total")
            count = r.integer("invocation count")
            r.done()
            st = PerformanceStats(uid, provided, method, min_ms, max_ms, total_ms, count)
            register(st, uid, r)
            provided.performance_stats.append(st)
        elif head == "property":
            if tenant is None:
                raise r.error("property outside a tenant")
            uid = r.bare("uid")
            name = r.string("name")
            data_type = r.bare("data type")
            unit = r.string("unit")
            value = r.string("value")
            description = r.string("description")
            r.done()
            owner: Tenant | Component = component if component is not None else tenant
            mp = MonitoredProperty(uid, name, data_type, unit, value, description, owner.uid)
            register(mp, uid, r)
            owner.monitored_properties.append(mp)
        elif head == "connector":
            if tenant is None:
                raise r.error("connector outside a tenant")
            component = provided = None
            uid = r.bare("uid")
            source = lookup(r.bare("source uid"), RequiredInterface, r)
            target = lookup(r.bare("target uid"), ProvidedInterface, r)
            r.done()
            conn = Connector(uid, source, target)
            register(conn, uid, r)
            if source.connector is not None:
                raise r.error(f"required interface {source.uid} connected twice")
            source.connector = conn
            target.connectors.append(conn)
            tenant.connectors.append(conn)
        elif head == "working-data":
            if section != "[annotations]":
                raise r.error("working-data outside the annotations section")
            uid = r.bare("uid")
            name = r.string("name")
            value = r.string("value")
            r.keyword("concerns")
            concerns = r.rest_bare()
            wd = WorkingData(name, value, concerns, uid=uid)
            register(wd, uid, r)
            arch.annotations.append(wd)
        elif head == "issue":
            if section != "[annotations]":
                raise r.error("issue outside the annotations section")
            uid = r.bare("uid")
            name = r.string("name")
            drop = r.number("utility drop")
            description = r.string("description")
            r.keyword("impacts")
            impacts = r.rest_bare()
            issue = Issue(name, drop, impacts, description, uid=uid)
            register(issue, uid, r)
            arch.annotations.append(issue)
        elif head == "strategy":
            if section != "[annotations]":
                raise r.error("strategy outside the annotations section")
            uid = r.bare("uid")
            name = r.string("name")
            increase = r.number("utility increase")
            costs = r.number("costs")
            issue_obj = lookup(r.bare("issue uid"), Issue, r)
            r.keyword("inputs")
            inputs = r.rest_bare()
            strat = AdaptationStrategy(name, increase, costs, issue_obj, inputs, uid=uid)
            register(strat, uid, r)
            arch.annotations.append(strat)
        else:
            raise r.error(f"unknown directive {head!r}")

    flush_interface_type()
    flush_component_type()

    arch._clock = clock
    arch._uid_counter = uid_counter
    return arch


def write_snapshot(arch: Architecture, path: str | Path) -> None:
    Path(path).write_text(serialize_architecture(arch), encoding="utf-8")


def read_snapshot(path: str | Path) -> Architecture:
    return parse_architecture(Path(path).read_text(encoding="utf-8"))
