"""Serialization and reconstruction of object graphs through expressive streams.

Emission order for a non-primitive instance::

    TypeInfo, IntfInfo*, static setters, static getter items,   (type level)
    Value | Refer,
    instance setters, constructor parameters, instance getter items

Type-level items appear once per type per stream and only when the stream
includes statics.  Reconstruction runs: interface check, static setters,
static getters, constructor, setters, init methods, setters again, getter
population.  Heap objects already written to (or read from) the session
appear as a bare ``Refer``.

Streams without names prefix every collection with a ``System.Int32`` count
item so that the reader knows where the elements end.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

from .binding import Delim, decode_binding, encode_binding, split_binding
from .errors import (
    InterfaceSetMismatch,
    MalformedStream,
    NonExpressiveValue,
    StreamExhausted,
    UnknownType,
    UnregisteredType,
)
from .objects import Heap, Instance, construct, run_inits, set_property
from .stream import (
    SIMPLIFIED,
    BufStream,
    IntfInfo,
    Prim,
    Refer,
    StreamConfig,
    TypeInfo,
    Value,
    VString,
)
from .types import (
    OBJECT,
    STRING,
    ExpressivenessKind,
    Registry,
    TypeDescriptor,
    TypeExpr,
    type_expr,
)

log = logging.getLogger(__name__)

COUNT_TYPE = "System.Int32"
ITEM = "Item"  # member name for elements of a collection held as a value


@dataclass
class Session:
    """Reference cache for one serialization or deserialization session."""

    emitted: set[int] = field(default_factory=set)
    refs: dict[int, Instance] = field(default_factory=dict)
    types_written: dict[int, set[str]] = field(default_factory=dict)
    types_read: dict[int, set[str]] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def clear(self) -> None:
        self.emitted.clear()
        self.refs.clear()
        self.types_written.clear()
        self.types_read.clear()
        self.warnings.clear()


def clear_session(session: Session) -> None:
    session.clear()


def infer_type(value: Any) -> TypeExpr:
    if isinstance(value, Instance):
        return TypeExpr(value.descriptor.full_name)
    if isinstance(value, bool):
        return TypeExpr("System.Boolean")
    if isinstance(value, int):
        return TypeExpr("System.Int32" if -2**31 <= value < 2**31 else "System.Int64")
    if isinstance(value, float):
        return TypeExpr("System.Double")
    if isinstance(value, str):
        return TypeExpr(STRING)
    if value is None:
        return TypeExpr(OBJECT)
    raise NonExpressiveValue(f"cannot infer an expressive type for {value!r}")


# ---------------------------------------------------------------------------
# writing
# ---------------------------------------------------------------------------

class _Writer:
    def __init__(self, stream: BufStream, registry: Registry, session: Session,
                 heap: Heap | None):
        self.stream = stream
        self.cfg = stream.config
        self.registry = registry
        self.session = session
        self.heap = heap
        self.seen_types = session.types_written.setdefault(id(stream), set())

    def name(self, owner: str, delim: Delim, member: str) -> str:
        if not self.cfg.include_name:
            return ""
        return f"{owner}{delim.value}{member}"  # root name checked on entry, members on declaration

    def write(self, value: Any, name: str, declared: TypeExpr | None) -> None:
        emit = self.stream.append
        if declared is not None and declared.is_collection and value is not None:
            if self.cfg.include_type or not self.registry.is_sealed(declared):
                emit(TypeInfo(str(declared)))
            emit(Value(name))
            self.write_elements(value, name, ITEM, declared)
            return
        if value is None:
            emit(Refer(name, 0))
            return
        if isinstance(value, Instance):
            self.write_instance(value, name, declared)
            return
        if isinstance(value, (list, dict)):
            raise NonExpressiveValue(f"collection at {name!r} has no declared collection type")
        t = declared if declared is not None and declared.name != OBJECT else infer_type(value)
        if not self.registry.is_primitive(t):
            raise NonExpressiveValue(f"{value!r} at {name!r} is not an instance of {t}")
        if not self.registry.check_value(t, value):
            raise NonExpressiveValue(f"{value!r} at {name!r} does not fit {t}")
        if t.name == STRING:
            if self.cfg.include_type:
                emit(TypeInfo(STRING))
            emit(VString(name, value))
        else:
            emit(Prim(name, t.name, self.registry.format_literal(t.name, value)))

    def write_instance(self, inst: Instance, name: str, declared: TypeExpr | None) -> None:
        desc = inst.descriptor
        if desc.full_name not in self.registry:
            raise UnregisteredType(desc.full_name)
        if desc.expressiveness is ExpressivenessKind.NON_EXPRESSIVE:
            raise NonExpressiveValue(desc.full_name)
        emit = self.stream.append
        if not desc.is_value and inst.identity in self.session.emitted:
            emit(Refer(name, inst.identity))
            return
        if declared is None or self.cfg.include_type or not self.registry.is_sealed(declared):
            emit(TypeInfo(desc.full_name))
        self.write_type_level(desc)
        if desc.is_value:
            emit(Value(name))
        else:
            self.session.emitted.add(inst.identity)
            emit(Refer(name, inst.identity))
        self.write_members(inst, name)

    def write_type_level(self, desc: TypeDescriptor, force: bool = False) -> None:
        if not (self.cfg.include_static or force) or desc.full_name in self.seen_types:
            return
        self.seen_types.add(desc.full_name)
        full, short = desc.full_name, desc.short_name
        for intf in desc.interfaces:
            n = self.name(short, Delim.INTERFACE, intf.rsplit(".", 1)[-1])
            self.stream.append(IntfInfo(n, full, intf))
        if not desc.statics:
            return
        slots = (self.heap.static_slots(desc) if self.heap is not None
                 else {p.name: self.registry.zero_value(p.value_type) for p in desc.statics})
        for p in desc.static_setters:
            self.write(slots[p.name], self.name(full, Delim.SETTER, p.name), p.value_type)
        for p in desc.static_getters:
            self.write_elements(slots[p.name], full, p.name, p.value_type)

    def write_members(self, inst: Instance, name: str) -> None:
        desc = inst.descriptor
        slots = inst.slots
        for p in desc.setters:
            self.write(slots[p.name], self.name(name, Delim.SETTER, p.name), p.value_type)
        for c in desc.constructor_params:
            self.write(slots[c.getter], self.name(name, Delim.CTOR_PARAM, c.getter), c.value_type)
        for p in desc.getters:
            self.write_elements(slots[p.name], name, p.name, p.value_type)

    def write_elements(self, coll: Any, owner: str, member: str, ctype: TypeExpr) -> None:
        if coll is None:
            coll = [] if ctype.is_seq else {}
        if not self.cfg.include_name:
            self.stream.append(Prim("", COUNT_TYPE, str(len(coll))))
        if ctype.is_seq:
            n = self.name(owner, Delim.SEQ_GETTER, member)
            for e in coll:
                self.write(e, n, ctype.element)
        else:
            kn = self.name(owner, Delim.KEYED_KEY, member)
            vn = self.name(owner, Delim.KEYED_VALUE, member)
            for k, v in coll.items():
                self.write(k, kn, ctype.args[0])
                self.write(v, vn, ctype.args[1])


def serialize(stream: BufStream, value: Any, name: str, registry: Registry,
              session: Session | None = None, heap: Heap | None = None,
              value_type: TypeExpr | str | None = None) -> Session:
    """Append the items for ``value`` to ``stream``; returns the session used."""
    session = session if session is not None else Session()
    if stream.include_name:
        if not name:
            raise MalformedStream("streams with name binding need a root name")
        decode_binding(name)  # raises MalformedBindingName
    w = _Writer(stream, registry, session, heap)
    declared = type_expr(value_type) if value_type is not None else None
    if isinstance(value, (list, dict)) and declared is None:
        raise NonExpressiveValue("top-level collections need an explicit value_type")
    w.write(value, name if stream.include_name else "", declared)
    return session


def serialize_static(stream: BufStream, descriptor: TypeDescriptor, registry: Registry,
                     heap: Heap | None = None, session: Session | None = None) -> Session:
    """Write only the type-level portion of ``descriptor``."""
    session = session if session is not None else Session()
    w = _Writer(stream, registry, session, heap)
    stream.append(TypeInfo(descriptor.full_name))
    w.write_type_level(descriptor, force=True)
    return session


# ---------------------------------------------------------------------------
# reading
# ---------------------------------------------------------------------------

@dataclass
class _Record:
    setters: dict[str, Any] = field(default_factory=dict)
    ctor: dict[str, Any] = field(default_factory=dict)
    getters: dict[str, Any] = field(default_factory=dict)


class _Reader:
    def __init__(self, stream: BufStream, registry: Registry, session: Session, heap: Heap):
        self.stream = stream
        self.cfg = stream.config
        self.named = stream.include_name
        self.registry = registry
        self.session = session
        self.heap = heap
        self.pending: str | None = None
        self.types_read = session.types_read.setdefault(id(stream), set())
        self.stream_interfaces: dict[str, set[str]] = {}
        self.static_values: dict[str, dict[str, Any]] = {}

    # -- helpers ------------------------------------------------------------

    def peek(self):
        return self.stream.next_item

    def take(self):
        try:
            return self.stream.next()
        except StreamExhausted:
            raise MalformedStream("stream ended inside an instance record") from None

    def warn(self, msg: str) -> None:
        log.debug(msg)
        self.session.warnings.append(msg)

    def descriptor(self, type_name: str) -> TypeDescriptor:
        try:
            return self.registry.get(type_name)
        except UnknownType:
            raise UnknownType(f"stream type {type_name} is not registered") from None

    def take_type(self) -> str | None:
        if self.pending is not None:
            t, self.pending = self.pending, None
            return t
        item = self.peek()
        if isinstance(item, TypeInfo):
            self.take()
            self.absorb_type_level(item.type_name)
            return item.type_name
        return None

    # -- type level -----------------------------------------------------------

    def absorb_type_level(self, type_name: str) -> None:
        """Consume the IntfInfo/static items that follow a type's first TypeInfo."""
        if type_name.startswith(("seq<", "map<")) or self.registry.is_primitive(type_name):
            return
        if type_name in self.types_read:
            return
        desc = self.registry.types.get(type_name)
        if self.named:
            self.types_read.add(type_name)
            while True:
                item = self.peek()
                if isinstance(item, IntfInfo):
                    self.take()
                    self.note_interface(item)
                    continue
                if desc is None or item is None:
                    break
                if isinstance(item, TypeInfo):
                    # a static string carries its own TypeInfo in complete streams
                    nxt = self.stream.item_at(1)
                    if self.registry.is_primitive(item.type_name) and nxt is not None \
                            and not isinstance(nxt, TypeInfo) and self.read_static_item(desc, nxt):
                        continue
                    break
                if not self.read_static_item(desc, item):
                    break
            return
        if not self.cfg.include_static or desc is None:
            return
        self.types_read.add(type_name)
        while isinstance(self.peek(), IntfInfo):
            self.note_interface(self.take())
        vals = self.static_values.setdefault(type_name, {})
        for p in desc.static_setters:
            vals[p.name] = self.read_value(p.value_type)
        for p in desc.static_getters:
            vals[p.name] = self.read_elements(p.value_type, None, p.name)

    def note_interface(self, item: IntfInfo) -> None:
        self.stream_interfaces.setdefault(item.type_name, set()).add(item.interface_name)

    def read_static_item(self, desc: TypeDescriptor, item) -> bool:
        """Consume one named static item of ``desc`` if ``item`` is one."""
        parts = split_binding(item.name) if item.name else None
        if parts is None or parts[0] != desc.full_name:
            return False
        _, delim, member = parts
        p = desc.static(member)
        if p is None:
            return False
        vals = self.static_values.setdefault(desc.full_name, {})
        if delim is Delim.SETTER and p.is_expressive_setter:
            vals[member] = self.read_value(p.value_type)
        elif delim is Delim.SEQ_GETTER and p.value_type.is_seq:
            vals.setdefault(member, []).append(self.read_value(p.value_type.element))
        elif delim is Delim.KEYED_KEY and p.value_type.is_map:
            self.read_pair(vals.setdefault(member, {}), p.value_type, desc.full_name, member)
        else:
            return False
        return True

    def apply_type_level(self, desc: TypeDescriptor) -> None:
        name = desc.full_name
        heap = self.heap
        if self.cfg.include_static and name not in heap.interfaces_checked:
            seen = self.stream_interfaces.get(name, set())
            if seen != set(desc.interfaces):
                raise InterfaceSetMismatch(
                    f"{name}: stream interfaces {sorted(seen)} != declared {sorted(desc.interfaces)}")
            heap.interfaces_checked.add(name)
        vals = self.static_values.pop(name, None)
        if vals is None or name in heap.static_applied:
            return
        heap.static_applied.add(name)
        slots = heap.static_slots(desc)
        for p in desc.static_setters:
            if p.name in vals:
                slots[p.name] = vals[p.name]
                heap.emit("static", name, p.name)
        for p in desc.static_getters:
            if p.name in vals:
                coll = slots[p.name]
                if p.value_type.is_seq:
                    coll.extend(vals[p.name])
                else:
                    coll.update(vals[p.name])
                heap.emit("static", name, p.name)

    # -- values -------------------------------------------------------------

    def read_value(self, declared: TypeExpr | None) -> Any:
        tname = self.take_type()
        if self.named and tname is None:
            item = self.peek()
            # type-level items may precede a body whose TypeInfo was omitted
            if declared is not None and not declared.is_collection and \
                    declared.name in self.registry.types and declared.name not in self.types_read:
                if isinstance(item, IntfInfo) or (item is not None and item.name.startswith(declared.name)):
                    self.absorb_type_level(declared.name)
        elif not self.named and tname is None and declared is not None \
                and declared.name in self.registry.types and not declared.is_collection:
            item = self.peek()
            if not isinstance(item, Refer) or (item.identity and item.identity not in self.session.refs):
                self.absorb_type_level(declared.name)
        item = self.take()
        if isinstance(item, VString):
            return item.text
        if isinstance(item, Prim):
            return self.parse_prim(item, declared)
        if isinstance(item, Refer):
            if item.identity == 0:
                return None
            known = self.session.refs.get(item.identity)
            if known is not None:
                return known
            return self.read_body(self.body_type(tname, declared, item), item.name, item.identity)
        if isinstance(item, Value):
            t = type_expr(tname) if tname is not None else declared
            if t is not None and t.is_collection:
                return self.read_elements(t, item.name, ITEM)
            return self.read_body(self.body_type(tname, declared, item), item.name, None)
        raise MalformedStream(f"unexpected {item!r} where a value was expected")

    def body_type(self, tname: str | None, declared: TypeExpr | None, item) -> TypeDescriptor:
        name = tname
        if name is None:
            if declared is None or declared.is_collection or declared.name == OBJECT \
                    or declared.name not in self.registry.types:
                raise MalformedStream(f"no type information for {item!r}")
            name = declared.name
        return self.descriptor(name)

    def parse_prim(self, item: Prim, declared: TypeExpr | None) -> Any:
        value = self.registry.parse_literal(item.type_name, item.literal)
        if declared is not None and declared.name not in (OBJECT, item.type_name) \
                and self.registry.is_primitive(declared) \
                and not self.registry.check_value(declared, value):
            # same literal read as the declared type (e.g. widened integers)
            return self.registry.parse_literal(declared.name, item.literal)
        return value

    def read_count(self) -> int:
        item = self.take()
        if not isinstance(item, Prim) or item.type_name != COUNT_TYPE:
            raise MalformedStream(f"expected a collection count, got {item!r}")
        return int(item.literal)

    def read_pair(self, coll: dict, ctype: TypeExpr, owner: str | None, member: str) -> None:
        key = self.read_value(ctype.args[0])
        if self.named:
            item = self.peek() if self.pending is None else None
            want = encode_binding(Delim.KEYED_VALUE, owner, member)
            if item is not None and not isinstance(item, TypeInfo) and item.name != want:
                raise MalformedStream(f"key {key!r} of {owner}@{member} has no value item")
        coll[key] = self.read_value(ctype.args[1])

    def read_elements(self, ctype: TypeExpr, owner: str | None, member: str) -> Any:
        coll: Any = [] if ctype.is_seq else {}
        if not self.named:
            for _ in range(self.read_count()):
                if ctype.is_seq:
                    coll.append(self.read_value(ctype.element))
                else:
                    key = self.read_value(ctype.args[0])  # key item precedes its value
                    coll[key] = self.read_value(ctype.args[1])
            return coll
        delim = Delim.SEQ_GETTER if ctype.is_seq else Delim.KEYED_KEY
        want = encode_binding(delim, owner, member)
        while self.next_named() == want:
            if ctype.is_seq:
                coll.append(self.read_value(ctype.element))
            else:
                self.read_pair(coll, ctype, owner, member)
        return coll

    def next_named(self) -> str | None:
        """Name of the next value item, looking through one TypeInfo."""
        if self.pending is None and isinstance(self.peek(), TypeInfo):
            t = self.take().type_name
            self.absorb_type_level(t)
            self.pending = t
        item = self.peek()
        while isinstance(item, IntfInfo):
            self.note_interface(self.take())
            item = self.peek()
        return None if item is None or isinstance(item, TypeInfo) else item.name

    # -- records --------------------------------------------------------------

    def read_body(self, desc: TypeDescriptor, name: str, stream_id: int | None) -> Instance:
        if desc.expressiveness is not ExpressivenessKind.EXPRESSIVE:
            raise MalformedStream(f"{desc.full_name} is not an expressive object type")
        if (stream_id is None) != desc.is_value:
            raise MalformedStream(f"{desc.full_name}: heap/stack kind disagrees with stream item")
        shell = self.heap.new_shell(desc)
        if stream_id is not None:
            self.session.refs[stream_id] = shell
        rec = self.read_named(desc, name) if self.named else self.read_ordered(desc)
        return self.rebuild(shell, rec)

    def read_ordered(self, desc: TypeDescriptor) -> _Record:
        rec = _Record()
        for p in desc.setters:
            rec.setters[p.name] = self.read_value(p.value_type)
        for c in desc.constructor_params:
            rec.ctor[c.getter] = self.read_value(c.value_type)
        for p in desc.getters:
            rec.getters[p.name] = self.read_elements(p.value_type, None, p.name)
        return rec

    def read_named(self, desc: TypeDescriptor, name: str) -> _Record:
        rec = _Record()
        ctor_getters = set(desc.ctor_getters)
        setters = {p.name: p for p in desc.setters}
        getters = {p.name: p for p in desc.getters}
        while True:
            item_name = self.next_named()
            if not item_name:
                break
            item = self.peek()
            if self.pending is None and item_name.startswith(desc.full_name) \
                    and self.read_static_item(desc, item):
                continue
            parts = _member_of(item_name, name)
            if parts is None:
                break
            delim, member = parts
            if delim is Delim.SETTER and member in setters:
                rec.setters[member] = self.read_value(setters[member].value_type)
            elif delim is Delim.CTOR_PARAM and member in ctor_getters:
                rec.ctor[member] = self.read_value(desc.prop(member).value_type)
            elif delim is Delim.SEQ_GETTER and member in getters and getters[member].value_type.is_seq:
                p = getters[member]
                rec.getters.setdefault(member, []).append(self.read_value(p.value_type.element))
            elif delim is Delim.KEYED_KEY and member in getters and getters[member].value_type.is_map:
                self.read_pair(rec.getters.setdefault(member, {}), getters[member].value_type,
                               name, member)
            else:
                self.warn(f"{desc.full_name}: ignoring unmatched stream member {item_name}")
                self.read_value(None)
        return rec

    def rebuild(self, shell: Instance, rec: _Record) -> Instance:
        desc = shell.descriptor
        heap = self.heap
        self.apply_type_level(desc)
        args = []
        for c in desc.constructor_params:
            if c.getter in rec.ctor:
                args.append(rec.ctor[c.getter])
            else:
                p = desc.prop(c.getter)
                if p.default_literal is not None:
                    args.append(self.registry.parse_literal(c.value_type.name, p.default_literal))
                else:
                    self.warn(f"{desc.full_name}: constructor parameter {c.getter} missing; using zero")
                    args.append(self.registry.zero_value(c.value_type))
        construct(shell, args, heap)
        for key, value in rec.setters.items():
            set_property(shell, key, value, heap)
        run_inits(shell, heap)
        for key, value in rec.setters.items():
            set_property(shell, key, value, heap, check=False)  # checked above
        for key, elements in rec.getters.items():
            coll = shell.slots[key]
            if isinstance(coll, list):
                coll.extend(elements)
            else:
                coll.update(elements)
            heap.emit("populate", desc.full_name, key)
        return shell


def _member_of(item_name: str, owner: str) -> tuple[Delim, str] | None:
    """``(delim, member)`` when ``item_name`` is a direct member of ``owner``."""
    n = len(owner)
    if item_name.startswith(owner) and len(item_name) > n + 1:
        delim = _DELIMS.get(item_name[n])
        member = item_name[n + 1:]
        if delim is not None and member.isidentifier() and member.isascii():
            return delim, member
    parts = split_binding(item_name)  # slow path, also validates
    if parts is None or parts[0] != owner:
        return None
    return parts[1], parts[2]


_DELIMS = {d.value: d for d in Delim if d is not Delim.ROOT}


def deserialize(stream: BufStream, registry: Registry, session: Session | None = None,
                heap: Heap | None = None, descriptor: TypeDescriptor | None = None,
                value_type: TypeExpr | str | None = None,
                synthesize: bool = False) -> tuple[Any, TypeDescriptor | None, str]:
    """Read one value from ``stream``.

    Returns ``(value, descriptor, name)``; the descriptor is ``None`` for
    primitives and collections.  ``descriptor`` (or ``value_type``) supplies
    the top-level type for streams that omit it.  With ``synthesize`` any
    unregistered stream type is first generated from the stream itself.
    """
    session = session if session is not None else Session()
    heap = heap if heap is not None else Heap(registry)
    if synthesize:
        from .typesynth import synthesize_types

        synthesize_types(stream.items(), registry, include_name=stream.include_name)
    r = _Reader(stream, registry, session, heap)
    declared = None
    if descriptor is not None:
        declared = TypeExpr(descriptor.full_name)
    elif value_type is not None:
        declared = type_expr(value_type)
    head = stream.next_name or ""
    if not head and stream.include_name:
        items = stream.items()
        head = next((i.name for i in items if not isinstance(i, (TypeInfo, IntfInfo))), "")
    value = r.read_value(declared)
    desc = value.descriptor if isinstance(value, Instance) else None
    return value, desc, head


def deserialize_static(stream: BufStream, descriptor: TypeDescriptor, registry: Registry,
                       heap: Heap, session: Session | None = None) -> None:
    """Apply the type-level portion of ``descriptor`` read from ``stream``."""
    session = session if session is not None else Session()
    r = _Reader(stream, registry, session, heap)
    item = stream.next_item
    if isinstance(item, TypeInfo):
        if item.type_name != descriptor.full_name:
            raise MalformedStream(f"expected statics of {descriptor.full_name}, got {item.type_name}")
        stream.next()
    r.types_read.discard(descriptor.full_name)
    if r.named:
        r.absorb_type_level(descriptor.full_name)
    else:
        r.types_read.add(descriptor.full_name)
        while isinstance(stream.next_item, IntfInfo):
            r.note_interface(stream.next())
        vals = r.static_values.setdefault(descriptor.full_name, {})
        for p in descriptor.static_setters:
            vals[p.name] = r.read_value(p.value_type)
        for p in descriptor.static_getters:
            vals[p.name] = r.read_elements(p.value_type, None, p.name)
    r.static_values.setdefault(descriptor.full_name, {})
    r.apply_type_level(descriptor)


def clone(value: Any, registry: Registry, heap: Heap | None = None,
          value_type: TypeExpr | str | None = None,
          config: StreamConfig = SIMPLIFIED) -> Any:
    """Copy ``value`` by writing it to a simplified stream and reading it back."""
    stream = BufStream(config)
    name = "clone" if config.include_name else ""
    serialize(stream, value, name, registry, Session(), heap, value_type=value_type)
    out, _, _ = deserialize(stream, registry, Session(), heap or Heap(registry),
                            value_type=value_type)
    return out
