"""Generating type descriptors from the items of a named stream.

Every member item of an instance names its owner and its role through the
binding delimiter: ``$`` constructor parameter, ``.`` setter, ``*`` sequence
getter, ``@``/``&`` keyed getter.  Member types come from the item itself
(``Prim``/``VString``) or from the ``TypeInfo`` in front of it.  Members that
are only ever null fall back to ``System.Object``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .binding import Delim, split_binding
from .errors import ConflictingMemberType, InsufficientBinding, ShadowingRegisteredType
from .stream import IntfInfo, Prim, Refer, TypeInfo, Value, VString
from .types import (
    OBJECT,
    STRING,
    MemberDecl,
    Registry,
    TypeDeclaration,
    TypeDescriptor,
    TypeExpr,
    build_descriptor,
    with_provisional,
)

_KIND = {Delim.CTOR_PARAM: "ctor", Delim.SETTER: "setter", Delim.SEQ_GETTER: "seq",
         Delim.KEYED_KEY: "map", Delim.KEYED_VALUE: "map"}


@dataclass
class _Member:
    kind: str
    type: TypeExpr | None = None  # value type, or element type for seq
    key: TypeExpr | None = None
    value: TypeExpr | None = None


@dataclass
class _TypeInfo:
    name: str
    is_value: bool = False
    interfaces: list[str] = field(default_factory=list)
    members: dict[str, _Member] = field(default_factory=dict)
    statics: dict[str, _Member] = field(default_factory=dict)


def _merge(owner: str, member: str, a: TypeExpr | None, b: TypeExpr | None) -> TypeExpr | None:
    if a is None:
        return b
    if b is None or a == b:
        return a
    if a.name == b.name and len(a.args) == len(b.args):
        return TypeExpr(a.name, tuple(_merge(owner, member, x, y) or x
                                      for x, y in zip(a.args, b.args)))
    raise ConflictingMemberType(f"{owner}.{member} seen as {a} and as {b}")


class _Scan:
    def __init__(self, registry: Registry):
        self.registry = registry
        self.types: dict[str, _TypeInfo] = {}
        self.owners: dict[str, str] = {}  # instance name -> type name
        self.ids: dict[int, str] = {}

    def wanted(self, t: str) -> bool:
        te = TypeExpr.parse(t)
        return not te.is_collection and not self.registry.is_known(t) \
            or (t in self.registry.types and self.registry.types[t].provisional)

    def info(self, t: str) -> _TypeInfo:
        return self.types.setdefault(t, _TypeInfo(t))

    def run(self, items: Iterable) -> None:
        pending: str | None = None
        for item in items:
            if isinstance(item, TypeInfo):
                pending = item.type_name
                if self.wanted(pending) and not self.registry.is_primitive(pending):
                    self.info(pending)
                continue
            if isinstance(item, IntfInfo):
                if self.wanted(item.type_name):
                    ifs = self.info(item.type_name).interfaces
                    if item.interface_name not in ifs:
                        ifs.append(item.interface_name)
                continue
            vtype = self.item_type(item, pending)
            if isinstance(item, (Refer, Value)) and vtype is not None and not vtype.is_collection \
                    and vtype.name not in (STRING, OBJECT) and not self.registry.is_primitive(vtype):
                if item.name:
                    self.owners[item.name] = vtype.name
                if self.wanted(vtype.name):
                    self.info(vtype.name).is_value = isinstance(item, Value)
            pending = None
            self.attribute(item.name, vtype)

    def item_type(self, item, pending: str | None) -> TypeExpr | None:
        if isinstance(item, Prim):
            return TypeExpr(item.type_name)
        if isinstance(item, VString):
            return TypeExpr(STRING)
        if isinstance(item, Refer):
            if item.identity == 0:
                return None
            if pending is not None:
                self.ids[item.identity] = pending
                return TypeExpr.parse(pending)
            t = self.ids.get(item.identity)
            return TypeExpr.parse(t) if t else None
        if pending is None:
            return None
        return TypeExpr.parse(pending)

    def attribute(self, name: str, vtype: TypeExpr | None) -> None:
        if not name:
            return
        parts = split_binding(name)
        if parts is None:
            return
        owner, delim, member = parts
        if owner in self.owners:
            t, static = self.owners[owner], False
        elif owner in self.types:
            t, static = owner, True
        else:
            return
        if not self.wanted(t):
            return
        info = self.info(t)
        table = info.statics if static else info.members
        kind = _KIND.get(delim)
        if kind is None:
            return
        m = table.setdefault(member, _Member(kind))
        if m.kind != kind:
            raise ConflictingMemberType(f"{t}.{member} bound both as {m.kind} and {kind}")
        if kind == "map":
            if delim is Delim.KEYED_KEY:
                m.key = _merge(t, member, m.key, vtype)
            else:
                m.value = _merge(t, member, m.value, vtype)
        else:
            m.type = _merge(t, member, m.type, vtype)


def _member_type(m: _Member) -> TypeExpr:
    obj = TypeExpr(OBJECT)
    if m.kind == "seq":
        return TypeExpr("seq", (m.type or obj,))
    if m.kind == "map":
        return TypeExpr("map", (m.key or obj, m.value or obj))
    return m.type or obj


def _declaration(info: _TypeInfo) -> TypeDeclaration:
    decl = TypeDeclaration(full_name=info.name, interfaces=list(info.interfaces),
                           is_value=info.is_value)
    for static, table in ((True, info.statics), (False, info.members)):
        for name, m in table.items():
            t = _member_type(m)
            kind = "setter" if m.kind == "setter" else "getter"
            if m.kind == "ctor" and not static:
                decl.ctor.append((name[0].lower() + name[1:], t))
            decl.members.append(MemberDecl(kind, name, t, is_static=static))
    return decl


def synthesize_types(items: Iterable, registry: Registry, include_name: bool = True,
                     register: bool = True) -> list[TypeDescriptor]:
    """Descriptors for every unregistered object type in ``items``.

    Types that are already registered are left alone.  Synthesized types are
    marked provisional.
    """
    items = list(items)
    scan = _Scan(registry)
    unknown = [i.type_name for i in items if isinstance(i, TypeInfo) and scan.wanted(i.type_name)
               and not registry.is_primitive(i.type_name)]
    if not unknown:
        return []
    if not include_name:
        raise InsufficientBinding(f"cannot synthesize {unknown[0]} from a stream without names")
    scan.run(items)
    descs = []
    for info in scan.types.values():
        registry.interfaces.update(info.interfaces)
    for info in scan.types.values():
        desc = with_provisional(build_descriptor(_declaration(info), None))
        descs.append(desc)
    if register:
        for d in descs:
            registry.types[d.full_name] = d
        registry.forget()
    return descs


def synthesize_descriptor(items: Iterable, type_name: str, registry: Registry,
                          register: bool = True) -> TypeDescriptor:
    """Synthesize one named type; refuses to shadow a registered type."""
    existing = registry.types.get(type_name)
    if existing is not None and not existing.provisional:
        raise ShadowingRegisteredType(f"{type_name} is already registered")
    items = list(items)
    if not any(isinstance(i, TypeInfo) and i.type_name == type_name for i in items):
        raise InsufficientBinding(f"stream has no instance of {type_name}")
    if existing is not None:
        del registry.types[type_name]
    descs = synthesize_types(items, registry, register=register)
    for d in descs:
        if d.full_name == type_name:
            return d
    raise InsufficientBinding(f"stream has no instance record for {type_name}")
