"""Literal-assignment text for building instances from fixture files.

::

    @type UnitTest.MyExpressiveType
    @name MyExpressiveType
    MyReadonly=12345; MyValue=6789; MyCollection=[0.123,456.7,890]

Values are numbers, ``"strings"`` (JSON escapes), ``true``/``false``,
``null``, ``[a, b]`` sequences, ``{k: v}`` keyed collections and nested
objects written ``Type.Name{A=1; B=2}``.  Numbers take the declared member
type.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any

from .errors import ExpressiveError, TypeMismatch, UnknownProperty
from .objects import Heap, Instance, instantiate, set_property
from .types import OBJECT, STRING, Registry, TypeExpr, type_expr


class LiteralSyntaxError(ExpressiveError):
    pass


_TOKEN = re.compile(r"""
    \s*(?:
      (?P<str>"(?:[^"\\]|\\.)*")
    | (?P<num>[-+]?(?:\d+\.?\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?|Infinity|NaN))
    | (?P<id>[A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z_][A-Za-z0-9_]*)*)
    | (?P<p>[\[\]{}=;,:])
    )""", re.VERBOSE)


@dataclass
class ObjectLit:
    type_name: str | None
    fields: dict[str, Any] = field(default_factory=dict)


@dataclass
class DataFile:
    type_name: str | None
    name: str | None
    root: Any


def _tokens(text: str) -> list[tuple[str, str]]:
    out, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise LiteralSyntaxError(f"unexpected text at offset {pos}: {text[pos:pos + 20]!r}")
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, tokens):
        self.t = tokens
        self.i = 0

    def peek(self, k: int = 0):
        j = self.i + k
        return self.t[j] if j < len(self.t) else (None, None)

    def take(self, value: str | None = None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            raise LiteralSyntaxError(f"expected {value or 'a value'}, got {tok[1]!r}")
        self.i += 1
        return tok

    def assignments(self, close: str | None) -> dict[str, Any]:
        fields: dict[str, Any] = {}
        while self.peek()[1] != close:
            kind, name = self.take()
            if kind != "id" or "." in name:
                raise LiteralSyntaxError(f"expected a member name, got {name!r}")
            self.take("=")
            fields[name] = self.value()
            if self.peek()[1] in (";", ","):
                self.take()
            elif self.peek()[1] != close:
                raise LiteralSyntaxError(f"expected ';' after {name}")
        return fields

    def value(self) -> Any:
        kind, text = self.take()
        if kind == "str":
            return json.loads(text)
        if kind == "num":
            return ("num", text)
        if kind == "id":
            if text in ("true", "false"):
                return text == "true"
            if text == "null":
                return None
            self.take("{")
            obj = ObjectLit(text, self.assignments("}"))
            self.take("}")
            return obj
        if text == "[":
            items = []
            while self.peek()[1] != "]":
                items.append(self.value())
                if self.peek()[1] == ",":
                    self.take()
            self.take("]")
            return items
        if text == "{":
            pairs = {}
            while self.peek()[1] != "}":
                k = self.value()
                self.take(":")
                pairs[_hashable(k)] = self.value()
                if self.peek()[1] == ",":
                    self.take()
            self.take("}")
            return ("map", pairs)
        raise LiteralSyntaxError(f"unexpected {text!r}")


def _hashable(v: Any) -> Any:
    if isinstance(v, (list, dict, ObjectLit)):
        raise LiteralSyntaxError("keys must be primitive literals")
    return v


def parse_data(text: str) -> DataFile:
    type_name = name = None
    body = []
    for line in text.splitlines():
        s = line.strip()
        if s.startswith("@type"):
            type_name = s[5:].strip()
        elif s.startswith("@name"):
            name = s[5:].strip()
        elif s and not s.startswith("#"):
            body.append(line)
    p = _Parser(_tokens("\n".join(body)))
    if type_name is not None:
        root: Any = ObjectLit(type_name, p.assignments(None))
    else:
        root = p.value()
    if p.peek()[0] is not None:
        raise LiteralSyntaxError(f"trailing input at {p.peek()[1]!r}")
    return DataFile(type_name, name, root)


# ---------------------------------------------------------------------------
# building values
# ---------------------------------------------------------------------------

def build_value(lit: Any, t: TypeExpr | str | None, registry: Registry, heap: Heap) -> Any:
    t = type_expr(t) if t is not None else None
    if isinstance(lit, tuple) and lit[0] == "num":
        return _number(lit[1], t, registry)
    if isinstance(lit, tuple) and lit[0] == "map":
        if t is None or not t.is_map:
            raise TypeMismatch(f"keyed literal where {t} is expected")
        return {build_value(k, t.args[0], registry, heap): build_value(v, t.args[1], registry, heap)
                for k, v in lit[1].items()}
    if isinstance(lit, list):
        if t is None or not t.is_seq:
            raise TypeMismatch(f"sequence literal where {t} is expected")
        return [build_value(x, t.element, registry, heap) for x in lit]
    if isinstance(lit, ObjectLit):
        return build_object(lit, registry, heap)
    if isinstance(lit, str) and t is not None and t.name not in (STRING, OBJECT):
        return registry.parse_literal(t.name, lit)
    return lit


def _number(text: str, t: TypeExpr | None, registry: Registry) -> Any:
    name = t.name if t is not None and t.name != OBJECT else None
    if name is None:
        name = "System.Int32" if re.fullmatch(r"[-+]?\d+", text) else "System.Double"
        if name == "System.Int32" and not -2**31 <= int(text) < 2**31:
            name = "System.Int64"
    try:
        return registry.parse_literal(name, text)
    except (ValueError, ArithmeticError):
        raise TypeMismatch(f"{text} is not a valid {name}") from None


def build_object(lit: ObjectLit, registry: Registry, heap: Heap) -> Instance:
    desc = registry.get(lit.type_name)
    fields = dict(lit.fields)
    args = []
    for c in desc.constructor_params:
        if c.getter in fields:
            args.append(build_value(fields.pop(c.getter), c.value_type, registry, heap))
        else:
            p = desc.prop(c.getter)
            args.append(registry.parse_literal(c.value_type.name, p.default_literal)
                        if p.default_literal is not None else registry.zero_value(c.value_type))
    inst = instantiate(desc, args, heap)
    for name, lit_v in fields.items():
        p = desc.prop(name)
        if p is None:
            raise UnknownProperty(f"{desc.full_name} has no property {name!r}")
        v = build_value(lit_v, p.value_type, registry, heap)
        if p.value_type.is_collection and not p.has_setter:
            coll = inst.slots[name]
            coll.extend(v) if isinstance(coll, list) else coll.update(v)
        else:
            set_property(inst, name, v, heap)
    return inst


def load_data(text: str, registry: Registry, heap: Heap | None = None) -> tuple[Any, str, str | None]:
    """Parse and build a data file; returns ``(value, name, type name)``."""
    heap = heap if heap is not None else Heap(registry)
    data = parse_data(text)
    value = build_value(data.root, data.type_name, registry, heap)
    name = data.name or (data.type_name.rsplit(".", 1)[-1] if data.type_name else "value")
    return value, name, data.type_name


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def _format_value(v: Any, t: TypeExpr | None, registry: Registry, seen: set[int]) -> str:
    if v is None:
        return "null"
    if isinstance(v, Instance):
        if v.identity is not None and id(v) in seen:
            return f"ref#{v.identity}"  # alias or cycle; not re-readable
        seen.add(id(v))
        return f"{v.type_name}{{{_format_members(v, registry, seen)}}}"
    if isinstance(v, list):
        el = t.element if t is not None and t.is_seq else None
        return "[" + ", ".join(_format_value(x, el, registry, seen) for x in v) + "]"
    if isinstance(v, dict):
        kt, vt = t.args if t is not None and t.is_map else (None, None)
        return "{" + ", ".join(f"{_format_value(k, kt, registry, seen)}: "
                               f"{_format_value(x, vt, registry, seen)}"
                               for k, x in v.items()) + "}"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return json.dumps(v)
    if t is not None and t.name != OBJECT and registry.is_primitive(t):
        return registry.format_literal(t.name, v)
    return repr(v)


def _format_members(inst: Instance, registry: Registry, seen: set[int]) -> str:
    return "; ".join(f"{p.name}={_format_value(inst.slots.get(p.name), p.value_type, registry, seen)}"
                     for p in inst.descriptor.public_props)


def format_data(value: Any, name: str, registry: Registry) -> str:
    """Literal-assignment text for ``value``'s public properties."""
    if isinstance(value, Instance):
        seen = {id(value)}
        return (f"@type {value.type_name}\n@name {name}\n"
                f"{_format_members(value, registry, seen)}\n")
    return f"@name {name}\n{_format_value(value, None, registry, set())}\n"
