"""Type descriptors, primitive classification and the parameter naming convention.

A :class:`TypeDescriptor` records everything needed to take an instance apart
and put it back together: which public members reveal its state, which
constructor rebuilds it and which initiation methods must run afterwards.
Descriptors are built from declarations (see :mod:`expressive.schema`) and are
immutable once registered.
"""

from __future__ import annotations

import datetime as _dt
import decimal
import enum
import functools
import math
import re
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Iterable, Mapping

from .errors import (
    AmbiguousMatch,
    DeclarationError,
    DuplicateInitSequence,
    NoUsableConstructor,
    TypeMismatch,
    UnknownType,
    UnmatchedConstructorParam,
)

STRING = "System.String"
OBJECT = "System.Object"
_Instance = None  # objects.Instance, bound on first use

IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
TYPE_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z_][A-Za-z0-9_]*)*")


class ExpressivenessKind(enum.Enum):
    PRIMITIVE_STRING = "PrimitiveString"
    PRIMITIVE_VALUE = "PrimitiveValue"
    VALUE_WITH_PARSE = "ValueWithParse"
    EXPRESSIVE = "Expressive"
    NON_EXPRESSIVE = "NonExpressive"

    @property
    def primitive(self) -> bool:
        return self in (ExpressivenessKind.PRIMITIVE_STRING,
                        ExpressivenessKind.PRIMITIVE_VALUE,
                        ExpressivenessKind.VALUE_WITH_PARSE)


# ---------------------------------------------------------------------------
# type expressions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TypeExpr:
    """A member type: a plain name, ``seq<T>`` or ``map<K,V>``."""

    name: str
    args: tuple["TypeExpr", ...] = ()
    # derived once; type expressions are looked up constantly
    is_seq: bool = field(init=False, repr=False, compare=False)
    is_map: bool = field(init=False, repr=False, compare=False)
    is_collection: bool = field(init=False, repr=False, compare=False)
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        set_ = object.__setattr__
        set_(self, "is_seq", self.name == "seq")
        set_(self, "is_map", self.name == "map")
        set_(self, "is_collection", self.name in ("seq", "map"))
        set_(self, "_hash", hash((self.name, self.args)))

    def __hash__(self) -> int:
        return self._hash

    @property
    def element(self) -> "TypeExpr":
        return self.args[-1]

    def names(self) -> Iterable[str]:
        if self.is_collection:
            for a in self.args:
                yield from a.names()
        else:
            yield self.name

    def __str__(self) -> str:
        if self.args:
            return f"{self.name}<{','.join(str(a) for a in self.args)}>"
        return self.name

    @classmethod
    def parse(cls, text: str) -> "TypeExpr":
        expr, rest = _parse_type(text.replace(" ", ""))
        if rest:
            raise DeclarationError(f"trailing text in type expression {text!r}")
        return expr


def _parse_type(text: str) -> tuple[TypeExpr, str]:
    m = TYPE_NAME.match(text)
    if not m:
        raise DeclarationError(f"bad type expression {text!r}")
    name, rest = m.group(0), text[m.end():]
    if name == "array":
        name = "seq"
    if name in ("seq", "map") and rest.startswith("<"):
        args = []
        rest = rest[1:]
        while True:
            arg, rest = _parse_type(rest)
            args.append(arg)
            if rest.startswith(","):
                rest = rest[1:]
                continue
            if rest.startswith(">"):
                rest = rest[1:]
                break
            raise DeclarationError(f"unterminated type arguments in {text!r}")
        if len(args) != (1 if name == "seq" else 2):
            raise DeclarationError(f"wrong number of type arguments for {name}")
        return TypeExpr(name, tuple(args)), rest
    if name in ("seq", "map"):
        raise DeclarationError(f"{name} needs type arguments")
    return TypeExpr(name), rest


def type_expr(t: "TypeExpr | str") -> TypeExpr:
    return t if isinstance(t, TypeExpr) else _parse_cached(t)


@functools.lru_cache(maxsize=1024)
def _parse_cached(text: str) -> TypeExpr:
    return TypeExpr.parse(text)


# ---------------------------------------------------------------------------
# primitives
# ---------------------------------------------------------------------------

def format_double(x: float) -> str:
    """Shortest text that parses back to exactly ``x``."""
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    if x == 0.0:
        return "-0" if math.copysign(1.0, x) < 0 else "0"
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x).replace("e", "E")


def parse_double(text: str) -> float:
    t = text.strip()
    if t in ("Infinity", "+Infinity"):
        return math.inf
    if t == "-Infinity":
        return -math.inf
    return float(t)


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t == "true":
        return True
    if t == "false":
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _int_parser(lo: int, hi: int) -> Callable[[str], int]:
    def parse(text: str) -> int:
        v = int(text.strip())
        if not lo <= v <= hi:
            raise ValueError(f"{v} out of range [{lo}, {hi}]")
        return v
    return parse


def _int_check(lo: int, hi: int) -> Callable[[Any], bool]:
    return lambda v: isinstance(v, int) and not isinstance(v, bool) and lo <= v <= hi


def _parse_char(text: str) -> str:
    if len(text) != 1:
        raise ValueError(f"not a single character: {text!r}")
    return text


@dataclass(frozen=True)
class Primitive:
    name: str
    kind: ExpressivenessKind
    parse: Callable[[str], Any]
    format: Callable[[Any], str]
    check: Callable[[Any], bool]
    zero: Any
    decorator: str | None = None


def _ints() -> list[Primitive]:
    spec = [
        ("System.SByte", -2**7, 2**7 - 1, "i"),
        ("System.Int16", -2**15, 2**15 - 1, "i"),
        ("System.Int32", -2**31, 2**31 - 1, "i"),
        ("System.Int64", -2**63, 2**63 - 1, "i"),
        ("System.Byte", 0, 2**8 - 1, "u"),
        ("System.UInt16", 0, 2**16 - 1, "u"),
        ("System.UInt32", 0, 2**32 - 1, "u"),
        ("System.UInt64", 0, 2**64 - 1, "u"),
    ]
    return [Primitive(n, ExpressivenessKind.PRIMITIVE_VALUE, _int_parser(lo, hi), str,
                      _int_check(lo, hi), 0, d) for n, lo, hi, d in spec]


def _is_float(v: Any) -> bool:
    return isinstance(v, float)


PRIMITIVES: dict[str, Primitive] = {p.name: p for p in [
    Primitive(STRING, ExpressivenessKind.PRIMITIVE_STRING, str, str,
              lambda v: isinstance(v, str), "", "w"),
    Primitive("System.Boolean", ExpressivenessKind.PRIMITIVE_VALUE, _parse_bool,
              lambda v: "True" if v else "False", lambda v: isinstance(v, bool), False, "b"),
    Primitive("System.Char", ExpressivenessKind.PRIMITIVE_VALUE, _parse_char, str,
              lambda v: isinstance(v, str) and len(v) == 1, "\0"),
    Primitive("System.Double", ExpressivenessKind.PRIMITIVE_VALUE, parse_double,
              format_double, _is_float, 0.0, "d"),
    Primitive("System.Single", ExpressivenessKind.PRIMITIVE_VALUE, parse_double,
              format_double, _is_float, 0.0),
    *_ints(),
]}

# value types that carry their own Parse/ToString pair
BUILTIN_VALUE_TYPES: dict[str, tuple[Callable[[Any], str], Callable[[str], Any], Any]] = {
    "System.Decimal": (str, decimal.Decimal, decimal.Decimal(0)),
    "System.DateTime": (lambda d: d.isoformat(), _dt.datetime.fromisoformat,
                        _dt.datetime(1, 1, 1)),
}


# ---------------------------------------------------------------------------
# descriptors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PropertyDescriptor:
    name: str
    value_type: TypeExpr
    has_getter: bool = True
    has_setter: bool = False
    is_static: bool = False
    non_expressive: bool = False
    default_literal: str | None = None
    compare_ignore: bool = False
    is_field: bool = False  # private slot, never serialized

    @property
    def collection_kind(self) -> str:
        if self.value_type.is_seq:
            return "seq"
        if self.value_type.is_map:
            return "keyed"
        return "none"

    @property
    def is_expressive_setter(self) -> bool:
        return (self.has_getter and self.has_setter and not self.non_expressive
                and not self.is_field)

    @property
    def is_expressive_getter(self) -> bool:
        return (self.has_getter and not self.has_setter and not self.non_expressive
                and not self.is_field and self.collection_kind != "none")


@dataclass(frozen=True)
class InitMethodDescriptor:
    name: str
    sequence: int
    returns_success_flag: bool = False


@dataclass(frozen=True)
class CtorParam:
    param: str
    getter: str
    value_type: TypeExpr


@dataclass(frozen=True)
class TypeDescriptor:
    full_name: str
    interfaces: tuple[str, ...] = ()
    constructor_params: tuple[CtorParam, ...] = ()
    is_default_ctor: bool = True
    statics: tuple[PropertyDescriptor, ...] = ()
    instance_props: tuple[PropertyDescriptor, ...] = ()
    inits: tuple[InitMethodDescriptor, ...] = ()
    expressiveness: ExpressivenessKind = ExpressivenessKind.EXPRESSIVE
    compare_base_stop: str | None = None
    is_value: bool = False
    sealed: bool = False
    provisional: bool = False

    @property
    def short_name(self) -> str:
        return self.full_name.rsplit(".", 1)[-1]

    def prop(self, name: str) -> PropertyDescriptor | None:
        return self._props_by_name.get(name)

    @functools.cached_property
    def _props_by_name(self) -> dict[str, PropertyDescriptor]:
        return {p.name: p for p in self.instance_props}

    def static(self, name: str) -> PropertyDescriptor | None:
        for p in self.statics:
            if p.name == name:
                return p
        return None

    @functools.cached_property
    def ctor_getters(self) -> tuple[str, ...]:
        return tuple(c.getter for c in self.constructor_params)

    @functools.cached_property
    def setters(self) -> tuple[PropertyDescriptor, ...]:
        ctor = set(self.ctor_getters)
        return tuple(p for p in self.instance_props
                     if p.is_expressive_setter and p.name not in ctor)

    @functools.cached_property
    def getters(self) -> tuple[PropertyDescriptor, ...]:
        ctor = set(self.ctor_getters)
        return tuple(p for p in self.instance_props
                     if p.is_expressive_getter and p.name not in ctor)

    @property
    def static_setters(self) -> tuple[PropertyDescriptor, ...]:
        return tuple(p for p in self.statics if p.is_expressive_setter)

    @property
    def static_getters(self) -> tuple[PropertyDescriptor, ...]:
        return tuple(p for p in self.statics if p.is_expressive_getter)

    @functools.cached_property
    def public_props(self) -> tuple[PropertyDescriptor, ...]:
        """Expressive surface in declaration order: setters, ctor getters, getters."""
        ctor = set(self.ctor_getters)
        return tuple(p for p in self.instance_props
                     if not p.is_field and not p.non_expressive
                     and (p.is_expressive_setter or p.is_expressive_getter
                          or p.name in ctor))


# ---------------------------------------------------------------------------
# declarations (the parsed form of a schema block)
# ---------------------------------------------------------------------------

@dataclass
class MemberDecl:
    kind: str  # setter | getter | field
    name: str
    value_type: TypeExpr
    is_static: bool = False
    non_expressive: bool = False
    compare_ignore: bool = False
    line: int | None = None


@dataclass
class TypeDeclaration:
    full_name: str
    interfaces: list[str] = field(default_factory=list)
    ctor: list[tuple[str, TypeExpr]] = field(default_factory=list)
    members: list[MemberDecl] = field(default_factory=list)
    inits: list[InitMethodDescriptor] = field(default_factory=list)
    defaults: dict[str, str] = field(default_factory=dict)
    is_value: bool = False
    sealed: bool = False
    no_default_ctor: bool = False
    compare_base_stop: str | None = None
    line: int | None = None


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

class Registry:
    """Name -> descriptor catalogue plus the primitive conversion tables."""

    def __init__(self) -> None:
        self.types: dict[str, TypeDescriptor] = {}
        self.interfaces: set[str] = set()
        self.enums: dict[str, tuple[str, ...]] = {}
        self.value_types: dict[str, tuple[Callable[[Any], str], Callable[[str], Any], Any]] = \
            dict(BUILTIN_VALUE_TYPES)
        self._primitive: dict[TypeExpr, bool] = {}
        self._sealed: dict[TypeExpr, bool] = {}
        self._checks: dict[TypeExpr, Callable[[Any], bool]] = {}

    def forget(self) -> None:
        """Drop memoized classifications; call after editing the tables directly."""
        self._primitive.clear()
        self._sealed.clear()
        self._checks.clear()

    # -- registration -------------------------------------------------------

    def register(self, desc: TypeDescriptor) -> TypeDescriptor:
        old = self.types.get(desc.full_name)
        if old is not None and old != desc:
            raise DeclarationError(f"type {desc.full_name} already registered differently")
        self.types[desc.full_name] = desc
        self.forget()
        return desc

    def register_value_type(self, name: str, to_text: Callable[[Any], str],
                            from_text: Callable[[str], Any], zero: Any = None) -> None:
        self.value_types[name] = (to_text, from_text, zero)
        self.forget()

    def register_enum(self, name: str, members: Iterable[str]) -> None:
        self.enums[name] = tuple(members)
        self.forget()

    def get(self, name: str) -> TypeDescriptor:
        try:
            return self.types[name]
        except KeyError:
            raise UnknownType(name) from None

    def __contains__(self, name: str) -> bool:
        return name in self.types

    def find_short(self, short: str) -> list[TypeDescriptor]:
        return [d for d in self.types.values() if d.short_name == short]

    # -- classification ------------------------------------------------------

    def classify(self, name: str) -> ExpressivenessKind:
        return classify_primitive(name, self)

    def is_primitive(self, t: TypeExpr | str) -> bool:
        t = type_expr(t)
        r = self._primitive.get(t)
        if r is None:
            r = self._primitive[t] = not t.is_collection and self.classify(t.name).primitive
        return r

    def is_sealed(self, t: TypeExpr | str) -> bool:
        """Whether the concrete runtime type is implied by the declared type."""
        t = type_expr(t)
        r = self._sealed.get(t)
        if r is None:
            if t.is_collection:
                r = all(self.is_sealed(a) for a in t.args)
            elif self.is_primitive(t):
                r = True
            else:
                d = self.types.get(t.name)
                r = d is not None and d.sealed
            self._sealed[t] = r
        return r

    def is_known(self, name: str) -> bool:
        return (name in self.types or name in self.interfaces or name == OBJECT
                or self.classify(name).primitive)

    # -- literals ---------------------------------------------------------------

    def parse_literal(self, type_name: str, text: str) -> Any:
        if type_name in PRIMITIVES:
            return PRIMITIVES[type_name].parse(text)
        if type_name in self.enums:
            if text not in self.enums[type_name]:
                raise ValueError(f"{text!r} is not a member of {type_name}")
            return text
        if type_name in self.value_types:
            return self.value_types[type_name][1](text)
        raise UnknownType(f"{type_name} has no parse conversion")

    def format_literal(self, type_name: str, value: Any) -> str:
        if type_name in PRIMITIVES:
            return PRIMITIVES[type_name].format(value)
        if type_name in self.enums:
            return str(value)
        if type_name in self.value_types:
            return self.value_types[type_name][0](value)
        raise UnknownType(f"{type_name} has no text conversion")

    def zero_value(self, t: TypeExpr | str) -> Any:
        t = type_expr(t)
        if t.is_seq:
            return []
        if t.is_map:
            return {}
        if t.name in PRIMITIVES:
            return PRIMITIVES[t.name].zero
        if t.name in self.enums:
            return self.enums[t.name][0]
        if t.name in self.value_types:
            return self.value_types[t.name][2]
        return None

    def check_value(self, t: TypeExpr | str, value: Any) -> bool:
        """Whether ``value`` may live in a slot declared as ``t``."""
        t = type_expr(t)
        check = self._checks.get(t)
        if check is None:
            check = self._checks[t] = self._checker(t)
        return check(value)

    def _checker(self, t: TypeExpr) -> Callable[[Any], bool]:
        global _Instance
        if _Instance is None:
            from .objects import Instance  # deferred: objects imports this module
            _Instance = Instance
        instance = _Instance
        if t.is_seq:
            el = t.element
            return lambda v: isinstance(v, list) and all(self.check_value(el, x) for x in v)
        if t.is_map:
            kt, vt = t.args
            return lambda v: isinstance(v, dict) and all(
                self.check_value(kt, k) and self.check_value(vt, x) for k, x in v.items())
        if t.name == STRING:
            return lambda v: v is None or PRIMITIVES[STRING].check(v)  # string is a reference type
        if t.name in PRIMITIVES:
            return PRIMITIVES[t.name].check
        if t.name in self.enums:
            members = self.enums[t.name]
            return lambda v: v in members
        if t.name in self.value_types:
            return lambda v: v is not None
        if t.name == OBJECT:
            return lambda v: v is None or isinstance(v, instance)
        name = t.name
        return lambda v: v is None or (isinstance(v, instance) and (
            v.descriptor.full_name == name or name in v.descriptor.interfaces))


def classify_primitive(type_name: str, registry: Registry | None = None) -> ExpressivenessKind:
    if not type_name:
        raise ValueError("empty type name")
    if type_name == STRING:
        return ExpressivenessKind.PRIMITIVE_STRING
    if type_name in PRIMITIVES:
        return ExpressivenessKind.PRIMITIVE_VALUE
    if registry is not None:
        if type_name in registry.enums or type_name in registry.value_types:
            return ExpressivenessKind.VALUE_WITH_PARSE
        d = registry.types.get(type_name)
        if d is not None:
            return d.expressiveness
    return ExpressivenessKind.NON_EXPRESSIVE


# ---------------------------------------------------------------------------
# naming convention
# ---------------------------------------------------------------------------

DECORATORS = {
    "i": {"System.SByte", "System.Int16", "System.Int32", "System.Int64"},
    "u": {"System.Byte", "System.UInt16", "System.UInt32", "System.UInt64"},
    "d": {"System.Double"},
    "w": {STRING},
    "b": {"System.Boolean"},
}


def _candidates(param: str, param_type: TypeExpr) -> set[str]:
    names = {param}
    if len(param) > 1 and param[0] in DECORATORS and param_type.name in DECORATORS[param[0]]:
        names.add(param[1:])
    if param_type.is_collection:
        names |= {n[:-1] for n in names if len(n) > 1 and n.endswith("s")}
    names |= {n[0].upper() + n[1:] for n in names if n and n[0].islower()}
    return names


def match_parameter_name(param: str, param_type: TypeExpr | str,
                         getters: Mapping[str, TypeExpr | str]) -> str | None:
    """Find the getter a constructor parameter stands for.

    The parameter may differ from the getter by a lower-case first letter, one
    leading type decorator (``i u d w b``, only when the parameter type fits
    the decorator) and one trailing ``s`` on collections.  Types must agree.
    """
    param_type = type_expr(param_type)
    names = _candidates(param, param_type)
    hits = sorted(g for g, t in getters.items()
                  if g in names and type_expr(t) == param_type)
    if len(hits) > 1:
        raise AmbiguousMatch(f"parameter {param!r} matches getters {hits}")
    return hits[0] if hits else None


# ---------------------------------------------------------------------------
# building
# ---------------------------------------------------------------------------

def build_descriptor(decl: TypeDeclaration, registry: Registry | None = None) -> TypeDescriptor:
    """Compile one declaration into a descriptor.

    Follows the same order as reflective discovery would: primitive and parse
    checks, interfaces, static setters and getters, instance setters and
    getters, constructor, then initiation methods.
    """
    kind = classify_primitive(decl.full_name, registry)
    if kind.primitive:
        return TypeDescriptor(decl.full_name, expressiveness=kind, sealed=True,
                              is_value=kind != ExpressivenessKind.PRIMITIVE_STRING)

    seen: set[str] = set()
    for m in decl.members:
        if m.name in seen:
            raise DeclarationError(f"{decl.full_name}: member {m.name} declared twice", m.line)
        seen.add(m.name)

    def to_prop(m: MemberDecl) -> PropertyDescriptor:
        return PropertyDescriptor(
            name=m.name, value_type=m.value_type,
            has_getter=m.kind in ("setter", "getter"), has_setter=m.kind == "setter",
            is_static=m.is_static, non_expressive=m.non_expressive,
            default_literal=decl.defaults.get(m.name), compare_ignore=m.compare_ignore,
            is_field=m.kind == "field")

    statics = [to_prop(m) for m in decl.members if m.is_static]
    instance = [to_prop(m) for m in decl.members if not m.is_static]

    # constructor: each parameter must stand for exactly one public getter
    ctor: list[CtorParam] = []
    used: set[str] = set()
    for pname, ptype in decl.ctor:
        getters = {p.name: p.value_type for p in instance
                   if p.has_getter and not p.has_setter and not p.non_expressive
                   and not p.is_field}
        g = match_parameter_name(pname, ptype, getters)
        if g is None:
            implied = pname[0].upper() + pname[1:]
            if implied in seen:
                raise UnmatchedConstructorParam(
                    f"{decl.full_name}: parameter {pname} matches no public getter", decl.line)
            instance.append(PropertyDescriptor(implied, ptype, default_literal=decl.defaults.get(implied)))
            seen.add(implied)
            g = implied
        if g in used:
            raise UnmatchedConstructorParam(
                f"{decl.full_name}: two parameters bind getter {g}", decl.line)
        used.add(g)
        ctor.append(CtorParam(pname, g, ptype))
    if not ctor and decl.no_default_ctor:
        raise NoUsableConstructor(f"{decl.full_name}: neither a default nor an expressive constructor",
                                  decl.line)

    for name in decl.defaults:
        if name not in seen:
            raise DeclarationError(f"{decl.full_name}: default for unknown member {name}", decl.line)

    inits = sorted(decl.inits, key=lambda i: i.sequence)
    for a, b in zip(inits, inits[1:]):
        if a.sequence == b.sequence:
            raise DuplicateInitSequence(
                f"{decl.full_name}: {a.name} and {b.name} share InitSeq({a.sequence})", decl.line)

    desc = TypeDescriptor(
        full_name=decl.full_name,
        interfaces=tuple(dict.fromkeys(decl.interfaces)),
        constructor_params=tuple(ctor),
        is_default_ctor=not ctor,
        statics=tuple(statics),
        instance_props=tuple(instance),
        inits=tuple(inits),
        expressiveness=ExpressivenessKind.EXPRESSIVE,
        compare_base_stop=decl.compare_base_stop,
        is_value=decl.is_value,
        sealed=decl.sealed,
    )
    if registry is not None:
        _check_defaults(desc, registry)
    return desc


def _check_defaults(desc: TypeDescriptor, registry: Registry) -> None:
    for p in (*desc.statics, *desc.instance_props):
        if p.default_literal is None:
            continue
        t = p.value_type
        if t.is_collection or not registry.is_primitive(t):
            raise DeclarationError(f"{desc.full_name}.{p.name}: defaults need a primitive type")
        try:
            registry.parse_literal(t.name, p.default_literal)
        except (ValueError, ArithmeticError) as exc:
            raise TypeMismatch(f"{desc.full_name}.{p.name}: bad default {p.default_literal!r}") from exc


def with_provisional(desc: TypeDescriptor) -> TypeDescriptor:
    return replace(desc, provisional=True)
