"""Reading and writing the type declaration format.

One block per type; members are indented under the ``type`` line::

    interface UnitTest.MyIntface
    type UnitTest.MyExpressiveType implements UnitTest.MyIntface
      ctor myReadonly: System.Double
      setter MyValue: System.Int32
      getter MyCollection: seq<System.Double>
      getter MyArray: seq<System.Double> nonexpressive
      init ConnectToDB seq=1 returns=System.Boolean
      init SetDBLogger seq=2
      default MyValue = 0

Type line modifiers: ``value`` (stack kind), ``sealed``, ``nodefault`` (no
public default constructor).  Member flags: ``nonexpressive``,
``compareignore``.  ``field`` declares a private slot and ``comparebase T``
stops comparison descent at ``T``.
"""

from __future__ import annotations

import re
from typing import Iterable

from .errors import DeclarationError
from .types import (
    IDENTIFIER,
    TYPE_NAME,
    InitMethodDescriptor,
    MemberDecl,
    Registry,
    TypeDeclaration,
    TypeDescriptor,
    TypeExpr,
    build_descriptor,
)

_MEMBER = re.compile(r"(static\s+)?(setter|getter|field)\s+([A-Za-z_]\w*)\s*:\s*(.+)$")
_FLAGS = {"nonexpressive", "compareignore"}
_MODIFIERS = {"value", "sealed", "nodefault"}


def _split_flags(text: str) -> tuple[str, set[str]]:
    words = text.split()
    flags: set[str] = set()
    while words and words[-1] in _FLAGS:
        flags.add(words.pop())
    return " ".join(words), flags


def _type(text: str, lineno: int) -> TypeExpr:
    try:
        return TypeExpr.parse(text)
    except DeclarationError as exc:
        raise DeclarationError(str(exc), lineno) from None


def _ident(text: str, lineno: int, what: str = "identifier") -> str:
    if not IDENTIFIER.fullmatch(text):
        raise DeclarationError(f"bad {what} {text!r}", lineno)
    return text


def _type_name(text: str, lineno: int) -> str:
    if not TYPE_NAME.fullmatch(text):
        raise DeclarationError(f"bad type name {text!r}", lineno)
    return text


def parse_declarations(text: str) -> tuple[list[TypeDeclaration], list[str], dict[str, list[str]]]:
    """Parse declaration text into (types, interfaces, enums)."""
    decls: list[TypeDeclaration] = []
    interfaces: list[str] = []
    enums: dict[str, list[str]] = {}
    current: TypeDeclaration | None = None

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indented = line[0].isspace()
        line = line.strip()
        head, _, rest = line.partition(" ")
        rest = rest.strip()

        if not indented:
            current = None
            if head == "interface":
                interfaces.append(_type_name(rest, lineno))
            elif head == "enum":
                name, _, members = rest.partition(":")
                enums[_type_name(name.strip(), lineno)] = [
                    _ident(m.strip(), lineno, "enum member") for m in members.split(",") if m.strip()]
            elif head == "type":
                current = _parse_type_line(rest, lineno)
                decls.append(current)
            else:
                raise DeclarationError(f"unexpected {head!r} at top level", lineno)
            continue

        if current is None:
            raise DeclarationError("indented line outside a type block", lineno)
        if head == "ctor":
            for part in rest.split(",") if "<" not in rest else [rest]:
                pname, _, ptype = part.partition(":")
                if not ptype:
                    raise DeclarationError("ctor parameter needs 'name: type'", lineno)
                current.ctor.append((_ident(pname.strip(), lineno), _type(ptype.strip(), lineno)))
        elif head == "init":
            current.inits.append(_parse_init(rest, lineno))
        elif head == "default":
            name, eq, literal = rest.partition("=")
            if not eq:
                raise DeclarationError("default needs 'Name = literal'", lineno)
            current.defaults[_ident(name.strip(), lineno)] = literal.strip()
        elif head == "comparebase":
            current.compare_base_stop = _type_name(rest, lineno) if rest else current.full_name
        else:
            m = _MEMBER.match(line)
            if not m:
                raise DeclarationError(f"cannot parse member line {line!r}", lineno)
            type_text, flags = _split_flags(m.group(4))
            current.members.append(MemberDecl(
                kind=m.group(2), name=m.group(3), value_type=_type(type_text, lineno),
                is_static=bool(m.group(1)), non_expressive="nonexpressive" in flags,
                compare_ignore="compareignore" in flags, line=lineno))
    return decls, interfaces, enums


def _parse_type_line(rest: str, lineno: int) -> TypeDeclaration:
    before, _, impl = rest.partition(" implements ")
    words = before.split()
    if not words:
        raise DeclarationError("type needs a name", lineno)
    decl = TypeDeclaration(full_name=_type_name(words[0], lineno), line=lineno)
    for w in words[1:]:
        if w not in _MODIFIERS:
            raise DeclarationError(f"unknown type modifier {w!r}", lineno)
    decl.is_value = "value" in words[1:]
    decl.sealed = "sealed" in words[1:]
    decl.no_default_ctor = "nodefault" in words[1:]
    if impl:
        decl.interfaces = [_type_name(i.strip(), lineno) for i in impl.split(",") if i.strip()]
    return decl


def _parse_init(rest: str, lineno: int) -> InitMethodDescriptor:
    words = rest.split()
    if not words:
        raise DeclarationError("init needs a method name", lineno)
    name = _ident(words[0], lineno)
    seq = None
    returns = "System.Void"
    for w in words[1:]:
        key, _, val = w.partition("=")
        if key == "seq":
            try:
                seq = int(val)
            except ValueError:
                raise DeclarationError(f"bad init sequence {val!r}", lineno) from None
        elif key == "returns":
            returns = val
        else:
            raise DeclarationError(f"unknown init option {w!r}", lineno)
    if seq is None:
        raise DeclarationError(f"init {name} needs seq=N", lineno)
    return InitMethodDescriptor(name, seq, returns == "System.Boolean")


def load_registry(text: str, registry: Registry | None = None) -> Registry:
    """Parse declarations, build descriptors and register them."""
    registry = registry if registry is not None else Registry()
    decls, interfaces, enums = parse_declarations(text)
    registry.interfaces.update(interfaces)
    for name, members in enums.items():
        registry.register_enum(name, members)
    for decl in decls:
        registry.interfaces.update(decl.interfaces)
    for decl in decls:
        registry.register(build_descriptor(decl, registry))
    for desc in list(registry.types.values()):
        for p in (*desc.statics, *desc.instance_props):
            for n in p.value_type.names():
                if not registry.is_known(n):
                    raise DeclarationError(f"{desc.full_name}.{p.name}: unknown type {n}")
    return registry


def render_declarations(descs: Iterable[TypeDescriptor], registry: Registry | None = None) -> str:
    """Declaration text that loads back into equal descriptors."""
    out: list[str] = []
    descs = list(descs)
    intfs = sorted({i for d in descs for i in d.interfaces})
    for i in intfs:
        out.append(f"interface {i}")
    if registry is not None:
        used = {n for d in descs for p in (*d.statics, *d.instance_props) for n in p.value_type.names()}
        for name in sorted(used & set(registry.enums)):
            out.append(f"enum {name}: {', '.join(registry.enums[name])}")
    for d in descs:
        mods = [m for m, on in (("value", d.is_value), ("sealed", d.sealed)) if on]
        if not d.constructor_params and not d.is_default_ctor:
            mods.append("nodefault")
        line = " ".join(["type", d.full_name, *mods])
        if d.interfaces:
            line += " implements " + ", ".join(d.interfaces)
        out.append(line)
        for c in d.constructor_params:
            out.append(f"  ctor {c.param}: {c.value_type}")
        defaults = []
        for p in (*d.statics, *d.instance_props):
            kind = "field" if p.is_field else ("setter" if p.has_setter else "getter")
            flags = [f for f, on in (("nonexpressive", p.non_expressive),
                                     ("compareignore", p.compare_ignore)) if on]
            out.append("  " + " ".join([*(["static"] if p.is_static else []), kind,
                                        f"{p.name}: {p.value_type}", *flags]))
            if p.default_literal is not None:
                defaults.append(f"  default {p.name} = {p.default_literal}")
        for i in d.inits:
            ret = " returns=System.Boolean" if i.returns_success_flag else ""
            out.append(f"  init {i.name} seq={i.sequence}{ret}")
        out.extend(defaults)
        if d.compare_base_stop:
            out.append(f"  comparebase {d.compare_base_stop}")
    return "\n".join(out) + "\n"
