"""Binding names: ``owner<delim>member`` chains built from ``: . $ * @ &``."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from .errors import MalformedBindingName


class Delim(enum.Enum):
    ROOT = ""
    INTERFACE = ":"
    SETTER = "."
    CTOR_PARAM = "$"
    SEQ_GETTER = "*"
    KEYED_KEY = "@"
    KEYED_VALUE = "&"


_BY_CHAR = {d.value: d for d in Delim if d is not Delim.ROOT}
_TOKEN = re.compile(r"([:.$*@&])([A-Za-z_][A-Za-z0-9_]*)")
_ROOT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_LAST = re.compile(r"[:.$*@&][^:.$*@&]*$")


@dataclass(frozen=True)
class BindingName:
    segments: tuple[tuple[Delim, str], ...]

    def __post_init__(self) -> None:
        if not self.segments or self.segments[0][0] is not Delim.ROOT:
            raise MalformedBindingName("binding name must start with a root segment")
        if any(d is Delim.ROOT for d, _ in self.segments[1:]):
            raise MalformedBindingName("root segment only allowed first")

    @property
    def owner(self) -> str:
        """Text of everything before the last delimiter."""
        return str(BindingName(self.segments[:-1])) if len(self.segments) > 1 else ""

    @property
    def delim(self) -> Delim:
        return self.segments[-1][0]

    @property
    def member(self) -> str:
        return self.segments[-1][1]

    def __str__(self) -> str:
        return "".join(d.value + ident for d, ident in self.segments)


def encode_binding(kind: Delim | str, owner: str, member: str) -> str:
    if isinstance(kind, str):
        kind = _BY_CHAR[kind]
    if kind is Delim.ROOT:
        raise MalformedBindingName("root is not a member delimiter")
    if not owner or not _ROOT.fullmatch(member):
        raise MalformedBindingName(f"cannot bind {member!r} under {owner!r}")
    return f"{owner}{kind.value}{member}"


def decode_binding(text: str) -> BindingName:
    m = _ROOT.match(text)
    if not m:
        raise MalformedBindingName(f"bad binding name {text!r}")
    segments = [(Delim.ROOT, m.group(0))]
    pos = m.end()
    while pos < len(text):
        t = _TOKEN.match(text, pos)
        if not t:
            raise MalformedBindingName(f"bad binding name {text!r} at offset {pos}")
        segments.append((_BY_CHAR[t.group(1)], t.group(2)))
        pos = t.end()
    return BindingName(tuple(segments))


def split_binding(text: str) -> tuple[str, Delim, str] | None:
    """``(owner, delim, member)`` for a member name, ``None`` for a bare root."""
    m = _LAST.search(text)
    cut = m.start() if m else -1
    if cut < 0:
        if not _ROOT.fullmatch(text):
            raise MalformedBindingName(f"bad binding name {text!r}")
        return None
    owner, member = text[:cut], text[cut + 1:]
    if not owner or not _ROOT.fullmatch(member):
        raise MalformedBindingName(f"bad binding name {text!r}")
    return owner, _BY_CHAR[text[cut]], member
