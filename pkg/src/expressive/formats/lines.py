"""Line-array encoding: a header line plus one ``K;name;type;value`` line per item.

Kinds: ``S`` VString, ``P`` Prim, ``V`` Value, ``R`` Refer, ``T`` TypeInfo,
``I`` IntfInfo (the value field holds the interface name).  ``;``, ``\\``, ``\\r`` and
``\\n`` inside fields are backslash-escaped.
"""

from __future__ import annotations

import re
from typing import Iterable

from ..errors import MalformedHeader, MalformedLine
from ..stream import BufStream, IntfInfo, Prim, Refer, StreamConfig, TypeInfo, Value, VString

MAGIC = "expressive-stream"
VERSION = "v1"

_ESC = {";": "\\;", "\\": "\\\\", "\n": "\\n", "\r": "\\r"}
_UNESC = {";": ";", "\\": "\\", "n": "\n", "r": "\r"}
_NEEDS_ESC = re.compile(r"[;\\\n\r]")
_PIECE = re.compile(r"\\(.)|(;)|([^;\\]+)|(\\)", re.S)


def escape(text: str) -> str:
    return _NEEDS_ESC.sub(lambda m: _ESC[m.group(0)], text)


def _split(line: str) -> list[str]:
    """Split on unescaped ``;`` and undo escapes."""
    if "\\" not in line:
        return line.split(";")
    fields, buf = [], []
    for esc, sep, run, dangling in _PIECE.findall(line):
        if run:
            buf.append(run)
        elif sep:
            fields.append("".join(buf))
            buf = []
        elif esc in _UNESC:
            buf.append(_UNESC[esc])
        else:
            raise MalformedLine(f"bad escape in {line!r}")
    fields.append("".join(buf))
    return fields


def encode_header(config: StreamConfig) -> str:
    flags = ";".join(f"{k}={int(v)}" for k, v in (
        ("static", config.include_static), ("type", config.include_type),
        ("name", config.include_name)))
    return f"{MAGIC};{VERSION};lang={config.lang};{flags}"


_HEADER = re.compile(r"expressive-stream;(v\d+);lang=(\w+);static=([01]);type=([01]);name=([01])")


def decode_header(line: str) -> StreamConfig:
    m = _HEADER.fullmatch(line.rstrip("\r\n"))
    if not m:
        raise MalformedHeader(f"not a stream header: {line!r}")
    if m.group(1) != VERSION:
        raise MalformedHeader(f"unsupported stream version {m.group(1)}")
    return StreamConfig(include_static=m.group(3) == "1", include_type=m.group(4) == "1",
                        include_name=m.group(5) == "1", lang=m.group(2))


def encode_item(item) -> str:
    if isinstance(item, VString):
        parts = ("S", item.name, "", item.text)
    elif isinstance(item, Prim):
        parts = ("P", item.name, item.type_name, item.literal)
    elif isinstance(item, Value):
        parts = ("V", item.name, "", "")
    elif isinstance(item, Refer):
        parts = ("R", item.name, "", str(item.identity))
    elif isinstance(item, TypeInfo):
        parts = ("T", "", item.type_name, "")
    elif isinstance(item, IntfInfo):
        parts = ("I", item.name, item.type_name, item.interface_name)
    else:
        raise TypeError(f"not a stream item: {item!r}")
    line = ";".join(parts)
    if _NEEDS_ESC.search("".join(parts)) is None:
        return line
    return ";".join(escape(p) for p in parts)


def decode_item(line: str):
    f = _split(line)
    if len(f) != 4:
        raise MalformedLine(f"expected 4 fields, got {len(f)}: {line!r}")
    kind, name, tname, value = f
    try:
        if kind == "S":
            return VString(name, value)
        if kind == "P":
            return Prim(name, tname, value)
        if kind == "V":
            return Value(name)
        if kind == "R":
            return Refer(name, int(value))
        if kind == "T":
            return TypeInfo(tname)
        if kind == "I":
            return IntfInfo(name, tname, value)
    except ValueError as exc:
        raise MalformedLine(f"{exc}: {line!r}") from None
    raise MalformedLine(f"unknown item kind {kind!r}")


def lines_encode(stream: BufStream) -> list[str]:
    """Encode without consuming ``stream``."""
    return [encode_header(stream.config), *(encode_item(i) for i in stream.items())]


def lines_decode(lines: Iterable[str]) -> BufStream:
    it = iter(lines)
    head = next(it, None)
    if head is None:
        raise MalformedHeader("empty input")
    stream = BufStream(decode_header(head))
    for line in it:
        line = line.rstrip("\r\n")
        if line:
            stream.append(decode_item(line))
    return stream


def is_lines_text(text: str) -> bool:
    return text.startswith(MAGIC + ";")
