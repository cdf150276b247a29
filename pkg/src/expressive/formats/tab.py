"""Tab-delimited persistence of expressive streams.

Three kinds of marker line carry the data; every other line is free text::

    #?<TAB>type<TAB>type...     type line
    #@<TAB>name<TAB>name...     name line, column-aligned with the type line
    ?<TAB>datum<TAB>datum...    data line, one or more per header pair

Each column stands for one or two stream items:

=================  ===========================  =================================
type cell          datum                        items
=================  ===========================  =================================
primitive ``T``    literal                      ``Prim(name, T, literal)``
``System.String``  text                         ``TypeInfo(String)``, ``VString``
object ``T``       identity, or empty           ``TypeInfo(T)``, ``Refer``/``Value``
interface ``I``    implementing type            ``IntfInfo`` (name has ``:``)
``&S`` ``&R``      text / identity              bare ``VString`` / bare ``Refer``
``&V``             (empty)                      bare ``Value``
``&T``             type name                    bare ``TypeInfo``
``&P:T``           literal                      ``Prim`` of a non-builtin type
``&I:I``           implementing type            ``IntfInfo`` with a plain name
=================  ===========================  =================================

IntfInfo columns are written after the object column they belong to and moved
back in front of its ``Refer``/``Value`` on reading.
"""

from __future__ import annotations

import functools
import re

from dataclasses import dataclass
from typing import Any, Iterable, Sequence, TextIO

from ..binding import split_binding
from ..errors import (
    ColumnCountMismatch,
    DataLineWithoutHeader,
    MalformedLine,
    NameLineWithoutTypeLine,
)
from ..stream import (
    COMPLETE,
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
from ..types import BUILTIN_VALUE_TYPES, PRIMITIVES, STRING

CTOR_FIRST: tuple[str, ...] = ("$", ".")


@dataclass(frozen=True)
class TabLayout:
    delimiter: str = "\t"
    type_marker: str = "#?"
    name_marker: str = "#@"
    data_marker: str = "?"
    newline: str = "\n"
    max_items_per_line: int = 0  # 0: no wrapping
    newline_for_non_primitive: bool = True
    newline_for_collection: bool = True

    def __post_init__(self) -> None:
        if len({self.type_marker, self.name_marker, self.data_marker}) != 3:
            raise ValueError("tab markers must be pairwise distinct")


@dataclass(frozen=True)
class Column:
    type: str
    name: str
    datum: str

    @property
    def header(self) -> tuple[str, str]:
        return self.type, self.name


def _builtin_primitive(t: str) -> bool:
    return (t in PRIMITIVES or t in BUILTIN_VALUE_TYPES) and t != STRING


@functools.lru_cache(maxsize=4096)
def _delim(name: str) -> str | None:
    try:
        parts = split_binding(name) if name else None
    except Exception:
        return None
    return parts[1].value if parts else None


# ---------------------------------------------------------------------------
# cells
# ---------------------------------------------------------------------------

_ESC = {"\t": "\\t", "\n": "\\n", "\r": "\\r", "\\": "\\\\"}
_UNESC = {"t": "\t", "n": "\n", "r": "\r", "\\": "\\"}


_NEEDS_ESC = re.compile(r"[\t\n\r\\]")


def escape_cell(text: str) -> str:
    return _NEEDS_ESC.sub(lambda m: _ESC[m.group(0)], text)


def unescape_cell(text: str) -> str:
    if "\\" not in text:
        return text
    out, it = [], iter(text)
    for c in it:
        if c == "\\":
            nxt = next(it, "")
            if nxt not in _UNESC:
                raise MalformedLine(f"bad escape in cell {text!r}")
            out.append(_UNESC[nxt])
        else:
            out.append(c)
    return "".join(out)


# ---------------------------------------------------------------------------
# items <-> columns
# ---------------------------------------------------------------------------

def _object_type(t: str) -> bool:
    return not _builtin_primitive(t) and t != STRING


def to_columns(items: Sequence) -> list[list[Column]]:
    """Group items into units: a unit is one column, or an object column plus
    the interface columns of its type."""
    units: list[list[Column]] = []
    i, n = 0, len(items)
    while i < n:
        it = items[i]
        if isinstance(it, TypeInfo):
            j = i + 1
            while j < n and isinstance(items[j], IntfInfo):
                j += 1
            nxt = items[j] if j < n else None
            t = it.type_name
            if t == STRING and j == i + 1 and isinstance(nxt, VString):
                units.append([Column(STRING, nxt.name, nxt.text)])
                i = j + 1
                continue
            plain = all(_plain_intf(x) for x in items[i + 1:j])
            if _object_type(t) and plain and isinstance(nxt, (Refer, Value)) \
                    and not (isinstance(nxt, Refer) and nxt.identity == 0):
                datum = str(nxt.identity) if isinstance(nxt, Refer) else ""
                unit = [Column(t, nxt.name, datum)]
                unit.extend(_intf_column(x) for x in items[i + 1:j])
                units.append(unit)
                i = j + 1
                continue
            units.append([Column("&T", "", t)])
            i += 1
            continue
        col = _single_column(it)
        if isinstance(it, IntfInfo) and units and _object_type(units[-1][0].type) \
                and not units[-1][0].type.startswith("&"):
            col = Column("&I:" + it.interface_name, it.name, it.type_name)
        units.append([col])
        i += 1
    return units


def _plain_intf(it: IntfInfo) -> bool:
    return _delim(it.name) == ":" and _object_type(it.interface_name) \
        and not it.interface_name.startswith("&")


def _intf_column(it: IntfInfo) -> Column:
    if _plain_intf(it):
        return Column(it.interface_name, it.name, it.type_name)
    return Column("&I:" + it.interface_name, it.name, it.type_name)


def _single_column(it) -> Column:
    if isinstance(it, Prim):
        if _builtin_primitive(it.type_name):
            return Column(it.type_name, it.name, it.literal)
        return Column("&P:" + it.type_name, it.name, it.literal)
    if isinstance(it, VString):
        return Column("&S", it.name, it.text)
    if isinstance(it, Refer):
        return Column("&R", it.name, str(it.identity))
    if isinstance(it, Value):
        return Column("&V", it.name, "")
    if isinstance(it, IntfInfo):
        return _intf_column(it)
    raise TypeError(f"not a stream item: {it!r}")


def from_columns(columns: Iterable[Column]) -> list:
    """Inverse of :func:`to_columns` over the flattened column list."""
    items: list = []
    body_at: int | None = None  # index of the last object column's body item
    for c in columns:
        t, name, d = c.type, c.name, c.datum
        if t.startswith("&I:"):
            items.append(IntfInfo(name, d, t[3:]))
            continue
        if _object_type(t) and not t.startswith("&") and _delim(name) == ":":
            item = IntfInfo(name, d, t)
            if body_at is None:
                items.append(item)
            else:
                items.insert(body_at, item)
                body_at += 1
            continue
        body_at = None
        if t == STRING:
            items += [TypeInfo(STRING), VString(name, d)]
        elif t == "&S":
            items.append(VString(name, d))
        elif t == "&R":
            items.append(Refer(name, _int(d, c)))
        elif t == "&V":
            items.append(Value(name))
        elif t == "&T":
            items.append(TypeInfo(d))
        elif t.startswith("&P:"):
            items.append(Prim(name, t[3:], d))
        elif t.startswith("&"):
            raise MalformedLine(f"unknown column kind {t!r}")
        elif _builtin_primitive(t):
            items.append(Prim(name, t, d))
        else:
            items.append(TypeInfo(t))
            body_at = len(items)
            items.append(Refer(name, _int(d, c)) if d else Value(name))
    return items


def _int(text: str, c: Column) -> int:
    try:
        v = int(text)
    except ValueError:
        raise MalformedLine(f"column {c.name or c.type}: {text!r} is not an identity") from None
    if v < 0:
        raise MalformedLine(f"column {c.name or c.type}: negative identity")
    return v


# ---------------------------------------------------------------------------
# writing
# ---------------------------------------------------------------------------

def _is_element(col: Column) -> bool:
    return _delim(col.name) in ("*", "@", "&")


def _key_name(value_name: str) -> str:
    cut = value_name.rfind("&")
    return value_name[:cut] + "@" + value_name[cut + 1:]


def _starts_object(col: Column) -> bool:
    return _object_type(col.type) and not col.type.startswith("&") and _delim(col.name) != ":"


def _rows(units: list[list[Column]], layout: TabLayout,
          column_plan: Sequence[str] | None) -> list[list[Column]]:
    rows: list[list[list[Column]]] = []
    row: list[list[Column]] = []
    prev: list[Column] | None = None
    for unit in units:
        head = unit[0]
        brk = False
        if row:
            if layout.newline_for_collection and _is_element(head):
                # a keyed value stays on the line of its key
                brk = not (_delim(head.name) == "&" and prev is not None and len(prev) == 1
                           and prev[0].name == _key_name(head.name))
            elif layout.newline_for_non_primitive and _starts_object(head):
                brk = True
            elif layout.newline_for_collection and prev is not None and _is_element(prev[0]) \
                    and not _is_element(head):
                brk = True
        if brk:
            rows.append(row)
            row = []
        row.append(unit)
        prev = unit
    if row:
        rows.append(row)
    if column_plan:
        rows = [_apply_plan(r, column_plan) for r in rows]
    out: list[list[Column]] = []
    for r in rows:
        flat = [c for u in r for c in u]
        step = layout.max_items_per_line or len(flat)
        out.extend(flat[k:k + step] for k in range(0, len(flat), step))
    return out


def _apply_plan(row: list[list[Column]], plan: Sequence[str]) -> list[list[Column]]:
    """Stable-sort runs of single-column member units by delimiter rank."""
    rank = {d: k for k, d in enumerate(plan)}

    def key(u: list[Column]) -> int | None:
        if len(u) != 1 or _starts_object(u[0]):
            return None
        return rank.get(_delim(u[0].name) or "")

    out: list[list[Column]] = []
    run: list[list[Column]] = []
    for u in row:
        if key(u) is None:
            out.extend(sorted(run, key=key))
            run = []
            out.append(u)
        else:
            run.append(u)
    out.extend(sorted(run, key=key))
    return out


def format_tab(items: Sequence, layout: TabLayout = TabLayout(),
               column_plan: Sequence[str] | None = None) -> str:
    """Render stream items as tab-delimited text."""
    d, nl = layout.delimiter, layout.newline
    lines: list[str] = []
    header: tuple | None = None
    for row in _rows(to_columns(list(items)), layout, column_plan):
        h = tuple(c.header for c in row)
        if h != header:
            lines.append(d.join([layout.type_marker, *(c.type for c in row)]))
            lines.append(d.join([layout.name_marker, *(c.name for c in row)]))
            header = h
        lines.append(d.join([layout.data_marker, *(escape_cell(c.datum) for c in row)]))
    return "".join(line + nl for line in lines)


def tab_write_stream(sink: TextIO, stream: BufStream, layout: TabLayout = TabLayout(),
                     column_plan: Sequence[str] | None = None) -> None:
    sink.write(format_tab(stream.items(), layout, column_plan))


def tab_write(sink: TextIO, value: Any, name: str, registry, layout: TabLayout = TabLayout(),
              column_plan: Sequence[str] | None = None, heap=None,
              config: StreamConfig = COMPLETE, value_type=None) -> None:
    """Serialize ``value`` and write it in tab format."""
    from ..serializer import serialize

    stream = BufStream(config)
    serialize(stream, value, name if config.include_name else "", registry,
              heap=heap, value_type=value_type)
    tab_write_stream(sink, stream, layout, column_plan)


# ---------------------------------------------------------------------------
# reading
# ---------------------------------------------------------------------------

def parse_tab(text: str, layout: TabLayout = TabLayout()) -> list[Column]:
    d = layout.delimiter
    tmark, nmark, dmark = (m + d for m in (layout.type_marker, layout.name_marker,
                                            layout.data_marker))
    types: list[str] | None = None
    names: list[str] | None = None
    last = None  # kind of the last marker line
    columns: list[Column] = []
    for lineno, raw in enumerate(text.split(layout.newline), 1):
        line = raw.rstrip("\r") if layout.newline == "\n" else raw
        if line.startswith(tmark):
            types, names, last = line[len(tmark):].split(d), None, "type"
        elif line.startswith(nmark):
            if last != "type":
                raise NameLineWithoutTypeLine(f"line {lineno}: name line without a type line")
            names, last = line[len(nmark):].split(d), "name"
            if len(names) != len(types):
                raise ColumnCountMismatch(
                    f"line {lineno}: {len(names)} names under {len(types)} types")
        elif line.startswith(dmark):
            if names is None:
                raise DataLineWithoutHeader(f"line {lineno}: data line without type and name lines")
            cells = line[len(dmark):].split(d)
            if len(cells) != len(types):
                raise ColumnCountMismatch(
                    f"line {lineno}: {len(cells)} cells under {len(types)} columns")
            columns.extend(Column(t, n, unescape_cell(c)) for t, n, c in zip(types, names, cells))
            last = "data"
    return columns


def tab_read(source: TextIO | str, layout: TabLayout = TabLayout(),
             config: StreamConfig | None = None) -> BufStream:
    """Rebuild the stream from tab text.

    Without ``config`` the flags are inferred: nameless files read as
    simplified streams, and static items count as present when any interface
    column is.
    """
    text = source if isinstance(source, str) else source.read()
    items = from_columns(parse_tab(text, layout))
    if config is None:
        named = any(getattr(i, "name", "") for i in items)
        if named:
            config = StreamConfig(include_static=any(isinstance(i, IntfInfo) for i in items))
        else:
            config = SIMPLIFIED
    return BufStream(config, items)
