"""Type-name mapping between languages.

The mapping file has one row per canonical (csharp) name::

    System.Int32	java=int	cpp=long

``#`` starts a comment.  ``EXPRESSO_TYPEMAP`` may point to a replacement file.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

from ..errors import FormatError, UnmappedTypeName
from ..stream import BufStream, IntfInfo, Prim, TypeInfo

CANONICAL = "csharp"
ENV_VAR = "EXPRESSO_TYPEMAP"


@dataclass
class TypeNameMap:
    rows: dict[str, dict[str, str]] = field(default_factory=dict)
    _reverse: dict[str, dict[str, str]] = field(default_factory=dict, repr=False)

    def add(self, canonical: str, names: dict[str, str]) -> None:
        row = {CANONICAL: canonical, **names}
        for lang, name in row.items():
            back = self._reverse.setdefault(lang, {})
            if back.get(name, canonical) != canonical:
                raise FormatError(f"{lang} name {name!r} maps to two canonical names")
            back[name] = canonical
        self.rows[canonical] = row

    @property
    def languages(self) -> set[str]:
        return set(self._reverse)

    def to_canonical(self, lang: str, name: str) -> str | None:
        return self._reverse.get(lang, {}).get(name)

    def from_canonical(self, lang: str, canonical: str) -> str | None:
        return self.rows.get(canonical, {}).get(lang)


def parse_typemap(text: str) -> TypeNameMap:
    tm = TypeNameMap()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        cells = line.split("\t")
        names = {}
        for cell in cells[1:]:
            lang, eq, name = cell.partition("=")
            if not eq or not lang.strip() or not name.strip():
                raise FormatError(f"typemap line {lineno}: bad cell {cell!r}")
            names[lang.strip()] = name.strip()
        tm.add(cells[0].strip(), names)
    return tm


def load_typemap(path: str | os.PathLike | None = None) -> TypeNameMap:
    """Load ``path``, else ``$EXPRESSO_TYPEMAP``, else the packaged table."""
    path = path or os.environ.get(ENV_VAR)
    if path:
        return parse_typemap(Path(path).read_text(encoding="utf-8"))
    return parse_typemap(resources.files(__package__).joinpath("typemap.tsv").read_text("utf-8"))


def map_type_name(tm: TypeNameMap, from_lang: str, to_lang: str, name: str) -> str:
    if from_lang == to_lang:
        return name
    for lang in (from_lang, to_lang):
        if lang not in tm.languages:
            raise UnmappedTypeName(f"unknown language {lang!r}")
    canonical = tm.to_canonical(from_lang, name)
    if canonical is None:
        raise UnmappedTypeName(f"{from_lang} type {name!r} has no mapping")
    out = tm.from_canonical(to_lang, canonical)
    if out is None:
        raise UnmappedTypeName(f"{canonical} has no {to_lang} name")
    return out


_TOKEN = re.compile(r"(\s*[<>,]\s*)")  # separators kept verbatim


def map_type_text(tm: TypeNameMap, from_lang: str, to_lang: str, text: str) -> str:
    """Map every name inside ``text`` (including ``seq<..>``/``map<..>`` args).

    Names with no mapping row (user types) pass through unchanged unless they
    would read back as a builtin of ``to_lang``.
    """
    if from_lang == to_lang:
        return text
    parts = _TOKEN.split(text)
    out = []
    for i, part in enumerate(parts):
        if i % 2:
            out.append(part)
            continue
        nxt = parts[i + 1] if i + 1 < len(parts) else ""
        if not part or nxt.strip() == "<":  # empty or a constructor like seq/map
            out.append(part)
        elif tm.to_canonical(from_lang, part) is not None:
            out.append(map_type_name(tm, from_lang, to_lang, part))
        elif tm.to_canonical(to_lang, part) is not None:
            raise UnmappedTypeName(f"{from_lang} type {part!r} would read as a {to_lang} builtin")
        else:
            out.append(part)
    return "".join(out)


def translate_stream(stream: BufStream, to_lang: str, tm: TypeNameMap | None = None) -> BufStream:
    """A copy of ``stream`` with all type names rewritten for ``to_lang``."""
    tm = tm or load_typemap()
    src = stream.config.lang
    f = lambda t: map_type_text(tm, src, to_lang, t)  # noqa: E731
    out = BufStream(replace(stream.config, lang=to_lang))
    for item in stream.items():
        if isinstance(item, TypeInfo):
            item = TypeInfo(f(item.type_name))
        elif isinstance(item, Prim):
            item = Prim(item.name, f(item.type_name), item.literal)
        elif isinstance(item, IntfInfo):
            item = IntfInfo(item.name, f(item.type_name), f(item.interface_name))
        out.append(item)
    return out
