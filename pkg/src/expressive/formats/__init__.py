"""Persisted encodings of expressive streams and cross-language type names."""

from .lines import is_lines_text, lines_decode, lines_encode
from .tab import CTOR_FIRST, TabLayout, format_tab, tab_read, tab_write, tab_write_stream
from .typemap import TypeNameMap, load_typemap, map_type_name, parse_typemap, translate_stream

__all__ = [
    "CTOR_FIRST", "TabLayout", "TypeNameMap", "format_tab", "is_lines_text", "lines_decode",
    "lines_encode", "load_typemap", "map_type_name", "parse_typemap", "tab_read", "tab_write",
    "tab_write_stream", "translate_stream",
]
