"""Self-describing serialization of object graphs through declared expressive types."""

from .errors import ExpressiveError
from .objects import Heap, Instance, instantiate, run_inits
from .schema import load_registry, parse_declarations, render_declarations
from .serializer import (
    Session,
    clear_session,
    clone,
    deserialize,
    deserialize_static,
    serialize,
    serialize_static,
)
from .stream import COMPLETE, SIMPLIFIED, BufStream, StreamConfig
from .types import Registry, TypeDescriptor, TypeExpr

__all__ = [
    "BufStream", "COMPLETE", "ExpressiveError", "Heap", "Instance", "Registry",
    "SIMPLIFIED", "Session", "StreamConfig", "TypeDescriptor", "TypeExpr",
    "clear_session", "clone", "deserialize", "deserialize_static", "instantiate",
    "load_registry", "parse_declarations", "render_declarations", "run_inits",
    "serialize", "serialize_static",
]
