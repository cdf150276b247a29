"""Command line front end.

Exit status: 0 on success, 1 when a comparison or a spec test fails, 2 on
usage, parse or format errors.
"""

from __future__ import annotations

import argparse
import io
import sys
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

from .compare import FIELDWISE, GETTERWISE, diff
from .errors import ExpressiveError
from .formats import CTOR_FIRST, is_lines_text, lines_decode, lines_encode, tab_read, tab_write_stream
from .formats.typemap import CANONICAL, translate_stream
from .literal import format_data, load_data
from .objects import Heap
from .schema import load_registry, render_declarations
from .serializer import deserialize, serialize
from .spec.compiler import CompileOptions, build_program, compile_specs
from .spec.implementers import default_registry
from .spec.model import CompileFailure, NoSuchImplementer, SpecError
from .stream import COMPLETE, SIMPLIFIED, BufStream, StreamConfig
from .typesynth import synthesize_types
from .types import Registry

OK, FAILED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- input helpers ---------------------------------------------------------------

def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | None, text: str, out) -> None:
    if path is None or path == "-":
        out.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _registry(schema: str | None) -> Registry:
    return load_registry(_read(schema)) if schema else Registry()


def _stream_from_text(text: str) -> BufStream:
    stream = lines_decode(text.split("\n")) if is_lines_text(text) else tab_read(text)
    if stream.config.lang != CANONICAL:
        stream = translate_stream(stream, CANONICAL)
    return stream


def _load_value(path: str, registry: Registry, heap: Heap, synth: bool = False
                ) -> tuple[Any, str, str | None]:
    """A value from a literal-assignment file or from a persisted stream."""
    text = _read(path)
    if is_lines_text(text) or text.lstrip().startswith("#?"):
        stream = _stream_from_text(text)
        value, desc, name = deserialize(stream, registry, heap=heap, synthesize=synth)
        return value, name or "value", desc.full_name if desc else None
    return load_data(text, registry, heap)


def _spec_sources(paths: Sequence[str]) -> list[str]:
    out = []
    for p in paths:
        if not Path(p).exists() and p.replace("-", "_") + ".spec" in _packaged_specs():
            out.append(resources.files("expressive.spec").joinpath(
                "fixtures", p.replace("-", "_") + ".spec").read_text(encoding="utf-8"))
        else:
            out.append(_read(p))
    return out


def _packaged_specs() -> set[str]:
    folder = resources.files("expressive.spec").joinpath("fixtures")
    return {f.name for f in folder.iterdir() if f.name.endswith(".spec")}


def _spec_options(args, run_tests: bool) -> CompileOptions:
    registry = default_registry()
    chosen: dict[str, str] = {}
    for name in args.impl or []:
        impl = registry.get(name)
        chosen[impl.spec] = name
    return CompileOptions(implementers=chosen, violate=tuple(getattr(args, "violate", None) or ()),
                          run_tests=run_tests)


# -- commands ---------------------------------------------------------------------

def cmd_serialize(args, out) -> int:
    registry = _registry(args.schema)
    heap = Heap(registry)
    value, name, type_name = _load_value(args.data, registry, heap)
    config = SIMPLIFIED if args.simplified else COMPLETE
    stream = BufStream(config)
    serialize(stream, value, name if config.include_name else "", registry, heap=heap,
              value_type=None if type_name else args.type)
    if args.lang != CANONICAL:
        stream = translate_stream(stream, args.lang)
    if args.format == "tab":
        buf = io.StringIO()
        tab_write_stream(buf, stream, column_plan=CTOR_FIRST)
        text = buf.getvalue()
    else:
        text = "".join(line + "\n" for line in lines_encode(stream))
    _write(args.output, text, out)
    return OK


def cmd_deserialize(args, out) -> int:
    registry = _registry(args.schema)
    stream = _stream_from_text(_read(args.input))
    heap = Heap(registry)
    value, desc, name = deserialize(stream, registry, heap=heap, synthesize=args.synth)
    out.write(format_data(value, name or "value", registry))
    return OK


def _encode_decode(value, name, registry, heap, fmt: str, config: StreamConfig):
    stream = BufStream(config)
    serialize(stream, value, name if config.include_name else "", registry, heap=heap)
    if fmt == "lines":
        stream = lines_decode(lines_encode(stream))
    elif fmt == "tab":
        buf = io.StringIO()
        tab_write_stream(buf, stream)
        stream = tab_read(buf.getvalue(), config=config)
    copy, _, _ = deserialize(stream, registry, heap=Heap(registry),
                             descriptor=value.descriptor if not config.include_type else None)
    return copy


def cmd_roundtrip(args, out) -> int:
    registry = _registry(args.schema)
    heap = Heap(registry)
    value, name, _ = _load_value(args.data, registry, heap)
    config = SIMPLIFIED if args.simplified else COMPLETE
    copy = _encode_decode(value, name, registry, heap, args.via, config)
    report = diff(value, copy, args.compare)
    if report is None:
        out.write("no difference\n")
        return OK
    out.write(f"difference: {report}\n")
    return FAILED


def cmd_diff(args, out) -> int:
    registry = _registry(args.schema)
    left, _, _ = _load_value(args.left, registry, Heap(registry), synth=args.schema is None)
    right, _, _ = _load_value(args.right, registry, Heap(registry), synth=args.schema is None)
    report = diff(left, right, args.compare)
    if report is None:
        out.write("no difference\n")
        return OK
    out.write(f"difference: {report}\n")
    return FAILED


def cmd_synth(args, out) -> int:
    registry = _registry(args.schema)
    stream = _stream_from_text(_read(args.input))
    descs = synthesize_types(stream.items(), registry, include_name=stream.include_name)
    _write(args.output, render_declarations(descs, registry), out)
    return OK


def cmd_spec_check(args, out) -> int:
    program = build_program(_spec_sources(args.spec), options=_spec_options(args, False))
    t = program.tables
    for n in t.order:
        s = t.specs[n]
        kind = "concrete" if s.concrete else "spec"
        out.write(f"{kind} {n}{' : ' + ', '.join(s.parents) if s.parents else ''}\n")
        for parent, table in t.parent_tables[n].items():
            out.write(f"  ({parent}){n}\n" if parent != n else "  native\n")
            for key, e in table.items():
                out.write(f"    {key}\t{e.definition() if e else '-'}"
                          f"{'  [abstract]' if e is not None and e.kind.value == 'abstract' else ''}\n")
        if n in program.contractors:
            c = program.contractors[n]
            if c is None:
                out.write("  no contractor\n")
            else:
                out.write(f"  contractor: {', '.join(c.members)}\n")
                out.write(f"  implementer: {program.bindings[n].name}\n")
    return OK


def cmd_spec_test(args, out) -> int:
    try:
        program = compile_specs(_spec_sources(args.spec), options=_spec_options(args, True))
    except CompileFailure as exc:
        report = getattr(exc, "report", None)
        if report is None:
            raise
        out.write(report.to_log().summary())
        out.write(f"compilation failed: {exc.failure}\n")
        return FAILED
    report = program.report
    out.write(report.to_log().summary())
    for w in report.warnings:
        out.write(f"warning: {w}\n")
    out.write("compilation succeeded" + (" with warnings\n" if report.warnings else "\n"))
    return OK


def cmd_spec_dispatch(args, out) -> int:
    program = build_program(_spec_sources(args.spec), options=_spec_options(args, False))
    out.write(program.text(program.evaluate(args.call)) + "\n")
    return OK


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="expressive", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("serialize", help="write a value as a tab or line-array stream")
    s.add_argument("--schema", required=True)
    s.add_argument("--data", required=True, help="literal-assignment file or a stream")
    s.add_argument("--format", choices=("tab", "lines"), default="tab")
    s.add_argument("--simplified", action="store_true")
    s.add_argument("--lang", choices=("csharp", "java", "cpp"), default=CANONICAL,
                   help="type-name language of the output")
    s.add_argument("--type", help="declared type for a top-level collection or primitive")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_serialize)

    s = sub.add_parser("deserialize", help="read a stream and print the value")
    s.add_argument("--schema")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("--synth", action="store_true", help="generate unknown types from the stream")
    s.set_defaults(func=cmd_deserialize)

    s = sub.add_parser("roundtrip", help="serialize, read back and compare")
    s.add_argument("--schema", required=True)
    s.add_argument("--data", required=True)
    s.add_argument("--compare", choices=(FIELDWISE, GETTERWISE), default=GETTERWISE)
    s.add_argument("--via", choices=("memory", "lines", "tab"), default="tab")
    s.add_argument("--simplified", action="store_true")
    s.set_defaults(func=cmd_roundtrip)

    s = sub.add_parser("diff", help="compare two values")
    s.add_argument("left")
    s.add_argument("right")
    s.add_argument("--schema")
    s.add_argument("--compare", choices=(FIELDWISE, GETTERWISE), default=GETTERWISE)
    s.set_defaults(func=cmd_diff)

    s = sub.add_parser("synth", help="generate a schema from a named stream")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("-o", "--output")
    s.add_argument("--schema", help="types already known")
    s.set_defaults(func=cmd_synth)

    spec = sub.add_parser("spec", help="compile and test specs").add_subparsers(
        dest="spec_command", required=True)
    for name, func, hlp in (("check", cmd_spec_check, "build tables and bind implementers"),
                            ("test", cmd_spec_test, "compile and run every rule and case"),
                            ("dispatch", cmd_spec_dispatch, "evaluate one call expression")):
        s = spec.add_parser(name, help=hlp)
        s.add_argument("--spec", action="append", required=True,
                       help="spec file, or the name of a packaged fixture (repeatable)")
        s.add_argument("--impl", action="append", help="implementer name (repeatable)")
        if name == "test":
            s.add_argument("--violate", action="append",
                           help="ignore tests: Spec, Spec.Method or Spec.Method.Rule")
        if name == "dispatch":
            s.add_argument("--call", required=True, help='expression such as "E().F()"')
        s.set_defaults(func=func)
    return p


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return OK if exc.code == 0 else USAGE
    try:
        return args.func(args, out)
    except CompileFailure as exc:
        if isinstance(exc.failure, NoSuchImplementer):
            err.write(f"error: {exc.failure}\n")
            return USAGE
        err.write(f"compilation failed: {exc}\n")
        return FAILED
    except (UsageError, ExpressiveError, SpecError) as exc:
        err.write(f"error: {type(exc).__name__}: {exc}\n")
        return USAGE


def main() -> None:
    sys.exit(run())
