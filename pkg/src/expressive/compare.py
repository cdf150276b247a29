"""Recursive comparison of values and the full-expressiveness check.

Fieldwise comparison visits every slot of an instance, private fields and
non-expressive members included.  Getterwise comparison visits only the
expressive surface: setters, constructor getters and collection getters.
Slots marked ``compareignore`` are skipped by both.  When a type names a
``comparebase`` stop type, nested instances of that type are compared by
type only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

from .objects import Heap, Instance
from .types import Registry, TypeDescriptor

FIELDWISE = "fieldwise"
GETTERWISE = "getterwise"


@dataclass(frozen=True)
class DiffReport:
    path: str
    left: str
    right: str

    def __str__(self) -> str:
        return f"{self.path or '<root>'}: {self.left} != {self.right}"


def _render(v: Any) -> str:
    if isinstance(v, Instance):
        return repr(v)
    if isinstance(v, list):
        return f"[{len(v)} items]"
    if isinstance(v, dict):
        return f"{{{len(v)} pairs}}"
    return repr(v)


class _Comparer:
    def __init__(self, mode: str, tolerance: float):
        if mode not in (FIELDWISE, GETTERWISE):
            raise ValueError(f"unknown comparison mode {mode!r}")
        self.mode = mode
        self.tol = tolerance
        # pairs already entered; the first difference ends the whole comparison,
        # so every pair seen so far is either in progress or equal
        self.seen: set[tuple[int, int, str | None]] = set()

    def slots(self, desc: TypeDescriptor) -> list[tuple[str, str]]:
        """(delimiter, name) pairs in declaration order."""
        ctor = set(desc.ctor_getters)
        out = []
        for p in desc.instance_props:
            if p.compare_ignore:
                continue
            if self.mode == GETTERWISE and p not in desc.public_props:
                continue
            if p.name in ctor:
                d = "$"
            elif p.value_type.is_seq:
                d = "*"
            elif p.value_type.is_map:
                d = "@"
            else:
                d = "."
            out.append((d, p.name))
        return out

    def diff(self, a: Any, b: Any, path: str, stop: str | None) -> DiffReport | None:
        if isinstance(a, Instance) or isinstance(b, Instance):
            return self.diff_instance(a, b, path, stop)
        if isinstance(a, list) and isinstance(b, list):
            if len(a) != len(b):
                return DiffReport(path, f"{len(a)} items", f"{len(b)} items")
            for k, (x, y) in enumerate(zip(a, b)):
                r = self.diff(x, y, f"{path}[{k}]", stop)
                if r:
                    return r
            return None
        if isinstance(a, dict) and isinstance(b, dict):
            if len(a) != len(b):
                return DiffReport(path, f"{len(a)} pairs", f"{len(b)} pairs")
            for (ka, va), (kb, vb) in zip(a.items(), b.items()):
                r = self.diff(ka, kb, f"{path}@{ka!r}", stop) or \
                    self.diff(va, vb, f"{path}&{ka!r}", stop)
                if r:
                    return r
            return None
        if type(a) is not type(b) and not (_num(a) and _num(b)):
            return DiffReport(path, _render(a), _render(b))
        if isinstance(a, float) or isinstance(b, float):
            if math.isnan(a) and math.isnan(b):
                return None
            if a == b or (self.tol and abs(a - b) <= self.tol):
                return None
            return DiffReport(path, _render(a), _render(b))
        return None if a == b else DiffReport(path, _render(a), _render(b))

    def diff_instance(self, a: Any, b: Any, path: str, stop: str | None) -> DiffReport | None:
        if not (isinstance(a, Instance) and isinstance(b, Instance)):
            return DiffReport(path, _render(a), _render(b))
        da, db = a.descriptor, b.descriptor
        if da.full_name != db.full_name:
            return DiffReport(path, da.full_name, db.full_name)
        if stop is not None and da.full_name == stop:
            return None
        key = (id(a), id(b), stop)
        if key in self.seen or a is b:
            return None
        self.seen.add(key)
        inner = da.compare_base_stop or stop
        for d, name in self.slots(da):
            r = self.diff(a.slots.get(name), b.slots.get(name), f"{path}{d}{name}", inner)
            if r:
                return r
        return None


def _num(v: Any) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def fieldwise_diff(left: Any, right: Any, registry: Registry | None = None,
                   tolerance: float = 0.0) -> DiffReport | None:
    """First difference in declaration order, or ``None`` when equal."""
    return _Comparer(FIELDWISE, tolerance).diff(left, right, "", None)


def getterwise_diff(left: Any, right: Any, registry: Registry | None = None,
                    tolerance: float = 0.0) -> DiffReport | None:
    return _Comparer(GETTERWISE, tolerance).diff(left, right, "", None)


def diff(left: Any, right: Any, mode: str = GETTERWISE, tolerance: float = 0.0) -> DiffReport | None:
    return _Comparer(mode, tolerance).diff(left, right, "", None)


def is_fully_expressive(descriptor: TypeDescriptor | None, sample: Any, registry: Registry,
                        mode: str = FIELDWISE) -> tuple[bool, DiffReport | None]:
    """Clone ``sample`` through a simplified stream and compare with the source."""
    from .serializer import clone

    if descriptor is not None and not isinstance(sample, Instance):
        raise TypeError("sample must be an instance of the descriptor")
    if isinstance(sample, Instance) and descriptor is not None \
            and sample.descriptor.full_name != descriptor.full_name:
        raise TypeError(f"sample is a {sample.descriptor.full_name}, not {descriptor.full_name}")
    copy = clone(sample, registry, Heap(registry))
    report = diff(sample, copy, mode)
    return report is None, report


def alias_partition(root: Any) -> list[list[str]]:
    """Paths grouped by the heap object they reach, in first-visit order.

    Only groups with two or more paths are interesting for aliasing, but all
    groups are returned so that counts can be compared too.  Each object is
    expanded once; later paths to it are recorded without descending.
    """
    groups: dict[int, list[str]] = {}
    order: list[int] = []

    def walk(v: Any, path: str) -> None:
        if isinstance(v, Instance):
            if v.identity is not None:
                k = id(v)
                if k in groups:
                    groups[k].append(path)
                    return
                groups[k] = [path]
                order.append(k)
            for name, sv in v.slots.items():
                walk(sv, f"{path}.{name}")
        elif isinstance(v, list):
            for i, e in enumerate(v):
                walk(e, f"{path}[{i}]")
        elif isinstance(v, dict):
            for i, (k, e) in enumerate(v.items()):
                walk(k, f"{path}@{i}")
                walk(e, f"{path}&{i}")

    walk(root, "")
    return [groups[k] for k in order]
