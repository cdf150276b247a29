"""Method tables: native, cast, parent, c-tables and test tables.

Native tables are built parents first.  A child inherits the public and
protected non-constructor entries of all its parents; entries of one
signature that share a specific name collapse into one, entries that do not
become an abstract entry the child may override.  The child's own entries
always win.

``[override(X)]`` on a member maps the ancestor signature ``X`` onto the
member's own signature (the constructor and destructor case), so cast
tables are keyed by the parent's signatures but point at the child's
definitions.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from graphlib import CycleError, TopologicalSorter

from .model import (
    Access,
    AccessWidening,
    Block,
    Case,
    CyclicInheritance,
    Kind,
    MethodEntry,
    MethodSignature,
    Rule,
    SpecDefinition,
    UnknownSpec,
)

THIS = "this"


@dataclass
class TestSet:
    rules: list[Rule] = field(default_factory=list)
    cases: list[Case] = field(default_factory=list)

    __test__ = False

    def add(self, other: "TestSet") -> None:
        self.rules.extend(r for r in other.rules if all(r is not x for x in self.rules))
        self.cases.extend(c for c in other.cases if all(c is not x for x in self.cases))


@dataclass
class TableSet:
    specs: dict[str, SpecDefinition]
    order: list[str]
    ancestors: dict[str, list[str]]  # nearest first, no duplicates
    native: dict[str, dict[str, MethodEntry]]
    aliases: dict[str, dict[str, str]]  # spec -> ancestor key -> own key
    parent_tables: dict[str, dict[str, dict[str, MethodEntry]]]
    c_tables: dict[str, dict[str, MethodEntry]]
    test_tables: dict[str, dict[str, TestSet]]

    def cast_table(self, parent: str, child: str) -> dict[str, MethodEntry]:
        return self.parent_tables[child][parent]

    def conforms(self, spec: str, target: str) -> bool:
        return spec == target or target in self.ancestors.get(spec, ())

    def resolve(self, ancestor: str, spec: str, key: str) -> tuple[str | None, MethodEntry | None]:
        """Key and definition that ``ancestor``'s ``key`` reaches in ``spec``."""
        if ancestor == spec:
            return key, self.native[spec].get(key)
        for p in self.specs[spec].parents:
            if p != ancestor and ancestor not in self.ancestors[p]:
                continue
            kp, entry = self.resolve(ancestor, p, key)
            if kp is None:
                continue
            own = self.aliases[spec].get(kp, kp)
            if own in self.native[spec]:
                return own, self.native[spec][own]
            return kp, entry
        return None, None

    def concrete(self) -> list[str]:
        return [s for s in self.order if self.specs[s].concrete]


def _order(specs: dict[str, SpecDefinition]) -> list[str]:
    graph = {}
    for s in specs.values():
        for p in s.parents:
            if p not in specs:
                raise UnknownSpec(f"{s.name} derives from undefined spec {p}")
            if p == s.name:
                raise CyclicInheritance(f"{s.name} derives from itself")
        graph[s.name] = list(s.parents)
    try:
        order = list(TopologicalSorter(graph).static_order())
    except CycleError as e:
        raise CyclicInheritance(f"inheritance cycle: {' -> '.join(e.args[1])}") from None
    # keep file order where the partial order allows it
    pos = {n: i for i, n in enumerate(specs)}
    done: list[str] = []
    pending = sorted(order, key=pos.__getitem__)
    while pending:
        for n in pending:
            if all(p in done for p in specs[n].parents):
                done.append(n)
                pending.remove(n)
                break
    return done


def _ancestors(specs: dict[str, SpecDefinition], order: list[str]) -> dict[str, list[str]]:
    out: dict[str, list[str]] = {}
    for n in order:
        seen: list[str] = []
        for p in specs[n].parents:
            for a in [p, *out[p]]:
                if a not in seen:
                    seen.append(a)
        out[n] = seen
    return out


def _implicit_ctor(spec: SpecDefinition) -> MethodEntry:
    return MethodEntry(MethodSignature(spec.name), f"{spec.name}.{spec.name}", spec.name,
                       Access.PUBLIC, Kind.SPECIFIC, Block(()), spec.name, is_ctor=True,
                       line=spec.line)


def _merge_inherited(spec: SpecDefinition, native: dict[str, dict[str, MethodEntry]]
                     ) -> dict[str, MethodEntry]:
    groups: dict[str, list[MethodEntry]] = {}
    for p in spec.parents:
        for key, e in native[p].items():
            if e.is_ctor or e.is_dtor or e.access is Access.PRIVATE:
                continue
            groups.setdefault(key, []).append(e)
    table: dict[str, MethodEntry] = {}
    for key, entries in groups.items():
        access = max(e.access for e in entries)
        names = {e.specific_name for e in entries}
        first = entries[0]
        if len(names) == 1:
            table[key] = first if first.access == access else replace(first, access=access)
        else:
            table[key] = MethodEntry(first.signature, f"{spec.name}.{first.signature.name}",
                                     first.returns, access, Kind.ABSTRACT, None, spec.name,
                                     is_static=first.is_static, line=spec.line)
    return table


def build_tables(specs: list[SpecDefinition] | dict[str, SpecDefinition]) -> TableSet:
    if not isinstance(specs, dict):
        by_name: dict[str, SpecDefinition] = {}
        for s in specs:
            if s.name in by_name:
                raise UnknownSpec(f"spec {s.name} defined twice")
            by_name[s.name] = s
        specs = by_name
    order = _order(specs)
    ancestors = _ancestors(specs, order)
    native: dict[str, dict[str, MethodEntry]] = {}
    aliases: dict[str, dict[str, str]] = {}
    for n in order:
        spec = specs[n]
        table = _merge_inherited(spec, native)
        alias: dict[str, str] = {}
        own = list(spec.methods)
        if not any(m.is_ctor for m in own):
            own.append(_implicit_ctor(spec))
        for m in own:
            replaced = [table[m.key]] if m.key in table else []
            for k in m.overrides:
                alias[k] = m.key
                for a in ancestors[n]:
                    if k in native[a]:
                        replaced.append(native[a][k])
                        break
                else:
                    raise UnknownSpec(f"{m.definition()} overrides {k}, which no parent of {n} has")
            for old in replaced:
                if m.access < old.access:
                    raise AccessWidening(f"{m.definition()} widens {old.definition()} "
                                         f"from {old.access.name.lower()} to {m.access.name.lower()}")
            table[m.key] = m
        native[n] = table
        aliases[n] = alias
    ts = TableSet(specs, order, ancestors, native, aliases, {}, {}, {})
    for n in order:
        rows = {n: native[n]}
        for a in ancestors[n]:
            rows[a] = {k: ts.resolve(a, n, k)[1] for k in native[a]}
        ts.parent_tables[n] = rows
        for key, e in native[n].items():
            if e.is_ctor or e.is_dtor or e.kind is Kind.SPECIFIC:
                continue
            ts.c_tables.setdefault(key, {})[n] = e
    for n in order:
        ts.test_tables[n] = _test_table(ts, n)
    return ts


def _test_table(ts: TableSet, n: str) -> dict[str, TestSet]:
    out: dict[str, TestSet] = {}
    for owner in [*reversed(ts.ancestors[n]), n]:
        spec = ts.specs[owner]
        for rule in spec.rules:
            attached = rule.attached
            if attached != THIS and attached not in ts.native[owner] \
                    and attached + " const" in ts.native[owner]:
                attached += " const"  # a rule may name a const method without "const"
            key = THIS if attached == THIS else ts.resolve(owner, n, attached)[0]
            if key is not None:
                out.setdefault(key, TestSet()).rules.append(rule)
        for case in spec.cases:
            key = ts.resolve(owner, n, case.attached)[0]
            if key is not None:
                out.setdefault(key, TestSet()).cases.append(case)
    return out


def chain_lookup(specs: dict[str, SpecDefinition], spec: str, key: str) -> MethodEntry | None:
    """Reference lookup by walking parent chains; used as the dispatch oracle.

    Returns an abstract placeholder when parents disagree on the definition.
    """
    s = specs[spec]
    for m in s.methods:
        if m.key == key:
            return m
    found: list[MethodEntry] = []
    for p in s.parents:
        e = chain_lookup(specs, p, key)
        if e is not None and e.access is not Access.PRIVATE and not e.is_ctor:
            found.append(e)
    if not found:
        return None
    if len({e.specific_name for e in found}) == 1:
        return found[0]
    return MethodEntry(found[0].signature, f"{spec}.{found[0].signature.name}",
                       found[0].returns, kind=Kind.ABSTRACT, owner=spec)
