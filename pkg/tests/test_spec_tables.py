import random
import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from expressive.spec import (
    AbstractCall,
    AccessWidening,
    CyclicInheritance,
    SpecSyntaxError,
    build_program,
    build_tables,
    chain_lookup,
    dispatch,
    fixture,
    parse_specs,
)
from expressive.spec.model import Access, Kind, UnknownSpec
from expressive.spec.tables import THIS

from hierarchies import expected_calls, random_hierarchy


def test_parse_bool_fixture():
    """The root and Bool specs parse with their rules, cases and constants."""
    specs = {s.name: s for s in parse_specs(fixture("ispec_bool"))}
    ispec, boolean = specs["ISpec"], specs["Bool"]
    assert not ispec.concrete and boolean.concrete and boolean.parents == ("ISpec",)
    assert [r.name for r in ispec.rules] == ["Self", "Reciprocal", "Reciprocal", "Mutual", "Self", "Mutual"]
    assert ispec.rules[0].attached == THIS and ispec.rules[2].is_this_other
    assert [c.name for c in boolean.constants] == ["true", "false"]
    assert [c.name for c in boolean.cases] == ["case1", "case2"]
    assert all(c.attached == "ToString() const" for c in boolean.cases)
    ctor = boolean.method("Bool(const String)")
    assert ctor.is_object and ctor.overrides == ("ISpec(const String)",)
    assert boolean.method("Bool()").delegate is not None


@pytest.mark.parametrize("text", [
    "spec A { public String F() { return 1 }",
    "spec A { public String F() { return \"x\"; }",
    "spec { }",
    "[concrete(interp)] spec A : { }",
    "spec A { public F(; }",
])
def test_syntax_errors(text):
    """Broken spec text raises SpecSyntaxError with a location."""
    with pytest.raises(SpecSyntaxError) as info:
        parse_specs(text)
    assert re.match(r"\d+:\d+: ", str(info.value))


def test_bool_cast_table():
    """(ISpec)Bool maps every ISpec signature to Bool's definition."""
    t = build_tables(parse_specs(fixture("ispec_bool")))
    rows = [(k, e.definition()) for k, e in t.cast_table("ISpec", "Bool").items()]
    assert rows == [
        ("IsEqual(const ISpec) const", "Bool Bool.IsEqual(const ISpec) const"),
        ("ToString() const", "String Bool.ToString() const"),
        ("ISpec(const String)", "Bool Bool.Bool(const String)"),
        ("ISpec(const ISpec)", "Bool Bool.Bool(const Bool)"),
        ("ISpec()", "Bool Bool.Bool()"),
        ("~ISpec()", "Void Bool.~Bool()"),
    ]
    assert list(t.parent_tables["Bool"]) == ["Bool", "ISpec"]


def test_hierarchy_dispatch():
    """B, C, D, E answer F() with B, B, D, D."""
    p = build_program(fixture("hierarchy"))
    assert [p.text(p.evaluate(f"{s}().F()")) for s in "BCDE"] == ["B.F()", "B.F()", "D.F()", "D.F()"]
    e = p.new("E")
    assert p.text(dispatch(p, e, "F()", view="B")) == "D.F()"
    assert p.text(p.evaluate("((B) E()).F()")) == "D.F()"
    assert set(p.tables.c_tables["F()"]) == {"B", "C", "D", "E"}


def test_same_specific_name_merges():
    """A diamond over one definition gives one virtual entry."""
    p = build_program(fixture("merge"))
    entry = p.tables.native["Both"]["F()"]
    assert entry.specific_name == "Base.F" and entry.kind is not Kind.ABSTRACT
    assert p.text(p.evaluate("Both().F()")) == "Base.F()"


def test_distinct_specific_names_clash():
    """Two unrelated definitions make an abstract entry that must be overridden."""
    p = build_program(fixture("clash"))
    assert p.tables.native["Clash"]["F()"].kind is Kind.ABSTRACT
    with pytest.raises(AbstractCall):
        p.evaluate("Clash().F()")
    assert p.text(p.evaluate("Fixed().F()")) == "P1.F()"


@pytest.mark.parametrize("text,error", [
    ("spec A : B { }\nspec B : A { }", CyclicInheritance),
    ("spec A : A { }", CyclicInheritance),
    ("spec A : Missing { }", UnknownSpec),
    ("spec A { }\nspec A { }", UnknownSpec),
    ("spec A { protected String F() { return \"a\"; } }\n"
     "spec B : A { [override] public String F() { return \"b\"; } }", AccessWidening),
])
def test_table_errors(text, error):
    """Inheritance cycles, unknown parents and narrowed overrides are rejected."""
    with pytest.raises(error):
        build_tables(parse_specs(text))


def test_access_is_ordered():
    """Access levels order by restrictiveness."""
    assert Access.PUBLIC < Access.PROTECTED < Access.PRIVATE


def test_test_tables_inherit():
    """A child's test table holds every parent test under the resolved key."""
    t = build_tables(parse_specs(fixture("ispec_bool")))
    parent, child = t.test_tables["ISpec"], t.test_tables["Bool"]
    for key, tests in parent.items():
        own = key if key == THIS else t.resolve("ISpec", "Bool", key)[0]
        assert all(r in child[own].rules for r in tests.rules)
        assert all(c in child[own].cases for c in tests.cases)
    assert [c.name for c in child["ToString() const"].cases] == ["case1", "case2"]
    assert {r.name for r in child[THIS].rules} == {"Self", "Exclusive"}


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_random_hierarchies_match_chain_walk(seed):
    """Table dispatch agrees with walking the parent chains."""
    p = build_program(random_hierarchy(random.Random(seed)))
    for spec, key, entry in expected_calls(p):
        assert p.tables.native[spec][key].specific_name == entry.specific_name
        name = key.split("(")[0]
        if entry.kind is Kind.ABSTRACT:
            with pytest.raises(AbstractCall):
                p.evaluate(f"{spec}().{name}()")
        else:
            assert p.text(p.evaluate(f"{spec}().{name}()")) == entry.specific_name + "()"
            for ancestor in p.tables.ancestors[spec]:
                if key in p.tables.native[ancestor]:
                    got = dispatch(p, p.new(spec), key, view=ancestor)
                    assert p.text(got) == entry.specific_name + "()"


def test_chain_lookup_unknown_key():
    """A key no spec defines resolves to nothing."""
    specs = {s.name: s for s in parse_specs(fixture("hierarchy"))}
    assert chain_lookup(specs, "E", "G()") is None
