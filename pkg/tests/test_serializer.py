import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from expressive import (
    COMPLETE,
    SIMPLIFIED,
    BufStream,
    Heap,
    Session,
    StreamConfig,
    clear_session,
    clone,
    deserialize,
    deserialize_static,
    load_registry,
    serialize,
    serialize_static,
)
from expressive.compare import alias_partition, diff
from expressive.errors import (
    InterfaceSetMismatch,
    MalformedBindingName,
    MalformedStream,
    NonExpressiveValue,
    UnknownType,
)
from expressive.literal import load_data
from expressive.objects import instantiate
from expressive.stream import IntfInfo, Prim, Refer, TypeInfo, Value, VString

from graphs import CONFIGS, ENCODINGS, encode_decode, random_graph, registry

STATIC_SCHEMA = """\
type Gen.S
  static setter Total: System.Int32
  static setter Title: System.String
  static getter Names: seq<System.String>
  setter A: System.Int32
"""


@pytest.fixture
def sample(sample_schema, sample_data):
    reg = load_registry(sample_schema)
    heap = Heap(reg)
    value, name, _ = load_data(sample_data, reg, heap)
    return reg, heap, value, name


def test_complete_stream_items(sample):
    """The complete stream carries type, interface and name bindings."""
    reg, heap, value, name = sample
    s = BufStream(COMPLETE)
    serialize(s, value, name, reg, heap=heap)
    assert s.items() == [
        TypeInfo("UnitTest.MyExpressiveType"),
        IntfInfo("MyExpressiveType:MyIntface", "UnitTest.MyExpressiveType", "UnitTest.MyIntface"),
        Refer("MyExpressiveType", 1),
        Prim("MyExpressiveType.MyValue", "System.Int32", "6789"),
        Prim("MyExpressiveType$MyReadonly", "System.Double", "12345"),
        Prim("MyExpressiveType*MyCollection", "System.Double", "0.123"),
        Prim("MyExpressiveType*MyCollection", "System.Double", "456.7"),
        Prim("MyExpressiveType*MyCollection", "System.Double", "890"),
    ]


def test_simplified_stream_items(sample):
    """The simplified stream drops names and counts its collections."""
    reg, heap, value, _ = sample
    s = BufStream(SIMPLIFIED)
    serialize(s, value, "", reg, heap=heap)
    items = s.items()
    assert all(i.name == "" for i in items)
    assert Prim("", "System.Int32", "3") in items
    assert not any(isinstance(i, IntfInfo) for i in items)


@pytest.mark.parametrize("config", [COMPLETE, SIMPLIFIED])
def test_sample_round_trip(sample, config):
    """The example value survives both formats."""
    reg, heap, value, name = sample
    s = BufStream(config)
    serialize(s, value, name if config.include_name else "", reg, heap=heap)
    copy, desc, _ = deserialize(s, reg, heap=Heap(reg), descriptor=value.descriptor)
    assert desc is value.descriptor
    assert diff(value, copy, "getterwise") is None


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from(sorted(CONFIGS)), st.sampled_from(ENCODINGS))
def test_random_graph_round_trip(seed, config, via):
    """Random graphs come back fieldwise equal with the same aliasing."""
    reg = registry()
    heap = Heap(reg)
    value, _ = random_graph(random.Random(seed), reg, heap, max_nodes=20)
    copy = encode_decode(value, reg, heap, via, CONFIGS[config])
    assert diff(value, copy, "fieldwise") is None
    assert [len(g) for g in alias_partition(value)] == [len(g) for g in alias_partition(copy)]


@given(st.one_of(
    st.tuples(st.just("System.Int32"), st.integers(-2**31, 2**31 - 1)),
    st.tuples(st.just("System.Double"), st.floats(allow_nan=False)),
    st.tuples(st.just("System.String"), st.text()),
    st.tuples(st.just("seq<System.Int64>"), st.lists(st.integers(-2**63, 2**63 - 1))),
    st.tuples(st.just("map<System.String,System.Boolean>"), st.dictionaries(st.text(), st.booleans())),
))
def test_top_level_values_clone(case):
    """Primitives and collections clone through their declared type."""
    t, value = case
    reg = load_registry("")
    for config in (COMPLETE, SIMPLIFIED):
        assert clone(value, reg, value_type=t, config=config) == value


def test_shared_session_refers_back(sample):
    """A second write of the same object in one session is only a reference."""
    reg, heap, value, name = sample
    session = Session()
    s = BufStream(COMPLETE)
    serialize(s, value, name, reg, session=session, heap=heap)
    n = len(s)
    serialize(s, value, name, reg, session=session, heap=heap)
    assert s.items()[n:] == [Refer(name, 1)]
    clear_session(session)
    serialize(s, value, name, reg, session=session, heap=heap)
    assert len(s) > n + 1


def _statics():
    reg = load_registry(STATIC_SCHEMA)
    heap = Heap(reg)
    d = reg.get("Gen.S")
    slots = heap.static_slots(d)
    slots.update(Total=4, Title="t")
    slots["Names"].extend(["q", "r"])
    return reg, heap, d


@pytest.mark.parametrize("config", [COMPLETE, StreamConfig(include_type=False)])
def test_statics_travel_with_first_occurrence(config):
    """Static members are written once and applied on read."""
    reg, heap, d = _statics()
    v = instantiate(d, [], heap)
    s = BufStream(config)
    serialize(s, [v, v], "root", reg, heap=heap, value_type="seq<Gen.S>")
    assert sum(isinstance(i, Prim) and i.name == "Gen.S.Total" for i in s.items()) == 1
    other = Heap(reg)
    copy, _, _ = deserialize(s, reg, heap=other, value_type="seq<Gen.S>")
    assert copy[0] is copy[1]
    assert other.statics["Gen.S"] == {"Total": 4, "Title": "t", "Names": ["q", "r"]}


@pytest.mark.parametrize("config", [COMPLETE, SIMPLIFIED])
def test_static_only_stream(config):
    """serialize_static and deserialize_static move the type-level values alone."""
    reg, heap, d = _statics()
    s = BufStream(config)
    serialize_static(s, d, reg, heap)
    other = Heap(reg)
    deserialize_static(s, d, reg, other)
    assert other.statics["Gen.S"]["Names"] == ["q", "r"]
    assert len(s) == 0


def test_interface_mismatch(sample):
    """A stream whose interfaces differ from the declaration is rejected."""
    reg, heap, value, name = sample
    s = BufStream(COMPLETE)
    serialize(s, value, name, reg, heap=heap)
    items = [i for i in s.items() if not isinstance(i, IntfInfo)]
    with pytest.raises(InterfaceSetMismatch):
        deserialize(BufStream(COMPLETE, items), reg, heap=Heap(reg))


def test_unknown_stream_type():
    """A type the registry lacks is reported."""
    s = BufStream(COMPLETE, [TypeInfo("Gen.Nope"), Refer("x", 1)])
    with pytest.raises(UnknownType):
        deserialize(s, load_registry(""))


def test_truncated_stream(sample):
    """A stream that ends inside a record is malformed."""
    reg, heap, value, _ = sample
    s = BufStream(SIMPLIFIED)
    serialize(s, value, "", reg, heap=heap)
    with pytest.raises(MalformedStream):
        deserialize(BufStream(SIMPLIFIED, s.items()[:4]), reg, heap=Heap(reg))


def test_undeclared_collection_rejected():
    """A collection without a declared type cannot be written."""
    with pytest.raises(NonExpressiveValue):
        serialize(BufStream(COMPLETE), [1, 2], "x", load_registry(""))


def test_strings_and_nulls():
    """Null references and strings with delimiters survive."""
    reg = registry()
    heap = Heap(reg)
    n = instantiate(reg.get("Gen.Node"), [None], heap)
    n.slots["Tags"] = ["a;b", None, "", "\t\n\\"]
    copy = clone(n, reg, config=COMPLETE)
    assert copy["Label"] is None and copy["Tags"] == n["Tags"]
    s = BufStream(COMPLETE)
    serialize(s, n, "n", reg, heap=heap)
    assert Refer("n$Label", 0) in s.items() and VString("n*Tags", "a;b") not in s.items()
    assert any(isinstance(i, Value) for i in s.items())


@pytest.mark.parametrize("bad", ["1root", "root.", "a b", "root*"])
def test_bad_root_name(bad):
    """A root name that is not a binding name is rejected before anything is written."""
    reg = registry()
    heap = Heap(reg)
    node = instantiate(reg.get("Gen.Node"), ["x"], heap)
    s = BufStream(COMPLETE)
    with pytest.raises(MalformedBindingName):
        serialize(s, node, bad, reg, heap=heap)
    assert s.items() == []
