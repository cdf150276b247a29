import pytest
from hypothesis import given
from hypothesis import strategies as st

from expressive import Heap, load_registry
from expressive.binding import Delim, decode_binding, encode_binding, split_binding
from expressive.errors import (
    ArityMismatch,
    InitFailed,
    MalformedBindingName,
    ReadOnlyProperty,
    StreamExhausted,
    TypeMismatch,
    UnknownProperty,
)
from expressive.objects import copy_value, get_property, instantiate, property_access, run_inits, set_property
from expressive.stream import COMPLETE, BufStream, Prim, Refer, TypeInfo, Value, VString

SCHEMA = """\
type Gen.P value
  setter X: System.Int32
type Gen.T
  ctor label: System.String
  getter Label: System.String
  setter Where: Gen.P
  setter Count: System.Int32
  init First seq=1 returns=System.Boolean
  init Second seq=2
  default Count = 7
"""


@pytest.fixture
def reg():
    return load_registry(SCHEMA)


def test_instantiate_defaults(reg):
    """Construction fills defaults and constructor getters."""
    heap = Heap(reg)
    t = instantiate(reg.get("Gen.T"), ["a"], heap)
    assert t.identity == 1 and t["Label"] == "a" and t["Count"] == 7
    assert instantiate(reg.get("Gen.P"), [], heap).identity is None


def test_construct_checks(reg):
    """Arity and argument types are checked."""
    heap = Heap(reg)
    with pytest.raises(ArityMismatch):
        instantiate(reg.get("Gen.T"), [], heap)
    with pytest.raises(TypeMismatch):
        instantiate(reg.get("Gen.T"), [3], heap)


def test_property_access(reg):
    """Setters write, getters are read-only after construction."""
    heap = Heap(reg)
    t = instantiate(reg.get("Gen.T"), ["a"], heap)
    set_property(t, "Count", 3, heap)
    assert get_property(t, "Count") == 3 == property_access(t, "Count")
    with pytest.raises(ReadOnlyProperty):
        set_property(t, "Label", "b", heap)
    with pytest.raises(UnknownProperty):
        get_property(t, "Nope")
    with pytest.raises(TypeMismatch):
        set_property(t, "Count", "x", heap)
    with pytest.raises(ValueError):
        property_access(t, "Count", "poke")


def test_value_kind_copied_on_assignment(reg):
    """Assigning a value-kind instance stores a copy."""
    heap = Heap(reg)
    t = instantiate(reg.get("Gen.T"), ["a"], heap)
    p = instantiate(reg.get("Gen.P"), [], heap)
    set_property(t, "Where", p, heap)
    p.slots["X"] = 5
    assert t["Where"] is not p and t["Where"]["X"] == 0
    assert copy_value(t) is t


def test_inits_in_sequence_and_failure(reg):
    """Inits run in ascending order; a false flag stops the run."""
    calls = []
    hooks = {("Gen.T", "First"): lambda i: calls.append("First") or True,
             ("Gen.T", "Second"): lambda i: calls.append("Second")}
    heap = Heap(reg, hooks=hooks)
    t = instantiate(reg.get("Gen.T"), ["a"], heap)
    assert run_inits(t, heap) and calls == ["First", "Second"]
    heap.hooks[("Gen.T", "First")] = lambda i: False
    with pytest.raises(InitFailed) as info:
        run_inits(t, heap)
    assert info.value.name == "First"
    assert run_inits(t, heap, raise_on_failure=False) is False


def test_listener_events(reg):
    """The heap listener sees constructor and setter events."""
    events = []
    heap = Heap(reg, listener=lambda *e: events.append(e))
    t = instantiate(reg.get("Gen.T"), ["a"], heap)
    set_property(t, "Count", 1, heap)
    assert events == [("ctor", "Gen.T", ""), ("set", "Gen.T", "Count")]


def test_stream_fifo():
    """Items come out in insertion order with one item of look-ahead."""
    s = BufStream(COMPLETE)
    s.extend([TypeInfo("A"), VString("a", "x"), Prim("b", "System.Int32", "1")])
    assert s.next_name is None and len(s) == 3
    assert s.next() == TypeInfo("A")
    assert s.peek() == (True, "a", VString("a", "x"))
    assert list(s) == [VString("a", "x"), Prim("b", "System.Int32", "1")]
    with pytest.raises(StreamExhausted):
        s.next()
    with pytest.raises(ValueError):
        Refer("x", -1)
    assert Value("v").name == "v" and TypeInfo("T").name == ""


NAME = st.from_regex(r"[A-Za-z_][A-Za-z0-9_]{0,6}", fullmatch=True)
DELIMS = [d for d in Delim if d is not Delim.ROOT]


@given(NAME, st.lists(st.tuples(st.sampled_from(DELIMS), NAME), max_size=6))
def test_binding_round_trip(root, members):
    """Encoded binding names decode to the same segments."""
    text = root
    for d, m in members:
        text = encode_binding(d, text, m)
    b = decode_binding(text)
    assert str(b) == text
    assert list(b.segments[1:]) == members
    if members:
        assert split_binding(text) == (b.owner, members[-1][0], members[-1][1])
    else:
        assert split_binding(text) is None


@pytest.mark.parametrize("text", ["", "1a", "a..b", "a.", ".a", "a.b-c"])
def test_binding_rejects(text):
    """Malformed binding names raise."""
    with pytest.raises(MalformedBindingName):
        decode_binding(text)


def test_binding_example():
    """The example names carry the expected delimiters."""
    assert split_binding("MyExpressiveType$MyReadonly") == ("MyExpressiveType", Delim.CTOR_PARAM, "MyReadonly")
    assert split_binding("MyExpressiveType:MyIntface")[1] is Delim.INTERFACE
    assert encode_binding("*", "A", "B") == "A*B"
    with pytest.raises(MalformedBindingName):
        encode_binding(Delim.ROOT, "A", "B")
