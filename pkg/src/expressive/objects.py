"""Runtime values: instances, the heap that owns them, and property access.

Primitive values are plain Python objects (``str``, ``int``, ``float``,
``bool``); sequences are lists and keyed collections are dicts.  Heap objects
are :class:`Instance` objects carrying a positive identity; ``None`` is the
null reference.
"""

from __future__ import annotations

from typing import Any, Callable, Sequence

from .errors import (
    ArityMismatch,
    InitFailed,
    ReadOnlyProperty,
    TypeMismatch,
    UnknownProperty,
)
from .types import PropertyDescriptor, Registry, TypeDescriptor

InitHook = Callable[["Instance"], Any]
Listener = Callable[[str, str, str], None]


class Instance:
    """One object of a declared type.  Equality is identity."""

    __slots__ = ("descriptor", "slots", "identity", "constructed", "__weakref__")

    def __init__(self, descriptor: TypeDescriptor, identity: int | None = None):
        self.descriptor = descriptor
        self.slots: dict[str, Any] = {}
        self.identity = identity
        self.constructed = False

    @property
    def type_name(self) -> str:
        return self.descriptor.full_name

    def __getitem__(self, name: str) -> Any:
        return self.slots[name]

    def __repr__(self) -> str:
        ident = f"#{self.identity}" if self.identity is not None else ""
        return f"<{self.descriptor.short_name}{ident}>"


class Heap:
    """Owner of heap identities, static storage and host callbacks.

    ``hooks`` maps ``(type name, init method)`` to a callable taking the
    instance.  ``listener`` receives ``(event, type name, member)`` for
    ``ctor``, ``set``, ``init``, ``populate`` and ``static`` events.
    """

    def __init__(self, registry: Registry | None = None,
                 hooks: dict[tuple[str, str], InitHook] | None = None,
                 listener: Listener | None = None):
        self.registry = registry if registry is not None else Registry()
        self.hooks = dict(hooks or {})
        self.listener = listener
        self._next = 0
        self.instances: dict[int, Instance] = {}
        self.statics: dict[str, dict[str, Any]] = {}
        self.static_applied: set[str] = set()
        self.interfaces_checked: set[str] = set()
        self._templates: dict[str, tuple[dict[str, Any], tuple[PropertyDescriptor, ...]]] = {}

    def emit(self, event: str, type_name: str, member: str = "") -> None:
        if self.listener is not None:
            self.listener(event, type_name, member)

    def new_shell(self, descriptor: TypeDescriptor) -> Instance:
        """An unconstructed instance; heap kinds get their identity now."""
        ident = None
        if not descriptor.is_value:
            self._next += 1
            ident = self._next
        inst = Instance(descriptor, ident)
        if ident is not None:
            self.instances[ident] = inst
        return inst

    def initial_slots(self, descriptor: TypeDescriptor) -> dict[str, Any]:
        """Fresh instance slots, in declaration order, holding defaults or zeros."""
        entry = self._templates.get(descriptor.full_name)
        if entry is None or entry[1] is not descriptor.instance_props:
            props = descriptor.instance_props
            fixed = {p.name: _initial(self.registry, p) for p in props if not p.value_type.is_collection}
            entry = self._templates[descriptor.full_name] = (fixed, props)
        fixed = entry[0]
        return {p.name: fixed[p.name] if p.name in fixed else _initial(self.registry, p)
                for p in entry[1]}

    def static_slots(self, descriptor: TypeDescriptor) -> dict[str, Any]:
        slots = self.statics.get(descriptor.full_name)
        if slots is None:
            slots = {p.name: _initial(self.registry, p) for p in descriptor.statics}
            self.statics[descriptor.full_name] = slots
        return slots


def _initial(registry: Registry, p: PropertyDescriptor) -> Any:
    if p.default_literal is not None:
        return registry.parse_literal(p.value_type.name, p.default_literal)
    return registry.zero_value(p.value_type)


def copy_value(value: Any) -> Any:
    """Assignment semantics: value-kind instances and collections are copied."""
    if isinstance(value, Instance) and value.descriptor.is_value:
        dup = Instance(value.descriptor)
        dup.slots = {k: copy_value(v) for k, v in value.slots.items()}
        dup.constructed = value.constructed
        return dup
    return value


def construct(shell: Instance, ctor_args: Sequence[Any], heap: Heap) -> Instance:
    """Run the constructor on ``shell``: default slots, then parameters."""
    desc = shell.descriptor
    params = desc.constructor_params
    if len(ctor_args) != len(params):
        raise ArityMismatch(f"{desc.full_name} takes {len(params)} constructor arguments, "
                            f"got {len(ctor_args)}")
    reg = heap.registry
    for c, arg in zip(params, ctor_args):
        if not reg.check_value(c.value_type, arg):
            raise TypeMismatch(f"{desc.full_name}({c.param}): {arg!r} is not {c.value_type}")
    shell.slots = heap.initial_slots(desc)
    for c, arg in zip(params, ctor_args):
        shell.slots[c.getter] = copy_value(arg)
    shell.constructed = True
    heap.emit("ctor", desc.full_name)
    return shell


def instantiate(descriptor: TypeDescriptor, ctor_args: Sequence[Any], heap: Heap) -> Instance:
    """Create and construct a new instance.  Init methods are not run."""
    return construct(heap.new_shell(descriptor), ctor_args, heap)


def run_inits(instance: Instance, heap: Heap, raise_on_failure: bool = True) -> bool:
    """Call the init methods in ascending sequence; stop at the first ``False``."""
    desc = instance.descriptor
    for init in desc.inits:
        hook = heap.hooks.get((desc.full_name, init.name))
        result = hook(instance) if hook is not None else True
        heap.emit("init", desc.full_name, init.name)
        if init.returns_success_flag and result is False:
            if raise_on_failure:
                raise InitFailed(init.name, desc.full_name)
            return False
    return True


def _prop(instance: Instance, name: str) -> PropertyDescriptor:
    p = instance.descriptor.prop(name)
    if p is None:
        raise UnknownProperty(f"{instance.descriptor.full_name} has no property {name!r}")
    return p


def get_property(instance: Instance, name: str) -> Any:
    _prop(instance, name)
    return instance.slots[name]


def set_property(instance: Instance, name: str, value: Any, heap: Heap | None = None,
                 check: bool = True) -> None:
    """Assign through the setter; ``check=False`` skips the type check for values
    already validated against the same slot."""
    p = _prop(instance, name)
    desc = instance.descriptor
    if not p.is_field and not p.has_setter and instance.constructed:
        raise ReadOnlyProperty(f"{desc.full_name}.{name} is read-only")
    registry = heap.registry if heap is not None else None
    if check and registry is not None and not registry.check_value(p.value_type, value):
        raise TypeMismatch(f"{desc.full_name}.{name}: {value!r} is not {p.value_type}")
    instance.slots[name] = copy_value(value)
    if heap is not None:
        heap.emit("set", desc.full_name, name)


def property_access(instance: Instance, name: str, mode: str = "get", value: Any = None,
                    heap: Heap | None = None) -> Any:
    if mode == "get":
        return get_property(instance, name)
    if mode == "set":
        set_property(instance, name, value, heap)
        return None
    raise ValueError(f"mode must be 'get' or 'set', not {mode!r}")
