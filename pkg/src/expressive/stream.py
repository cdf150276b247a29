"""Stream items and the in-memory expressive stream."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

from .errors import StreamExhausted


@dataclass(frozen=True)
class VString:
    name: str
    text: str


@dataclass(frozen=True)
class Prim:
    name: str
    type_name: str
    literal: str


@dataclass(frozen=True)
class Value:
    name: str


@dataclass(frozen=True)
class Refer:
    name: str
    identity: int

    def __post_init__(self) -> None:
        if self.identity < 0:
            raise ValueError("reference identity must be >= 0")


@dataclass(frozen=True)
class TypeInfo:
    type_name: str

    @property
    def name(self) -> str:
        return ""


@dataclass(frozen=True)
class IntfInfo:
    name: str
    type_name: str
    interface_name: str


StreamItem = Union[VString, Prim, Value, Refer, TypeInfo, IntfInfo]


@dataclass(frozen=True)
class StreamConfig:
    include_static: bool = True
    include_type: bool = True
    include_name: bool = True
    lang: str = "csharp"

    @property
    def complete(self) -> bool:
        return self.include_type and self.include_name


COMPLETE = StreamConfig()
SIMPLIFIED = StreamConfig(include_static=False, include_type=False, include_name=False)


class BufStream:
    """FIFO of stream items with one item of look-ahead."""

    def __init__(self, config: StreamConfig = COMPLETE, items: Iterable[StreamItem] = ()):
        self.config = config
        self._items: deque[StreamItem] = deque(items)

    @property
    def include_static(self) -> bool:
        return self.config.include_static

    @property
    def include_type(self) -> bool:
        return self.config.include_type

    @property
    def include_name(self) -> bool:
        return self.config.include_name

    def append(self, item: StreamItem) -> None:
        self._items.append(item)

    def extend(self, items: Iterable[StreamItem]) -> None:
        self._items.extend(items)

    def next(self) -> StreamItem:
        if not self._items:
            raise StreamExhausted("no more items in stream")
        return self._items.popleft()

    @property
    def has_next(self) -> bool:
        return bool(self._items)

    @property
    def next_item(self) -> StreamItem | None:
        return self._items[0] if self._items else None

    @property
    def next_name(self) -> str | None:
        item = self.next_item
        if item is None or isinstance(item, TypeInfo):
            return None
        return item.name

    def item_at(self, k: int) -> StreamItem | None:
        """The ``k``-th pending item without consuming anything."""
        return self._items[k] if k < len(self._items) else None

    def peek(self) -> tuple[bool, str | None, StreamItem | None]:
        return self.has_next, self.next_name, self.next_item

    def items(self) -> list[StreamItem]:
        """Snapshot of the pending items; the stream is not consumed."""
        return list(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __iter__(self) -> Iterator[StreamItem]:
        while self._items:
            yield self._items.popleft()

    def __repr__(self) -> str:
        return f"BufStream({self.config}, {len(self._items)} items)"
