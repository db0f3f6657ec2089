"""Event containers dispatched by the kernel.

Closure-event lists pair closures with priorities, value-event lists hold
unary functions applied to an event payload, and trigger maps associate
closures with values so that the loss of a value wakes only its watchers.
"""

from __future__ import annotations

from typing import Callable, Hashable, Iterator, Optional

from .kernel import ALWAYS, TRIGGER, Kernel, KernelError, P


class ClosureEventList:
    """Ordered ``(closure, priority, coalescing key)`` entries."""

    __slots__ = ("entries",)

    def __init__(self) -> None:
        self.entries: list[tuple[Callable, int, Optional[Hashable]]] = []

    def insert(self, f: Callable, p: int, key: Optional[Hashable] = None) -> None:
        if not ALWAYS <= p <= P - 1:
            raise KernelError(f"closure event priority {p} outside 0..{P - 1}")
        self.entries.append((f, p, key))

    def __iter__(self) -> Iterator:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __bool__(self) -> bool:
        return bool(self.entries)


class ValueEventList:
    """Ordered unary closures receiving the event payload."""

    __slots__ = ("entries",)

    def __init__(self) -> None:
        self.entries: list[Callable] = []

    def insert(self, f: Callable) -> None:
        self.entries.append(f)

    def __iter__(self) -> Iterator:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __bool__(self) -> bool:
        return bool(self.entries)


class TriggerHandle:
    """A closure linked into at most one trigger set.

    Sets are circular doubly-linked lists threaded through the handles, so
    unlinking is O(1) and needs no lookup.
    """

    __slots__ = ("closure", "prev", "next", "owner", "value")

    def __init__(self, closure: Optional[Callable]) -> None:
        self.closure = closure
        self.prev: Optional[TriggerHandle] = None
        self.next: Optional[TriggerHandle] = None
        self.owner: Optional[TriggerMap] = None
        # Watched value, None for bind triggers.
        self.value: Optional[int] = None

    @property
    def registered(self) -> bool:
        return self.owner is not None


def _sentinel() -> TriggerHandle:
    s = TriggerHandle(None)
    s.prev = s.next = s
    return s


def _link(head: TriggerHandle, t: TriggerHandle) -> None:
    tail = head.prev
    t.prev = tail
    t.next = head
    tail.next = t
    head.prev = t


class TriggerMap:
    """Dense value -> trigger-set map over the integer range ``[low, up]``.

    A separate set holds the triggers fired on binding.
    """

    __slots__ = ("low", "up", "_slots", "_bind", "size")

    def __init__(self, low: int, up: int) -> None:
        self.low = low
        self.up = up
        self._slots: list[Optional[TriggerHandle]] = [None] * (up - low + 1)
        self._bind = _sentinel()
        # Number of value triggers currently registered (bind set excluded).
        self.size = 0

    def _head(self, w: int) -> TriggerHandle:
        if not self.low <= w <= self.up:
            raise KernelError(f"trigger value {w} outside [{self.low}, {self.up}]")
        i = w - self.low
        head = self._slots[i]
        if head is None:
            head = self._slots[i] = _sentinel()
        return head

    def add_for_value(self, f: Callable, w: int) -> TriggerHandle:
        t = TriggerHandle(f)
        self.add_trigger(t, w)
        return t

    def add_for_bind(self, f: Callable) -> TriggerHandle:
        t = TriggerHandle(f)
        _link(self._bind, t)
        t.owner = self
        return t

    def add_trigger(self, t: TriggerHandle, w: int) -> None:
        if t.owner is not None:
            raise KernelError("trigger already registered")
        _link(self._head(w), t)
        t.owner = self
        t.value = w
        self.size += 1

    def remove_trigger(self, t: TriggerHandle) -> None:
        if t.owner is not self:
            raise KernelError("trigger not registered in this map")
        t.prev.next = t.next
        t.next.prev = t.prev
        t.prev = t.next = None
        t.owner = None
        if t.value is not None:
            self.size -= 1
            t.value = None

    def triggers(self, w: int) -> list[Callable]:
        """Closures currently registered for ``w`` (empty when ``w`` is unknown)."""
        if not self.low <= w <= self.up:
            return []
        head = self._slots[w - self.low]
        out = []
        if head is not None:
            t = head.next
            while t is not head:
                out.append(t.closure)
                t = t.next
        return out

    def has(self, w: int) -> bool:
        if not self.size or not self.low <= w <= self.up:
            return False
        head = self._slots[w - self.low]
        return head is not None and head.next is not head

    def dispatch(self, kernel: Kernel, w: int) -> None:
        if not self.size or not self.low <= w <= self.up:
            return
        head = self._slots[w - self.low]
        if head is None:
            return
        t = head.next
        while t is not head:
            kernel.enqueue(t.closure, TRIGGER)
            t = t.next

    def dispatch_bind(self, kernel: Kernel) -> None:
        head = self._bind
        t = head.next
        while t is not head:
            kernel.enqueue(t.closure, TRIGGER)
            t = t.next
