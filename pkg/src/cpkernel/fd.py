"""Finite-domain integer variables on top of the kernel.

A variable owns its domain and its event lists, and schedules kernel
events on every domain change. Wipe-outs call ``fail()`` before the domain
is touched, so a domain is never observed empty.

The domain is an interval ``[min, max]`` until the first interior removal,
after which membership lives in a bitset (a Python int, bit ``i`` standing
for value ``low + i``). The whole record is trailed once per epoch.
"""

from __future__ import annotations

from typing import Callable, Iterator, Optional

from .events import ClosureEventList, TriggerHandle, TriggerMap, ValueEventList
from .kernel import P, KernelError

DEFAULT_PRIORITY = 5


def _check_priority(p: int) -> None:
    if not 0 <= p <= P - 1:
        raise KernelError(f"priority {p} outside 0..{P - 1}")


class IntDomain:
    """Domain state shared by every integer variable."""

    __slots__ = ("low", "up", "_min", "_max", "_size", "_bits", "_stamp", "_trail")

    def __init__(self, trail, low: int, up: int) -> None:
        if low > up:
            raise ValueError(f"empty initial domain [{low}, {up}]")
        self._trail = trail
        self.low = low
        self.up = up
        self._min = low
        self._max = up
        self._size = up - low + 1
        self._bits: Optional[int] = None
        self._stamp = -1

    # -- queries --------------------------------------------------------------

    def min(self) -> int:
        return self._min

    def max(self) -> int:
        return self._max

    def size(self) -> int:
        return self._size

    def bound(self) -> bool:
        return self._size == 1

    def member(self, v: int) -> bool:
        if v < self._min or v > self._max:
            return False
        bits = self._bits
        return bits is None or (bits >> (v - self.low)) & 1 == 1

    def values(self) -> Iterator[int]:
        bits = self._bits
        if bits is None:
            yield from range(self._min, self._max + 1)
            return
        low = self.low
        while bits:
            lsb = bits & -bits
            yield lsb.bit_length() - 1 + low
            bits ^= lsb

    def value_set(self) -> frozenset:
        return frozenset(self.values())

    def mask(self) -> int:
        """Membership bitset relative to ``low``."""
        bits = self._bits
        if bits is None:
            return ((1 << self._size) - 1) << (self._min - self.low)
        return bits

    def value(self) -> int:
        if self._size != 1:
            raise KernelError("value() of an unbound variable")
        return self._min

    # -- trail ----------------------------------------------------------------

    def _save(self) -> None:
        trail = self._trail
        if self._stamp != trail.magic:
            self._stamp = trail.magic
            trail.save(self, (self._min, self._max, self._size, self._bits))

    def _restore(self, saved) -> None:
        self._min, self._max, self._size, self._bits = saved

    def _materialize(self) -> int:
        bits = self._bits
        if bits is None:
            bits = ((1 << self._size) - 1) << (self._min - self.low)
        return bits


class IntVar(IntDomain):
    """Integer variable: a domain plus the min, max, bounds and bind closure
    lists, the loss value-event list and a trigger map."""

    __slots__ = ("engine", "id", "name", "_kernel", "_fail",
                 "_onmin", "_onmax", "_onbounds", "_onbind", "_onchange", "_loss", "triggers")

    def __init__(self, engine, low: int, up: int, name: Optional[str] = None) -> None:
        super().__init__(engine.trail, low, up)
        self.engine = engine
        self._kernel = engine.kernel
        self._fail = engine.kernel.fail
        self.id = -1
        self.name = name
        self._onmin = ClosureEventList()
        self._onmax = ClosureEventList()
        self._onbounds = ClosureEventList()
        self._onbind = ClosureEventList()
        self._onchange = ClosureEventList()
        self._loss = ValueEventList()
        self.triggers = TriggerMap(low, up)

    def __repr__(self) -> str:
        label = self.name if self.name is not None else f"x{self.id}"
        if self._size == 1:
            return f"{label}={self._min}"
        if self._bits is None:
            return f"{label}[{self._min}..{self._max}]"
        return f"{label}{{{','.join(map(str, self.values()))}}}"

    # -- event registration -------------------------------------------------

    def when_change_min_do(self, f: Callable, p: int = DEFAULT_PRIORITY) -> None:
        self._onmin.insert(f, p)

    def when_change_max_do(self, f: Callable, p: int = DEFAULT_PRIORITY) -> None:
        self._onmax.insert(f, p)

    def when_change_bounds_do(self, f: Callable, p: int = DEFAULT_PRIORITY) -> None:
        self._onbounds.insert(f, p)

    def when_bind_do(self, f: Callable, p: int = DEFAULT_PRIORITY) -> None:
        self._onbind.insert(f, p)

    def when_domain_change_do(self, f: Callable, p: int = DEFAULT_PRIORITY, key=None) -> None:
        """Run ``f`` after any domain change, interior removals included.

        Unlike loss events, these closures are queued at the time of the
        change, so a priority-0 closure still runs when the cycle fails.
        """
        self._onchange.insert(f, p, key)

    def when_change_min_propagate(self, c, p: int = DEFAULT_PRIORITY) -> None:
        self._onmin.insert(c._runner, p, c.id)

    def when_change_max_propagate(self, c, p: int = DEFAULT_PRIORITY) -> None:
        self._onmax.insert(c._runner, p, c.id)

    def when_change_bounds_propagate(self, c, p: int = DEFAULT_PRIORITY) -> None:
        self._onbounds.insert(c._runner, p, c.id)

    def when_bind_propagate(self, c, p: int = DEFAULT_PRIORITY) -> None:
        self._onbind.insert(c._runner, p, c.id)

    def when_lose_value_do(self, f: Callable[[int], object]) -> None:
        self._loss.insert(f)

    def when_lose_value_trigger(self, v: int, f: Callable) -> TriggerHandle:
        if not self.low <= v <= self.up:
            raise KernelError(f"trigger value {v} outside initial domain [{self.low}, {self.up}]")
        return self.triggers.add_for_value(f, v)

    def when_bind_trigger(self, f: Callable) -> TriggerHandle:
        return self.triggers.add_for_bind(f)

    # -- scheduling helpers ---------------------------------------------------

    def _schedule(self, rmin: bool, rmax: bool) -> None:
        k = self._kernel
        e = self._onchange.entries
        if e:
            k.schedule_closure_evt(e)
        if rmin:
            e = self._onmin.entries
            if e:
                k.schedule_closure_evt(e)
        if rmax:
            e = self._onmax.entries
            if e:
                k.schedule_closure_evt(e)
        e = self._onbounds.entries
        if e and (rmin or rmax):
            k.schedule_closure_evt(e)
        if self._size == 1:
            self._schedule_bind()

    def _schedule_bind(self) -> None:
        k = self._kernel
        e = self._onbind.entries
        if e:
            k.schedule_closure_evt(e)
        k.trigger_bind_evt(self.triggers)

    def _sweep(self, removed: int, descending: bool = False) -> None:
        """Emit loss events and value triggers for each value in ``removed``."""
        k = self._kernel
        loss = self._loss.entries
        tmap = self.triggers
        low = self.low
        if descending:
            while removed:
                top = removed.bit_length() - 1
                v = top + low
                if loss:
                    k.schedule_value_evt(loss, v)
                tmap.dispatch(k, v)
                removed ^= 1 << top
        else:
            while removed:
                lsb = removed & -removed
                v = lsb.bit_length() - 1 + low
                if loss:
                    k.schedule_value_evt(loss, v)
                tmap.dispatch(k, v)
                removed ^= lsb

    def _listens_to_losses(self) -> bool:
        return bool(self._loss.entries) or self.triggers.size > 0

    # -- domain updates -------------------------------------------------------

    def remove_value(self, v: int) -> None:
        if v < self._min or v > self._max:
            return
        low = self.low
        bits = self._bits
        if bits is not None and not (bits >> (v - low)) & 1:
            return
        if self._size == 1:
            self._fail()
        self._save()
        rmin = v == self._min
        rmax = v == self._max
        if bits is None:
            if rmin:
                self._min = v + 1
            elif rmax:
                self._max = v - 1
            else:
                self._bits = (((1 << self._size) - 1) << (self._min - low)) & ~(1 << (v - low))
        else:
            bits &= ~(1 << (v - low))
            self._bits = bits
            if rmin:
                self._min = (bits & -bits).bit_length() - 1 + low
            elif rmax:
                self._max = bits.bit_length() - 1 + low
        self._size -= 1
        self._schedule(rmin, rmax)
        k = self._kernel
        loss = self._loss.entries
        if loss:
            k.schedule_value_evt(loss, v)
        self.triggers.dispatch(k, v)

    def update_min(self, v: int) -> None:
        old = self._min
        if v <= old:
            return
        if v > self._max:
            self._fail()
        if self._stamp != self._trail.magic:
            self._save()
        low = self.low
        bits = self._bits
        sweep = self._loss.entries or self.triggers.size
        if bits is None:
            self._min = v
            self._size -= v - old
            if sweep:
                self._sweep(((1 << (v - old)) - 1) << (old - low))
        else:
            kept = bits & ~((1 << (v - low)) - 1)
            self._bits = kept
            self._min = (kept & -kept).bit_length() - 1 + low
            self._size = kept.bit_count()
            if sweep:
                self._sweep(bits ^ kept)
        k = self._kernel
        e = self._onchange.entries
        if e:
            k.schedule_closure_evt(e)
        e = self._onmin.entries
        if e:
            k.schedule_closure_evt(e)
        e = self._onbounds.entries
        if e:
            k.schedule_closure_evt(e)
        if self._size == 1:
            self._schedule_bind()

    def update_max(self, v: int) -> None:
        old = self._max
        if v >= old:
            return
        if v < self._min:
            self._fail()
        if self._stamp != self._trail.magic:
            self._save()
        low = self.low
        bits = self._bits
        sweep = self._loss.entries or self.triggers.size
        if bits is None:
            self._max = v
            self._size -= old - v
            if sweep:
                self._sweep(((1 << (old - v)) - 1) << (v + 1 - low), True)
        else:
            kept = bits & ((1 << (v + 1 - low)) - 1)
            self._bits = kept
            self._max = kept.bit_length() - 1 + low
            self._size = kept.bit_count()
            if sweep:
                self._sweep(bits ^ kept, True)
        k = self._kernel
        e = self._onchange.entries
        if e:
            k.schedule_closure_evt(e)
        e = self._onmax.entries
        if e:
            k.schedule_closure_evt(e)
        e = self._onbounds.entries
        if e:
            k.schedule_closure_evt(e)
        if self._size == 1:
            self._schedule_bind()

    def update_min_and_max(self, lo: int, hi: int) -> None:
        omin = self._min
        omax = self._max
        if lo < omin:
            lo = omin
        if hi > omax:
            hi = omax
        if lo == omin and hi == omax:
            return
        if lo > hi:
            self._fail()
        low = self.low
        bits = self._bits
        if bits is None:
            self._save()
            self._min = lo
            self._max = hi
            self._size = hi - lo + 1
            if self._loss.entries or self.triggers.size:
                full = ((1 << (omax - omin + 1)) - 1) << (omin - low)
                kept = ((1 << (hi - lo + 1)) - 1) << (lo - low)
                self._sweep_bounds(full ^ kept, lo)
        else:
            kept = bits & ~((1 << (lo - low)) - 1) & ((1 << (hi + 1 - low)) - 1)
            if not kept:
                self._fail()
            self._save()
            self._bits = kept
            self._min = (kept & -kept).bit_length() - 1 + low
            self._max = kept.bit_length() - 1 + low
            self._size = kept.bit_count()
            if self._loss.entries or self.triggers.size:
                self._sweep_bounds(bits ^ kept, self._min)
        self._schedule(self._min != omin, self._max != omax)

    def _sweep_bounds(self, removed: int, lo: int) -> None:
        # Values below the new min go out in increasing order, then values
        # above the new max in decreasing order, as updateMin/updateMax would.
        cut = lo - self.low
        self._sweep(removed & ((1 << cut) - 1))
        self._sweep(removed >> cut << cut, True)

    def bind(self, v: int) -> None:
        if not self.member(v):
            self._fail()
        if self._size == 1:
            return
        omin = self._min
        omax = self._max
        self._save()
        low = self.low
        if self._loss.entries or self.triggers.size:
            removed = self._materialize() & ~(1 << (v - low))
        else:
            removed = 0
        self._min = self._max = v
        self._size = 1
        self._bits = None
        self._schedule(v != omin, v != omax)
        if removed:
            self._sweep(removed)
