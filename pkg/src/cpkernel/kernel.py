"""Propagation microkernel: priority queues, fixpoint loop, failure signaling.

The kernel only knows about 0-ary closures and priorities. Variables,
domains and constraints live in services built on top of it.
"""

from __future__ import annotations

import enum
from collections import deque
from functools import partial
from typing import Callable, Hashable, Iterable

# Highest priority. Q_P holds value events, Q_{P-1} trigger dispatch,
# Q_0 daemons that run whatever the outcome of a propagation.
P = 7
VALUE = P
TRIGGER = P - 1
ALWAYS = 0

Closure = Callable[[], object]


class Status(enum.Enum):
    FAILURE = 0
    SUSPEND = 1
    SUCCESS = 2


class Failure(Exception):
    """Raised by :meth:`Kernel.fail`; caught by the innermost ``tryfail``."""

    __slots__ = ()


class KernelError(RuntimeError):
    """Programming error detected by the kernel (contract violation)."""


class KernelCounters:
    __slots__ = ("propagations", "value_events", "failures")

    def __init__(self) -> None:
        self.propagations = 0
        self.value_events = 0
        self.failures = 0

    def snapshot(self) -> tuple[int, int, int]:
        return (self.propagations, self.value_events, self.failures)

    def __repr__(self) -> str:
        return (f"KernelCounters(propagations={self.propagations}, "
                f"value_events={self.value_events}, failures={self.failures})")


class Kernel:
    """The event dispatcher.

    ``queues[p]`` is the FIFO queue at priority ``p``. A bitmask of
    nonempty queues gives the highest pending priority in O(1).
    """

    def __init__(self) -> None:
        self.queues: list[deque] = [deque() for _ in range(P + 1)]
        self._mask = 0
        self._pending: set = set()
        self._handlers = 0
        self.counters = KernelCounters()
        # Number of propagate() calls so far; lets daemons tell cycles apart.
        self.cycles = 0

    # -- failure -----------------------------------------------------------

    def fail(self):
        if not self._handlers:
            raise KernelError("fail() called with no tryfail handler installed")
        self.counters.failures += 1
        raise Failure()

    def tryfail(self, b0: Callable[[], Status], b1: Callable[[], Status]) -> Status:
        self._handlers += 1
        try:
            rv = b0()
        except Failure:
            self._handlers -= 1
            return b1()
        self._handlers -= 1
        return rv

    @property
    def handler_depth(self) -> int:
        return self._handlers

    # -- scheduling ----------------------------------------------------------

    def enqueue(self, f: Closure, p: int) -> None:
        self.queues[p].append(f)
        self._mask |= 1 << p

    def schedule_closure_evt(self, entries: Iterable) -> None:
        """Enqueue every ``(f, p, key)`` entry; keyed entries already pending are skipped."""
        queues = self.queues
        pending = self._pending
        for f, p, key in entries:
            if key is not None:
                if key in pending:
                    continue
                pending.add(key)
            queues[p].append(f)
            self._mask |= 1 << p

    def schedule_value_evt(self, fs: Iterable[Callable[[object], object]], e) -> None:
        q = self.queues[VALUE]
        run = self._run_value
        for f in fs:
            q.append(partial(run, f, e))
        if q:
            self._mask |= 1 << VALUE

    def _run_value(self, f, e) -> None:
        self.counters.value_events += 1
        f(e)

    def trigger_loss_evt(self, tmap, e) -> None:
        tmap.dispatch(self, e)

    def trigger_bind_evt(self, tmap) -> None:
        tmap.dispatch_bind(self)

    def coalesced(self, key: Hashable, body: Closure, count: bool = True) -> Closure:
        """Wrap ``body`` so it runs at most once per pending schedule.

        The key stays pending while ``body`` runs, so a constraint never
        re-enqueues itself from its own updates. ``count`` tallies the run
        as a propagation (constraint bodies do, daemons do not).
        """
        counters = self.counters
        pending = self._pending

        if count:
            def run():
                counters.propagations += 1
                body()
                pending.discard(key)
        else:
            def run():
                body()
                pending.discard(key)
        return run

    def is_pending(self, key: Hashable) -> bool:
        return key in self._pending

    def clear_queues(self) -> None:
        for q in self.queues[1:]:
            q.clear()
        self._mask &= 1
        self._pending.clear()

    # -- propagation ---------------------------------------------------------

    def propagate(self) -> Status:
        self.cycles += 1
        queues = self.queues
        self._handlers += 1
        try:
            while True:
                mask = self._mask & ~1
                if not mask:
                    break
                p = mask.bit_length() - 1
                q = queues[p]
                pop = q.popleft
                # Drain Q_p until it empties or a higher queue gets work.
                above = 2 << p
                while q:
                    pop()()
                    if self._mask >= above:
                        break
                if not q:
                    self._mask &= ~(1 << p)
        except Failure:
            self._handlers -= 1
            self.clear_queues()
            self._drain_always()
            return Status.FAILURE
        self._handlers -= 1
        self._drain_always()
        return Status.SUSPEND

    def abort(self) -> None:
        """Close a cycle that failed before propagate(): drop work, run daemons."""
        self.cycles += 1
        self.clear_queues()
        self._drain_always()

    def _drain_always(self) -> None:
        # Daemons may schedule further daemons; keep going until empty.
        # A daemon has no business failing, so no handler is installed here.
        q0 = self.queues[ALWAYS]
        while q0:
            q0.popleft()()
        self._mask &= ~1

    def idle(self) -> bool:
        return not self._mask
