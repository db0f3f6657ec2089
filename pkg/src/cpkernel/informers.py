"""Publish-subscribe informers and impact-based search built on them."""

from __future__ import annotations

import math
from typing import Callable, Iterable, Optional, Sequence

from .fd import IntVar
from .kernel import ALWAYS
from .trail import TrailedInt


class Informer:
    """Delivers notifications to ``once`` and ``always`` subscribers.

    Delivery is synchronous, in the notifying thread. Subscribers added
    while a notification is being delivered only see later notifications.
    """

    def __init__(self) -> None:
        self._once: list[Callable] = []
        self._always: list[Callable] = []

    def when_notified_do(self, f: Callable) -> None:
        self._once.append(f)

    def whenever_notified_do(self, f: Callable) -> None:
        self._always.append(f)

    def notify_with(self, *payload) -> None:
        always = tuple(self._always)
        once = self._once
        self._once = []
        for f in always:
            f(*payload)
        for f in once:
            f(*payload)

    def __len__(self) -> int:
        return len(self._once) + len(self._always)


class StatisticsMonitor:
    """Tracks the log search-space size ``sum(log |D(x)|)`` incrementally.

    Every variable gets a keyed priority-0 daemon, scheduled by any change
    to its domain. The daemon folds the variable's new log size into the
    running total, so each propagation costs work linear in the number of
    variables it touched. Cached sizes live on the trail.
    """

    def __init__(self, engine, xs: Sequence[IntVar]) -> None:
        self.engine = engine
        self.xs = list(xs)
        self._trail = engine.trail
        self._logsize = {x.id: TrailedInt(math.log(x.size())) for x in self.xs}
        self._epoch = -1
        self._log_reduction = 0.0
        for x in self.xs:
            key = ("monitor", id(self), x.id)
            daemon = engine.kernel.coalesced(key, self._daemon(x), count=False)
            x.when_domain_change_do(daemon, ALWAYS, key)

    def _daemon(self, x: IntVar):
        cell = self._logsize[x.id]
        kernel = self.engine.kernel
        trail = self._trail

        def run():
            new = math.log(x.size())
            delta = new - cell.value
            if delta:
                if self._epoch != kernel.cycles:
                    self._epoch = kernel.cycles
                    self._log_reduction = 0.0
                self._log_reduction += delta
                trail.assign(cell, new)

        return run

    def log_reduction(self) -> float:
        """log(S_after / S_before) for the most recent propagation (0 when nothing moved)."""
        if self._epoch != self.engine.kernel.cycles:
            return 0.0
        return self._log_reduction

    def reduction(self) -> float:
        return math.exp(self.log_reduction())

    def log_size(self) -> float:
        return math.fsum(c.value for c in self._logsize.values())


class ImpactTable:
    """Running mean of impacts per (variable id, value)."""

    def __init__(self) -> None:
        self._stats: dict[tuple[int, int], list] = {}

    def add_impact(self, var_id: int, value: int, impact: float) -> None:
        entry = self._stats.get((var_id, value))
        if entry is None:
            self._stats[(var_id, value)] = [1, impact]
        else:
            entry[0] += 1
            entry[1] += (impact - entry[1]) / entry[0]

    def impact(self, var_id: int, value: int) -> float:
        entry = self._stats.get((var_id, value))
        return 0.0 if entry is None else entry[1]

    def count(self, var_id: int, value: int) -> int:
        entry = self._stats.get((var_id, value))
        return 0 if entry is None else entry[0]

    def items(self):
        return ((k, v[1]) for k, v in self._stats.items())


class IBS:
    """Impact-based search: impacts are learned from labeling notifications."""

    def __init__(self, solver, xs: Sequence[IntVar]) -> None:
        self.solver = solver
        self.xs = list(xs)
        self.monitor = StatisticsMonitor(solver.engine, self.xs)
        self.impacts = ImpactTable()
        solver.return_label.whenever_notified_do(self.on_label_success)
        solver.fail_label.whenever_notified_do(self.on_label_failure)

    def on_label_success(self, x: IntVar, v: int) -> None:
        self.impacts.add_impact(x.id, v, 1.0 - self.monitor.reduction())

    def on_label_failure(self, x: IntVar, v: int) -> None:
        self.impacts.add_impact(x.id, v, 1.0)

    def score(self, x: IntVar) -> float:
        imp = self.impacts.impact
        return sum(imp(x.id, v) for v in x.values())

    def select_variable(self, xs: Optional[Iterable[IntVar]] = None) -> Optional[IntVar]:
        best = None
        best_score = -1.0
        for x in (self.xs if xs is None else xs):
            if x.bound():
                continue
            s = self.score(x)
            if s > best_score or (s == best_score and x.id < best.id):
                best, best_score = x, s
        return best
