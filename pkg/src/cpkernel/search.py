"""Depth-first explorer: label/diff through ``enforce``, ``tryall``,
solution enumeration and branch-and-bound.

The search is plain recursion over the labeling procedure. ``tryall``
runs each alternative followed by the rest of the search (its ``then``
continuation) between a trail checkpoint and a backtrack.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .fd import IntVar
from .informers import Informer
from .kernel import Status


class SearchFailure(Exception):
    """The current branch is dead; the enclosing choice point backtracks."""


class _StopSearch(Exception):
    pass


@dataclass
class SearchStats:
    choices: int = 0
    failures: int = 0
    solutions: int = 0


@dataclass(frozen=True)
class ObjectiveValueInt:
    value: int
    minimize: bool = True

    def compare(self, other: "ObjectiveValueInt") -> int:
        """Negative when ``self`` is better than ``other``, 0 on ties."""
        if other.minimize != self.minimize:
            raise ValueError("objective values from different directions")
        d = self.value - other.value
        if not self.minimize:
            d = -d
        return (d > 0) - (d < 0)

    def best(self, other: "ObjectiveValueInt") -> "ObjectiveValueInt":
        return self if self.compare(other) <= 0 else other


class Objective:
    """Bound on an objective variable, tightened inside every ``enforce``."""

    def __init__(self, x: IntVar, minimize: bool = True) -> None:
        self.x = x
        self.minimize = minimize
        self.best: Optional[int] = None

    def tighten(self) -> None:
        if self.best is None:
            return
        if self.minimize:
            self.x.update_max(self.best - 1)
        else:
            self.x.update_min(self.best + 1)

    def record(self) -> None:
        v = self.x.value()
        if self.best is None or (v < self.best if self.minimize else v > self.best):
            self.best = v

    def value(self) -> Optional[ObjectiveValueInt]:
        return None if self.best is None else ObjectiveValueInt(self.best, self.minimize)


Search = Callable[["Solver", Callable[[], None]], None]


class Solver:
    """Explorer bound to one engine.

    ``label`` and ``diff`` post a decision through ``engine.enforce`` and
    notify their informers. A failed decision raises :class:`SearchFailure`.
    """

    def __init__(self, engine) -> None:
        self.engine = engine
        self.trail = engine.trail
        self.stats = SearchStats()
        self.return_label = Informer()
        self.fail_label = Informer()
        self.return_diff = Informer()
        self.fail_diff = Informer()
        self._fail_base = engine.counters.failures
        self.root_status = Status.SUSPEND

    def _sync(self) -> None:
        self.stats.failures = self.engine.counters.failures - self._fail_base

    def fail(self):
        raise SearchFailure()

    def label(self, x: IntVar, v: int) -> Status:
        status = self.engine.enforce(lambda: x.bind(v))
        if status is Status.FAILURE:
            self.fail_label.notify_with(x, v)
            raise SearchFailure()
        self.return_label.notify_with(x, v)
        return status

    def diff(self, x: IntVar, v: int) -> Status:
        status = self.engine.enforce(lambda: x.remove_value(v))
        if status is Status.FAILURE:
            self.fail_diff.notify_with(x, v)
            raise SearchFailure()
        self.return_diff.notify_with(x, v)
        return status

    def tryall(self, values: Iterable[int], body: Callable[[int], object],
               filter: Optional[Callable[[int], bool]] = None,
               on_failure: Optional[Callable[[int], object]] = None,
               then: Optional[Callable[[], object]] = None) -> None:
        """Try ``body(v)`` and then ``then()`` for every candidate ``v``.

        Each branch runs between a checkpoint and a backtrack. After a
        branch fails, ``on_failure(v)`` runs at the parent level, so its
        effects persist into the remaining branches. Running out of
        candidates fails the enclosing choice point.
        """
        trail = self.trail
        stats = self.stats
        for v in values:
            if filter is not None and not filter(v):
                continue
            cp = trail.push_checkpoint()
            stats.choices += 1
            failed = False
            try:
                body(v)
                if then is not None:
                    then()
            except SearchFailure:
                failed = True
            finally:
                trail.backtrack_to(cp)
            if failed and on_failure is not None:
                on_failure(v)
        raise SearchFailure()

    # -- drivers ----------------------------------------------------------------

    def _run(self, search: Search, leaf: Callable[[], None]) -> None:
        if self.root_status is Status.FAILURE:
            return
        limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(limit, 100_000))
        cp = self.trail.push_checkpoint()
        try:
            search(self, leaf)
        except (SearchFailure, _StopSearch):
            pass
        finally:
            self.trail.backtrack_to(cp)
            sys.setrecursionlimit(limit)
            self._sync()

    def solve_all(self, search: Search, xs: Sequence[IntVar],
                  on_solution: Optional[Callable[[list[int]], object]] = None) -> SearchStats:
        """Explore the whole tree; ``on_solution`` receives the values of ``xs``."""
        def leaf():
            if all(x.bound() for x in xs):
                self.stats.solutions += 1
                if on_solution is not None:
                    on_solution([x.min() for x in xs])

        self._run(search, leaf)
        return self.stats

    def solve_first(self, search: Search, xs: Sequence[IntVar]) -> Optional[list[int]]:
        found: list[list[int]] = []

        def leaf():
            if all(x.bound() for x in xs):
                self.stats.solutions += 1
                found.append([x.min() for x in xs])
                raise _StopSearch()

        self._run(search, leaf)
        return found[0] if found else None

    def minimize(self, x: IntVar, search: Search, maximize: bool = False,
                 on_solution: Optional[Callable[[int], object]] = None) -> Optional[ObjectiveValueInt]:
        """Branch and bound: every solution tightens the bound for the rest of the search."""
        return self.optimize(Objective(x, minimize=not maximize), search, on_solution)

    def optimize(self, objective: Optional[Objective], search: Search,
                 on_solution: Optional[Callable[[int], object]] = None) -> Optional[ObjectiveValueInt]:
        """Branch and bound on ``objective`` (default: the engine's installed one)."""
        if objective is None:
            objective = self.engine.objective
        if objective is None:
            raise ValueError("no objective to optimize")
        x = objective.x
        saved = self.engine.objective
        self.engine.set_objective(objective)

        def leaf():
            if x.bound():
                objective.record()
                self.stats.solutions += 1
                if on_solution is not None:
                    on_solution(objective.best)

        try:
            self._run(search, leaf)
        finally:
            self.engine.set_objective(saved)
        return objective.value()


# -- labeling procedures --------------------------------------------------------

def label_static(xs: Sequence[IntVar], decreasing: bool = False, with_diff: bool = False) -> Search:
    """Variables in the given order, values in increasing (or decreasing) order."""
    xs = list(xs)
    n = len(xs)

    def search(solver: Solver, leaf: Callable[[], None]) -> None:
        def step(i: int) -> None:
            while i < n and xs[i].bound():
                i += 1
            if i == n:
                leaf()
                return
            x = xs[i]
            vals = list(x.values())
            if decreasing:
                vals.reverse()
            solver.tryall(vals, lambda v: solver.label(x, v), filter=x.member,
                          on_failure=(lambda v: solver.diff(x, v)) if with_diff else None,
                          then=lambda: step(i + 1))

        step(0)

    return search


def label_with(select: Callable[[], Optional[IntVar]], decreasing: bool = False) -> Search:
    """Dynamic variable selection: ``select()`` returns the next unbound variable or None."""

    def search(solver: Solver, leaf: Callable[[], None]) -> None:
        def step() -> None:
            x = select()
            if x is None:
                leaf()
                return
            vals = list(x.values())
            if decreasing:
                vals.reverse()
            solver.tryall(vals, lambda v: solver.label(x, v), filter=x.member, then=step)

        step()

    return search
