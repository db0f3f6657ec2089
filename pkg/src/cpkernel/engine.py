"""The constraint-programming engine: kernel + trail + constraint store."""

from __future__ import annotations

from typing import Callable, Optional

from .fd import IntVar
from .kernel import Kernel, Status
from .trail import Trail


class Constraint:
    """Base class for propagators.

    Subclasses implement ``post``. Constraint-based propagators also
    implement ``propagate`` and register ``self`` through the
    ``when_*_propagate`` methods of their variables.
    """

    id: int = -1
    engine: "Engine"
    _runner: Optional[Callable] = None

    def post(self) -> None:
        raise NotImplementedError

    def propagate(self) -> None:
        raise NotImplementedError(f"{type(self).__name__} has no propagate body")

    def __repr__(self) -> str:
        return f"{type(self).__name__}#{self.id}"


class Engine:
    """Registers variables and constraints and runs closures to a fixpoint."""

    def __init__(self) -> None:
        self.kernel = Kernel()
        self.trail = Trail()
        self.vars: list[IntVar] = []
        self.constraints: list[Constraint] = []
        self.objective = None

    @property
    def counters(self):
        return self.kernel.counters

    def int_var(self, low: int, up: int, name: Optional[str] = None) -> IntVar:
        x = IntVar(self, low, up, name)
        x.id = len(self.vars)
        self.vars.append(x)
        return x

    def bool_var(self, name: Optional[str] = None) -> IntVar:
        return self.int_var(0, 1, name)

    def fail(self):
        self.kernel.fail()

    def add(self, c: Constraint) -> Status:
        """Post ``c`` and propagate. The post run counts as one propagation."""
        c.id = len(self.constraints)
        c.engine = self
        c._runner = self.kernel.coalesced(c.id, c.propagate)
        self.constraints.append(c)
        self.kernel.counters.propagations += 1
        return self.enforce(c.post)

    def set_objective(self, objective) -> None:
        self.objective = objective

    def enforce(self, body: Callable[[], object]) -> Status:
        """Run ``body`` then propagate; a failure in either yields FAILURE."""
        k = self.kernel
        objective = self.objective

        def run():
            body()
            if objective is not None:
                objective.tighten()
            return Status.SUSPEND

        if k.tryfail(run, _failed) is Status.FAILURE:
            k.abort()
            return Status.FAILURE
        return k.propagate()


def _failed() -> Status:
    return Status.FAILURE
