"""The four micro-benchmarks and a runner producing one metric row per run."""

from __future__ import annotations

import time
from dataclasses import astuple, dataclass
from typing import Callable, Optional

from .engine import Engine
from .model import Model, Var, concretize, flatten, sum_of
from .search import Solver, label_static

CSV_HEADER = "bench,size,solutions,choices,failures,propagations,wall_ms"


@dataclass
class BenchResult:
    bench: str
    size: int
    solutions: int
    choices: int
    failures: int
    propagations: int
    wall_ms: float

    def csv_row(self) -> str:
        return ",".join(str(v) if not isinstance(v, float) else f"{v:.3f}" for v in astuple(self))


@dataclass
class Benchmark:
    """A model plus what to do with it once concretized.

    ``mode`` is ``"propagate"`` (post only), ``"all"`` (every solution) or
    ``"first"`` (stop at the first solution). Labeling is static over
    ``decision`` with the given value order.
    """
    name: str
    size: int
    model: Model
    decision: list
    mode: str = "propagate"
    decreasing: bool = False


def build_order(n: int) -> Benchmark:
    """x_1 < x_2 < ... < x_n over 1..n: propagation only."""
    if n < 2:
        raise ValueError("order needs n >= 2")
    m = Model()
    x = m.int_var_array(n, 1, n, "x")
    for i in range(n - 1):
        m.add(x[i] < x[i + 1])
    return Benchmark("order", n, m, [])


def _magic(m: Model, n: int) -> list[Var]:
    s = m.int_var_array(n, 0, n, "s")
    for i in range(n):
        m.add(s[i] == sum_of(s[j] == i for j in range(n)))
    return s


def build_magic_simple(n: int) -> Benchmark:
    """Magic series by counting constraints; all solutions, static increasing labeling."""
    if n < 1:
        raise ValueError("magic series needs n >= 1")
    m = Model()
    s = _magic(m, n)
    return Benchmark("magic-simple", n, m, s, mode="all")


def build_magic_redundant(n: int) -> Benchmark:
    """Magic series plus sum(s) = n and sum(i*s_i) = n; first solution, decreasing values."""
    if n < 1:
        raise ValueError("magic series needs n >= 1")
    m = Model()
    s = _magic(m, n)
    m.add(sum_of(s) == n)
    m.add(sum_of(i * s[i] for i in range(n)) == n)
    return Benchmark("magic-redundant", n, m, s, mode="first", decreasing=True)


def build_slow_convergence(n: int) -> Benchmark:
    """A chain of y's feeding a clique of x's; propagation only."""
    if n < 1:
        raise ValueError("slow needs n >= 1")
    m = Model()
    y = m.int_var_array(n + 1, 0, 10 * n, "y")
    x = m.int_var_array(n + 1, 0, 10 * n, "x")
    for i in range(2, n + 1):
        m.add(y[i - 1] - y[i] <= 0)
    for i in range(1, n + 1):
        m.add(y[0] - y[i] <= n - i + 1)
    m.add(y[n] - x[0] <= 0)
    for i in range(1, n):
        for j in range(i + 1, n + 1):
            m.add(x[i] - x[j] <= 0)
    m.add(y[0] >= n)
    return Benchmark("slow", n, m, [])


BENCHMARKS: dict[str, Callable[[int], Benchmark]] = {
    "order": build_order,
    "magic-simple": build_magic_simple,
    "magic-redundant": build_magic_redundant,
    "slow": build_slow_convergence,
}


@dataclass
class Run:
    result: BenchResult
    engine: Engine
    cmap: object
    solver: Optional[Solver]
    solutions: list


def execute(b: Benchmark, keep_solutions: bool = False) -> Run:
    """Flatten, concretize and search ``b``.

    Wall time covers concretization (where propagation-only benchmarks do
    all their work) and search, not model construction or flattening.
    """
    flat = flatten(b.model)
    engine = Engine()
    t0 = time.perf_counter()
    cmap = concretize(flat, engine)
    solver = None
    found: list = []
    choices = solutions = 0
    if b.mode != "propagate":
        solver = Solver(engine)
        solver.root_status = cmap.status
        xs = [cmap.vars[flat.vars[v.index]] for v in b.decision]
        search = label_static(xs, decreasing=b.decreasing, with_diff=True)
        if b.mode == "all":
            solver.solve_all(search, xs, found.append if keep_solutions else None)
        else:
            first = solver.solve_first(search, xs)
            if first is not None and keep_solutions:
                found.append(first)
        choices = solver.stats.choices
        solutions = solver.stats.solutions
    wall = (time.perf_counter() - t0) * 1000.0
    c = engine.counters
    result = BenchResult(b.name, b.size, solutions, choices, c.failures, c.propagations, wall)
    return Run(result, engine, cmap, solver, found)


def run_bench(name: str, n: int) -> BenchResult:
    if name not in BENCHMARKS:
        raise KeyError(name)
    return execute(BENCHMARKS[name](n)).result

