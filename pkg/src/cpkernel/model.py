"""Solver-independent models, the flattening operator and CP concretization.

A :class:`Model` holds range-domain integer variables, constraints stated
as relations over a small expression grammar (or named globals) and an
optional objective. :func:`flatten` rewrites it into a model made only of
:class:`Atom` objects, each of which maps onto one propagator.
:func:`concretize` instantiates a flat model inside an :class:`Engine`.

    m = Model()
    x = m.int_var_array(3, 0, 5, "x")
    m.add(x[0] + 2 <= x[1])
    m.add(x[2] == sum_of(eq_reif(v, 1) for v in x))
    flat = flatten(m)
    cmap = concretize(flat, Engine())
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .kernel import Status
from .propagators import (ElementVarDC, EqualBC, EqualDC, LessEqBC, LinearEqBC,
                          LinearLeqBC, ReifyEqualDC, SumBoolGeq)
from .search import Objective


class ModelError(ValueError):
    """Raised on malformed models and on expression forms flatten rejects."""


# -- expressions ----------------------------------------------------------------

class Expr:
    def __add__(self, other) -> "Expr":
        return Add(self, _expr(other))

    def __radd__(self, other) -> "Expr":
        return Add(_expr(other), self)

    def __sub__(self, other) -> "Expr":
        return Sub(self, _expr(other))

    def __rsub__(self, other) -> "Expr":
        return Sub(_expr(other), self)

    def __mul__(self, k) -> "Expr":
        if not isinstance(k, int):
            raise ModelError("only multiplication by an integer constant is supported")
        return Mul(k, self)

    __rmul__ = __mul__

    def __neg__(self) -> "Expr":
        return Mul(-1, self)

    def __eq__(self, other) -> "Relation":  # type: ignore[override]
        return Relation("eq", self, _expr(other))

    def __ne__(self, other):  # type: ignore[override]
        raise ModelError("disequality is not part of the expression language")

    def __le__(self, other) -> "Relation":
        return Relation("leq", self, _expr(other))

    def __ge__(self, other) -> "Relation":
        return Relation("geq", self, _expr(other))

    def __lt__(self, other) -> "Relation":
        return Relation("lt", self, _expr(other))

    def __gt__(self, other) -> "Relation":
        return Relation("gt", self, _expr(other))

    __hash__ = object.__hash__


class Var(Expr):
    """A model variable with domain ``low..up``."""

    def __init__(self, model: "Model", low: int, up: int, name: Optional[str], index: int) -> None:
        if low > up:
            raise ModelError(f"empty domain {low}..{up}")
        self.model = model
        self.low = low
        self.up = up
        self.name = name if name is not None else f"v{index}"
        self.index = index

    def __repr__(self) -> str:
        return self.name


class Const(Expr):
    def __init__(self, value: int) -> None:
        self.value = value

    def __repr__(self) -> str:
        return str(self.value)


class Add(Expr):
    def __init__(self, left: Expr, right: Expr) -> None:
        self.left, self.right = left, right


class Sub(Expr):
    def __init__(self, left: Expr, right: Expr) -> None:
        self.left, self.right = left, right


class Mul(Expr):
    def __init__(self, k: int, e: Expr) -> None:
        self.k, self.e = k, e


class Sum(Expr):
    def __init__(self, terms: Sequence[Expr]) -> None:
        self.terms = list(terms)


class EqReif(Expr):
    """The 0/1 value of ``x = k``."""

    def __init__(self, x: Var, k: int) -> None:
        if not isinstance(x, Var) or not isinstance(k, int):
            raise ModelError("eq_reif needs a variable and an integer constant")
        self.x, self.k = x, k


def _expr(e) -> Expr:
    if isinstance(e, Expr):
        return e
    if isinstance(e, bool):
        return Const(int(e))
    if isinstance(e, int):
        return Const(e)
    if isinstance(e, Relation):
        return e.as_reif()
    raise ModelError(f"cannot use {e!r} in an expression")


def sum_of(terms: Iterable) -> Sum:
    """Sum of expressions. ``x == k`` relations among the terms count as 0/1 values."""
    return Sum([_expr(t) for t in terms])


def eq_reif(x: Var, k: int) -> EqReif:
    return EqReif(x, k)


# -- constraints ----------------------------------------------------------------

_OPS = ("eq", "leq", "geq", "lt", "gt")


class Relation:
    """``lhs op rhs``. ``consistency`` selects BC or DC for two-variable equalities."""

    def __init__(self, op: str, lhs: Expr, rhs: Expr, consistency: str = "bc") -> None:
        if op not in _OPS:
            raise ModelError(f"unknown relation {op!r}")
        self.op, self.lhs, self.rhs = op, lhs, rhs
        self.consistency = consistency

    def dc(self) -> "Relation":
        return Relation(self.op, self.lhs, self.rhs, "dc")

    def as_reif(self) -> EqReif:
        if self.op == "eq":
            if isinstance(self.lhs, Var) and isinstance(self.rhs, Const):
                return EqReif(self.lhs, self.rhs.value)
            if isinstance(self.rhs, Var) and isinstance(self.lhs, Const):
                return EqReif(self.rhs, self.lhs.value)
        raise ModelError("only (variable == constant) can be used as a 0/1 expression")

    def __bool__(self):
        raise ModelError("relations have no truth value; post them with Model.add")


@dataclass
class Element:
    """z = ys[x]."""
    z: Var
    ys: Sequence[Var]
    x: Var


@dataclass
class AtLeast:
    """At least ``c`` of the 0/1 variables ``xs`` equal 1."""
    xs: Sequence[Var]
    c: int


Constraint = Union[Relation, Element, AtLeast]


@dataclass
class Atom:
    """One flat constraint: ``kind`` names the propagator, ``args`` its arguments.

    ``origin`` is the index of the source constraint in the unflattened model
    (-1 for objective and auxiliary atoms).
    """
    kind: str
    args: tuple
    origin: int = -1


KINDS = ("less_eq_bc", "equal_bc", "equal_dc", "linear_eq_bc", "linear_leq_bc",
         "reify_equal_dc", "sum_bool_geq", "element_var_dc", "fail")


@dataclass
class ObjectiveDecl:
    expr: Expr
    minimize: bool = True


class Model:
    def __init__(self) -> None:
        self.vars: list[Var] = []
        self.constraints: list = []
        self.objective: Optional[ObjectiveDecl] = None
        self.frozen = False

    def _check_open(self) -> None:
        if self.frozen:
            raise ModelError("model is frozen after concretization")

    def int_var(self, low: int, up: int, name: Optional[str] = None) -> Var:
        self._check_open()
        v = Var(self, low, up, name, len(self.vars))
        self.vars.append(v)
        return v

    def int_var_array(self, n: int, low: int, up: int, prefix: str = "x") -> list[Var]:
        return [self.int_var(low, up, f"{prefix}{i}") for i in range(n)]

    def add(self, c) -> None:
        self._check_open()
        if not isinstance(c, (Relation, Element, AtLeast, Atom)):
            raise ModelError(f"not a constraint: {c!r}")
        self.constraints.append(c)

    def minimize(self, e) -> None:
        self._check_open()
        self.objective = ObjectiveDecl(_expr(e), True)

    def maximize(self, e) -> None:
        self._check_open()
        self.objective = ObjectiveDecl(_expr(e), False)

    @property
    def is_flat(self) -> bool:
        return all(isinstance(c, Atom) for c in self.constraints) and (
            self.objective is None or isinstance(self.objective.expr, Var))


# -- flattening -----------------------------------------------------------------

class _Flattener:
    def __init__(self, src: Model) -> None:
        self.src = src
        self.out = Model()
        self.vmap: dict[Var, Var] = {}
        self.reif: dict[tuple[int, int], Var] = {}
        self.origin = -1
        for v in src.vars:
            self.vmap[v] = self.out.int_var(v.low, v.up, v.name)

    def emit(self, kind: str, *args) -> None:
        self.out.constraints.append(Atom(kind, args, self.origin))

    def var(self, v: Var) -> Var:
        if v.model is not self.src:
            raise ModelError(f"variable {v!r} belongs to another model")
        return self.vmap[v]

    def linear(self, e: Expr, k: int, acc: dict, order: list) -> int:
        """Accumulate ``k * e`` into ``acc``; returns the constant part."""
        if isinstance(e, Var):
            v = self.var(e)
            if v not in acc:
                acc[v] = 0
                order.append(v)
            acc[v] += k
            return 0
        if isinstance(e, Const):
            return k * e.value
        if isinstance(e, Add):
            return self.linear(e.left, k, acc, order) + self.linear(e.right, k, acc, order)
        if isinstance(e, Sub):
            return self.linear(e.left, k, acc, order) + self.linear(e.right, -k, acc, order)
        if isinstance(e, Mul):
            return self.linear(e.e, k * e.k, acc, order)
        if isinstance(e, Sum):
            return sum(self.linear(t, k, acc, order) for t in e.terms)
        if isinstance(e, EqReif):
            b = self.aux_bool(e.x, e.k)
            if b not in acc:
                acc[b] = 0
                order.append(b)
            acc[b] += k
            return 0
        raise ModelError(f"unsupported expression {type(e).__name__}")

    def aux_bool(self, x: Var, k: int) -> Var:
        key = (x.index, k)
        b = self.reif.get(key)
        if b is None:
            fx = self.var(x)
            b = self.out.int_var(0, 1, f"b[{fx.name}={k}]")
            self.reif[key] = b
            self.emit("reify_equal_dc", b, fx, k)
        return b

    def form(self, e: Expr) -> tuple[list[tuple[int, Var]], int]:
        acc: dict = {}
        order: list = []
        const = self.linear(e, 1, acc, order)
        return [(acc[v], v) for v in order if acc[v] != 0], const

    def relation(self, r: Relation) -> None:
        op = r.op
        # Equalities read as rhs - lhs = 0, inequalities as lhs - rhs <= c.
        if op == "eq":
            terms, const = self.form(Sub(r.rhs, r.lhs))
        elif op in ("leq", "lt"):
            terms, const = self.form(Sub(r.lhs, r.rhs))
            if op == "lt":
                const += 1
        else:
            terms, const = self.form(Sub(r.rhs, r.lhs))
            if op == "gt":
                const += 1
        if not terms:
            if (const != 0) if op == "eq" else (const > 0):
                self.emit("fail")
            return
        if op == "eq":
            self.equality(terms, -const, r.consistency)
        else:
            self.inequality(terms, -const)

    def equality(self, terms, rhs: int, consistency: str) -> None:
        if len(terms) == 2 and {terms[0][0], terms[1][0]} == {1, -1}:
            (a, y), (_, x) = terms
            if a == -1:
                x, y = y, x
            # Terms come from rhs - lhs, so the -1 variable is the lhs one:
            # y - x = rhs  ->  x = y - rhs
            kind = "equal_dc" if consistency == "dc" else "equal_bc"
            self.emit(kind, x, y, -rhs)
            return
        if terms[0][0] < 0:
            terms = [(-a, v) for a, v in terms]
            rhs = -rhs
        self.emit("linear_eq_bc", [a for a, _ in terms], [v for _, v in terms], rhs)

    def inequality(self, terms, rhs: int) -> None:
        if len(terms) == 2 and {terms[0][0], terms[1][0]} == {1, -1}:
            (a, x), (_, y) = terms
            if a == -1:
                x, y = y, x
            # x - y <= rhs  ->  x <= y + rhs
            self.emit("less_eq_bc", x, y, rhs)
            return
        self.emit("linear_leq_bc", [a for a, _ in terms], [v for _, v in terms], rhs)

    def run(self) -> Model:
        for i, c in enumerate(self.src.constraints):
            self.origin = i
            if isinstance(c, Relation):
                self.relation(c)
            elif isinstance(c, Element):
                self.emit("element_var_dc", self.var(c.z), [self.var(y) for y in c.ys], self.var(c.x))
            elif isinstance(c, AtLeast):
                self.emit("sum_bool_geq", [self.var(x) for x in c.xs], c.c)
            elif isinstance(c, Atom):
                self.out.constraints.append(Atom(c.kind, tuple(self._remap(a) for a in c.args), i))
            else:
                raise ModelError(f"unsupported constraint {c!r}")
        self.origin = -1
        obj = self.src.objective
        if obj is not None:
            terms, const = self.form(obj.expr)
            if len(terms) == 1 and terms[0][0] == 1 and const == 0:
                z = terms[0][1]
            else:
                lo = const + sum(a * (v.low if a > 0 else v.up) for a, v in terms)
                hi = const + sum(a * (v.up if a > 0 else v.low) for a, v in terms)
                z = self.out.int_var(lo, hi, "objective")
                self.emit("linear_eq_bc", [a for a, _ in terms] + [-1],
                          [v for _, v in terms] + [z], -const)
            self.out.objective = ObjectiveDecl(z, obj.minimize)
        return self.out

    def _remap(self, a):
        if isinstance(a, Var):
            return self.var(a)
        if isinstance(a, list):
            return [self._remap(x) for x in a]
        return a


def flatten(m: Model) -> Model:
    """Rewrite ``m`` into an equivalent model of :class:`Atom` constraints.

    The flat model's first ``len(m.vars)`` variables mirror ``m.vars`` in
    order; reification auxiliaries follow, created once per (variable,
    constant) pair. Atoms come out in source order.
    """
    return _Flattener(m).run()


# -- concretization -------------------------------------------------------------

@dataclass
class ConcretizationMap:
    vars: dict = field(default_factory=dict)
    constraints: dict = field(default_factory=dict)
    status: Status = Status.SUSPEND
    objective: Optional[Objective] = None

    def __getitem__(self, v: Var):
        return self.vars[v]

    def values(self, vs: Sequence[Var]) -> list:
        return [self.vars[v] for v in vs]


def _build(engine, kind: str, args: tuple, ev):
    if kind == "less_eq_bc":
        return LessEqBC(ev(args[0]), ev(args[1]), args[2])
    if kind == "equal_bc":
        return EqualBC(ev(args[0]), ev(args[1]), args[2])
    if kind == "equal_dc":
        return EqualDC(ev(args[0]), ev(args[1]), args[2])
    if kind == "linear_eq_bc":
        return LinearEqBC(args[0], [ev(v) for v in args[1]], args[2])
    if kind == "linear_leq_bc":
        return LinearLeqBC(args[0], [ev(v) for v in args[1]], args[2])
    if kind == "reify_equal_dc":
        return ReifyEqualDC(ev(args[0]), ev(args[1]), args[2])
    if kind == "sum_bool_geq":
        return SumBoolGeq([ev(v) for v in args[0]], args[1])
    if kind == "element_var_dc":
        return ElementVarDC(ev(args[0]), [ev(v) for v in args[1]], ev(args[2]))
    raise ModelError(f"unknown atom kind {kind!r}")


def concretize(m: Model, engine) -> ConcretizationMap:
    """Create engine variables for ``m`` and post its atoms in order.

    A failure while posting (or a ``fail`` atom) sets the map's status to
    FAILURE; remaining atoms are not posted.
    """
    if not m.is_flat:
        raise ModelError("concretize needs a flat model; call flatten first")
    cmap = ConcretizationMap()
    for v in m.vars:
        cmap.vars[v] = engine.int_var(v.low, v.up, v.name)
    m.frozen = True
    ev = cmap.vars.__getitem__
    for atom in m.constraints:
        posted = cmap.constraints.setdefault(atom.origin, [])
        if cmap.status is Status.FAILURE:
            continue
        if atom.kind == "fail":
            cmap.status = Status.FAILURE
            continue
        c = _build(engine, atom.kind, atom.args, ev)
        posted.append(c)
        if engine.add(c) is Status.FAILURE:
            cmap.status = Status.FAILURE
    if m.objective is not None:
        cmap.objective = Objective(ev(m.objective.expr), m.objective.minimize)
        engine.set_objective(cmap.objective)
    return cmap
