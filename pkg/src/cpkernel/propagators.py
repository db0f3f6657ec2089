"""Propagators built only on the fd and kernel APIs.

Four propagation styles appear here: closures on bound events (EqualBC),
value events (EqualDC, ElementVarDC), triggers (ReifyEqualDC, SumBoolGeq)
and coalesced constraint-based propagation (LessEqBC, linear constraints).
"""

from __future__ import annotations

from typing import Sequence

from .engine import Constraint
from .fd import IntVar
from .trail import TrailedInt

BINARY_PRIORITY = 5
LINEAR_PRIORITY = 4


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


class EqualBC(Constraint):
    """x = y + c on bounds, as two closures on bound changes."""

    def __init__(self, x: IntVar, y: IntVar, c: int = 0) -> None:
        self.x, self.y, self.c = x, y, c

    def post(self) -> None:
        x, y, c = self.x, self.y, self.c
        # Holes can move a bound again, so repeat until both sides settle.
        while True:
            y.update_min_and_max(x.min() - c, x.max() - c)
            bounds = (x.min(), x.max())
            x.update_min_and_max(y.min() + c, y.max() + c)
            if (x.min(), x.max()) == bounds:
                break
        if not x.bound():
            x.when_change_bounds_do(
                lambda: y.update_min_and_max(x.min() - c, x.max() - c), BINARY_PRIORITY)
        if not y.bound():
            y.when_change_bounds_do(
                lambda: x.update_min_and_max(y.min() + c, y.max() + c), BINARY_PRIORITY)


class EqualDC(Constraint):
    """x = y + c, domain consistent through value events."""

    def __init__(self, x: IntVar, y: IntVar, c: int = 0) -> None:
        self.x, self.y, self.c = x, y, c

    def post(self) -> None:
        x, y, c = self.x, self.y, self.c
        if x.bound():
            y.bind(x.min() - c)
        elif y.bound():
            x.bind(y.min() + c)
        else:
            x.update_min_and_max(y.min() + c, y.max() + c)
            y.update_min_and_max(x.min() - c, x.max() - c)
            # Scan actual values rather than ranges: a hole at one end of y
            # can leave x values whose image lies outside y's new bounds.
            for v in list(x.values()):
                if not y.member(v - c):
                    x.remove_value(v)
            for w in list(y.values()):
                if not x.member(w + c):
                    y.remove_value(w)
            x.when_lose_value_do(lambda v: y.remove_value(v - c))
            y.when_lose_value_do(lambda v: x.remove_value(v + c))
            x.when_bind_do(lambda: y.bind(x.min() - c), BINARY_PRIORITY)
            y.when_bind_do(lambda: x.bind(y.min() + c), BINARY_PRIORITY)


class LessEqBC(Constraint):
    """x <= y + c. ``LessEqBC(x, y, -1)`` states x < y."""

    def __init__(self, x: IntVar, y: IntVar, c: int = 0) -> None:
        self.x, self.y, self.c = x, y, c

    def post(self) -> None:
        self.propagate()
        x, y = self.x, self.y
        if not x.bound():
            x.when_change_bounds_propagate(self, BINARY_PRIORITY)
        if not y.bound():
            y.when_change_bounds_propagate(self, BINARY_PRIORITY)

    def propagate(self) -> None:
        x, y, c = self.x, self.y, self.c
        if x._min - c > y._min:
            y.update_min(x._min - c)
        if y._max + c < x._max:
            x.update_max(y._max + c)


class _Linear(Constraint):
    def __init__(self, coefs: Sequence[int], xs: Sequence[IntVar], rhs: int) -> None:
        if len(coefs) != len(xs):
            raise ValueError("coefficient and variable arrays differ in length")
        pairs = [(a, x) for a, x in zip(coefs, xs) if a != 0]
        self.coefs = [a for a, _ in pairs]
        self.xs = [x for _, x in pairs]
        self.rhs = rhs

    def post(self) -> None:
        self.propagate()
        for x in self.xs:
            if not x.bound():
                x.when_change_bounds_propagate(self, LINEAR_PRIORITY)

    def _contributions(self):
        lo = []
        hi = []
        for a, x in zip(self.coefs, self.xs):
            if a > 0:
                lo.append(a * x._min)
                hi.append(a * x._max)
            else:
                lo.append(a * x._max)
                hi.append(a * x._min)
        return lo, hi


class LinearEqBC(_Linear):
    """sum(a_i * x_i) = rhs on bounds, filtered to a local fixpoint."""

    def propagate(self) -> None:
        coefs, xs, rhs = self.coefs, self.xs, self.rhs
        if not xs:
            if rhs != 0:
                self.engine.fail()
            return
        changed = True
        while changed:
            changed = False
            lo, hi = self._contributions()
            slo = sum(lo)
            shi = sum(hi)
            if slo > rhs or shi < rhs:
                self.engine.fail()
            for i, (a, x) in enumerate(zip(coefs, xs)):
                if lo[i] == hi[i]:
                    continue
                # a*x must lie in [rhs - rest_hi, rhs - rest_lo]
                tlo = rhs - (shi - hi[i])
                thi = rhs - (slo - lo[i])
                if a > 0:
                    nlo, nhi = _ceil_div(tlo, a), thi // a
                else:
                    nlo, nhi = _ceil_div(thi, a), tlo // a
                omin, omax = x._min, x._max
                if nlo > omin or nhi < omax:
                    x.update_min_and_max(nlo, nhi)
                    changed = True
                    # Later terms must see the new bounds.
                    if a > 0:
                        nl, nh = a * x._min, a * x._max
                    else:
                        nl, nh = a * x._max, a * x._min
                    slo += nl - lo[i]
                    shi += nh - hi[i]
                    lo[i], hi[i] = nl, nh


class LinearLeqBC(_Linear):
    """sum(a_i * x_i) <= rhs on bounds."""

    def propagate(self) -> None:
        coefs, xs, rhs = self.coefs, self.xs, self.rhs
        lo, _ = self._contributions()
        slo = sum(lo)
        if slo > rhs:
            self.engine.fail()
        # One pass suffices: pruning moves only the bound that does not enter slo.
        for i, (a, x) in enumerate(zip(coefs, xs)):
            t = rhs - (slo - lo[i])
            if a > 0:
                x.update_max(t // a)
            else:
                x.update_min(_ceil_div(t, a))


class ReifyEqualDC(Constraint):
    """b <=> (x = k) with b a 0/1 variable."""

    def __init__(self, b: IntVar, x: IntVar, k: int) -> None:
        self.b, self.x, self.k = b, x, k

    def post(self) -> None:
        b, x, k = self.b, self.x, self.k
        b.update_min_and_max(0, 1)
        if b.bound():
            if b.min() == 1:
                x.bind(k)
            else:
                x.remove_value(k)
            return
        if not x.member(k):
            b.bind(0)
            return
        if x.bound():
            b.bind(1)
            return

        def on_b_bind():
            if b.min() == 1:
                x.bind(k)
            else:
                x.remove_value(k)

        def on_x_bind():
            if x.min() == k:
                b.bind(1)

        b.when_bind_do(on_b_bind, BINARY_PRIORITY)
        x.when_lose_value_trigger(k, lambda: b.bind(0))
        x.when_bind_do(on_x_bind, BINARY_PRIORITY)


class SumBoolGeq(Constraint):
    """sum(x_i) >= c over 0/1 variables, watching c+1 of them for the loss of 1.

    Watches and the scan cursor are not trailed: after a backtrack every
    watched variable still holds 1 in its domain, which is all the
    triggers rely on.
    """

    def __init__(self, xs: Sequence[IntVar], c: int) -> None:
        self.xs = list(xs)
        self.c = c
        self.at: list = []
        self.id_of: list[int] = []
        self.nt: list[int] = []
        self.last = -1

    def post(self) -> None:
        xs, c = self.xs, self.c
        n = len(xs)
        nb_true = nb_pos = 0
        for x in xs:
            x.update_min_and_max(0, 1)
            if x.bound():
                nb_true += x.min() == 1
            else:
                nb_pos += 1
        if nb_true >= c:
            return
        if nb_true + nb_pos < c:
            self.engine.fail()
        if nb_true + nb_pos == c:
            for x in xs:
                if not x.bound():
                    x.bind(1)
            return
        self.at = [None] * (c + 1)
        self.id_of = [0] * (c + 1)
        self.nt = []
        listen = c + 1
        for i in range(n - 1, -1, -1):
            if listen > 0 and xs[i].max() == 1:
                listen -= 1
                self.id_of[listen] = i
                self.at[listen] = xs[i].when_lose_value_trigger(1, self._make_trigger(listen))
            else:
                self.nt.append(i)
        self.last = len(self.nt) - 1

    def _make_trigger(self, listen: int):
        xs, nt, id_of, at = self.xs, self.nt, self.id_of, self.at

        def on_loss():
            if xs[id_of[listen]].member(1):
                return
            last = self.last
            j = last
            found = False
            if last >= 0:
                m = len(nt)
                while True:
                    j = (j + 1) % m
                    found = xs[nt[j]].member(1)
                    if j == last or found:
                        break
            if found:
                nxt = nt[j]
                t = at[listen]
                xs[id_of[listen]].triggers.remove_trigger(t)
                nt[j] = id_of[listen]
                xs[nxt].triggers.add_trigger(t, 1)
                id_of[listen] = nxt
                self.last = j
            else:
                for k in range(self.c + 1):
                    if k != listen:
                        xs[id_of[k]].bind(1)

        return on_loss


class ElementVarDC(Constraint):
    """z = y[x], domain consistent.

    Keeps, on the trail, ``I[k] = D(z) & D(y[k])`` as bitsets relative to
    ``z.low``, ``H`` the local copy of ``D(x)``, and ``s[v]`` the number of
    indices in ``H`` supporting value ``v`` of ``z``.
    """

    def __init__(self, z: IntVar, ys: Sequence[IntVar], x: IntVar) -> None:
        self.z, self.ys, self.x = z, list(ys), x

    def post(self) -> None:
        z, ys, x = self.z, self.ys, self.x
        if not ys:
            self.engine.fail()
        x.update_min_and_max(0, len(ys) - 1)
        zlow = z.low
        zmask = z.mask()
        zspan = z.up - zlow + 1

        inter: dict[int, TrailedInt] = {}
        for k in x.values():
            inter[k] = TrailedInt(zmask & self._mask_of(ys[k]))
        dead = [k for k, cell in inter.items() if not cell.value]
        hmask = 0
        for k in x.values():
            if inter[k].value:
                hmask |= 1 << k
        counts = [0] * zspan
        for k, cell in inter.items():
            if hmask >> k & 1:
                m = cell.value
                while m:
                    lsb = m & -m
                    counts[lsb.bit_length() - 1] += 1
                    m ^= lsb
        self.inter = inter
        self.h = TrailedInt(hmask)
        self.s = [TrailedInt(cnt) for cnt in counts]

        for k in dead:
            x.remove_value(k)
        for v in list(z.values()):
            if counts[v - zlow] == 0:
                z.remove_value(v)
        self._restrict_single()

        for k in list(x.values()):
            ys[k].when_lose_value_do(self._y_loss(k))
        x.when_lose_value_do(self._x_loss)
        z.when_lose_value_do(self._z_loss)

    def _mask_of(self, y: IntVar) -> int:
        # y's membership shifted onto z's value offsets, clipped to z's range.
        zlow, zup = self.z.low, self.z.up
        m = 0
        for v in y.values():
            if zlow <= v <= zup:
                m |= 1 << (v - zlow)
        return m

    def _restrict_single(self) -> None:
        h = self.h.value
        if h and h & (h - 1) == 0:
            k = h.bit_length() - 1
            y = self.ys[k]
            zlow = self.z.low
            ik = self.inter[k].value
            for v in list(y.values()):
                i = v - zlow
                if i < 0 or not (ik >> i) & 1:
                    y.remove_value(v)

    def _y_loss(self, k: int):
        trail = self.engine.trail

        def on_loss(v: int) -> None:
            if not (self.h.value >> k) & 1:
                return
            i = v - self.z.low
            cell = self.inter[k]
            if i < 0 or not (cell.value >> i) & 1:
                return
            trail.assign(cell, cell.value & ~(1 << i))
            sv = self.s[i]
            trail.assign(sv, sv.value - 1)
            if not cell.value:
                self.x.remove_value(k)
            if sv.value == 0:
                self.z.remove_value(v)

        return on_loss

    def _x_loss(self, k: int) -> None:
        trail = self.engine.trail
        h = self.h.value
        if not (h >> k) & 1:
            return
        trail.assign(self.h, h & ~(1 << k))
        m = self.inter[k].value
        zlow = self.z.low
        while m:
            lsb = m & -m
            i = lsb.bit_length() - 1
            sv = self.s[i]
            trail.assign(sv, sv.value - 1)
            if sv.value == 0:
                self.z.remove_value(i + zlow)
            m ^= lsb
        self._restrict_single()

    def _z_loss(self, v: int) -> None:
        trail = self.engine.trail
        i = v - self.z.low
        bit = 1 << i
        h = self.h.value
        while h:
            lsb = h & -h
            k = lsb.bit_length() - 1
            cell = self.inter[k]
            if cell.value & bit:
                trail.assign(cell, cell.value & ~bit)
                sv = self.s[i]
                trail.assign(sv, sv.value - 1)
                if not cell.value:
                    self.x.remove_value(k)
            h ^= lsb
        h = self.h.value
        if h and h & (h - 1) == 0:
            self.ys[h.bit_length() - 1].remove_value(v)


__all__ = [
    "EqualBC", "EqualDC", "LessEqBC", "LinearEqBC", "LinearLeqBC",
    "ReifyEqualDC", "SumBoolGeq", "ElementVarDC",
]
