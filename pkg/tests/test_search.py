import itertools
import random

import pytest

from cpkernel.engine import Engine
from cpkernel.kernel import Status
from cpkernel.propagators import LessEqBC, LinearLeqBC
from cpkernel.search import (ObjectiveValueInt, SearchFailure, Solver, label_static,
                             label_with)
from oracles import dom


def test_tryall_hand_trace():
    e = Engine()
    s = Solver(e)
    ran, failed = [], []

    def body(v):
        ran.append(v)
        if v < 3:
            s.fail()

    with pytest.raises(SearchFailure):
        s.tryall([1, 2, 3], body, on_failure=failed.append)
    assert ran == [1, 2, 3]
    assert failed == [1, 2]
    assert s.stats.choices == 3


def test_tryall_on_failure_only_after_failed_branches():
    e = Engine()
    s = Solver(e)
    x = e.int_var(1, 3)
    failed = []
    found = []

    def leaf():
        found.append(x.value())
        raise SearchFailure()

    def search(solver, _leaf):
        solver.tryall([1, 2, 3], lambda v: solver.label(x, v), filter=x.member,
                      on_failure=lambda v: failed.append(v), then=leaf)
    s._run(search, leaf)
    assert found == [1, 2, 3] and failed == [1, 2, 3]


def test_first_candidate_success_skips_on_failure():
    e = Engine()
    x = e.int_var(1, 3)
    s = Solver(e)
    failed = []
    sol = s.solve_first(lambda solver, leaf: solver.tryall(
        [1, 2, 3], lambda v: solver.label(x, v), on_failure=failed.append, then=leaf), [x])
    assert sol == [1] and failed == [] and s.stats.choices == 1


def test_filter_rejecting_all_makes_no_choice():
    e = Engine()
    s = Solver(e)
    with pytest.raises(SearchFailure):
        s.tryall([1, 2, 3], lambda v: None, filter=lambda v: False)
    assert s.stats.choices == 0


def test_on_failure_effects_persist_into_siblings():
    e = Engine()
    x = e.int_var(0, 3)
    s = Solver(e)
    seen = []

    def body(v):
        seen.append(dom(x))
        s.fail()

    with pytest.raises(SearchFailure):
        s.tryall([0, 1, 2], body, on_failure=lambda v: s.diff(x, v))
    assert seen == [{0, 1, 2, 3}, {1, 2, 3}, {2, 3}]


def test_failing_on_failure_fails_whole_tryall():
    e = Engine()
    x = e.int_var(0, 0)
    s = Solver(e)
    calls = []

    def body(v):
        calls.append(v)
        s.fail()

    with pytest.raises(SearchFailure):
        s.tryall([0, 1], body, on_failure=lambda v: s.diff(x, 0))
    assert calls == [0]


def test_enforce_examples():
    e = Engine()
    x = e.int_var(0, 3)
    assert e.enforce(lambda: x.bind(2)) is Status.SUSPEND
    assert e.enforce(lambda: x.bind(1)) is Status.FAILURE
    assert e.enforce(lambda: None) is Status.SUSPEND


def test_label_diff_notification_discipline():
    rng = random.Random(4)
    e = Engine()
    xs = [e.int_var(0, 4) for _ in range(4)]
    for i in range(3):
        e.add(LessEqBC(xs[i], xs[i + 1], -1))
    s = Solver(e)
    log = []
    s.return_label.whenever_notified_do(lambda x, v: log.append(("rl", x.id, v)))
    s.fail_label.whenever_notified_do(lambda x, v: log.append(("fl", x.id, v)))
    s.return_diff.whenever_notified_do(lambda x, v: log.append(("rd", x.id, v)))
    s.fail_diff.whenever_notified_do(lambda x, v: log.append(("fd", x.id, v)))
    for _ in range(2000):
        cp = e.trail.push_checkpoint()
        for _ in range(rng.randint(1, 3)):
            x, v = rng.choice(xs), rng.randint(0, 4)
            op = rng.choice(["label", "diff"])
            before = len(log)
            try:
                getattr(s, op)(x, v)
                ok = True
            except SearchFailure:
                ok = False
            assert len(log) == before + 1
            tag = log[-1][0]
            assert tag == {("label", True): "rl", ("label", False): "fl",
                           ("diff", True): "rd", ("diff", False): "fd"}[op, ok]
            assert log[-1][1:] == (x.id, v)
            if not ok:
                break
        e.trail.backtrack_to(cp)


def test_label_bound_variable_with_its_value():
    e = Engine()
    x = e.int_var(2, 2)
    s = Solver(e)
    got = []
    s.return_label.when_notified_do(lambda *a: got.append(a))
    assert s.label(x, 2) is Status.SUSPEND
    assert got == [(x, 2)]


def test_label_chain_counts_propagations():
    e = Engine()
    xs = [e.int_var(0, 5) for _ in range(4)]
    for i in range(3):
        e.add(LessEqBC(xs[i], xs[i + 1], -1))
    s = Solver(e)
    before = e.counters.propagations
    s.label(xs[3], 3)
    assert [x.value() for x in xs] == [0, 1, 2, 3]
    # Scripted equivalent on a fresh engine.
    e2 = Engine()
    ys = [e2.int_var(0, 5) for _ in range(4)]
    for i in range(3):
        e2.add(LessEqBC(ys[i], ys[i + 1], -1))
    b2 = e2.counters.propagations
    e2.enforce(lambda: ys[3].bind(3))
    assert e.counters.propagations - before == e2.counters.propagations - b2 > 0


def test_one_var_model_one_solution_per_value():
    e = Engine()
    x = e.int_var(2, 6)
    s = Solver(e)
    sols = []
    st = s.solve_all(label_static([x]), [x], sols.append)
    assert sols == [[v] for v in range(2, 7)] and st.solutions == 5


def test_root_failure_gives_nothing():
    e = Engine()
    x, y = e.int_var(5, 6), e.int_var(0, 3)
    s = Solver(e)
    s.root_status = e.add(LessEqBC(x, y, 0))
    assert s.root_status is Status.FAILURE
    st = s.solve_all(label_static([x, y]), [x, y])
    assert (st.solutions, st.choices) == (0, 0)


def random_instance(rng):
    e = Engine()
    n = rng.randint(1, 4)
    lo = [rng.randint(0, 2) for _ in range(n)]
    hi = [rng.randint(2, 5) for _ in range(n)]
    xs = [e.int_var(a, b) for a, b in zip(lo, hi)]
    cons = []
    status = Status.SUSPEND
    for _ in range(rng.randint(0, 3)):
        if n >= 2 and rng.random() < 0.5:
            i, j = rng.sample(range(n), 2)
            c = rng.randint(-2, 2)
            cons.append(lambda t, i=i, j=j, c=c: t[i] <= t[j] + c)
            st = e.add(LessEqBC(xs[i], xs[j], c))
        else:
            a = [rng.choice([-2, -1, 1, 2]) for _ in range(n)]
            r = rng.randint(-2, 8)
            cons.append(lambda t, a=a, r=r: sum(p * q for p, q in zip(a, t)) <= r)
            st = e.add(LinearLeqBC(a, xs, r))
        if st is Status.FAILURE:
            status = st
    brute = [t for t in itertools.product(*[range(a, b + 1) for a, b in zip(lo, hi)])
             if all(f(t) for f in cons)]
    return e, xs, status, brute


def test_completeness_and_restoration_random():
    rng = random.Random(8)
    for _ in range(400):
        e, xs, status, brute = random_instance(rng)
        s = Solver(e)
        s.root_status = status
        before = [dom(x) for x in xs]
        found = []
        s.solve_all(label_static(xs, decreasing=rng.random() < 0.5,
                                 with_diff=rng.random() < 0.5), xs,
                    lambda v: found.append(tuple(v)))
        assert sorted(found) == sorted(brute)
        assert len(set(found)) == len(found)
        assert [dom(x) for x in xs] == before
        assert s.stats.solutions == len(found)


def test_branch_and_bound_random():
    rng = random.Random(9)
    for _ in range(400):
        e, xs, status, brute = random_instance(rng)
        k = rng.randrange(len(xs))
        maximize = rng.random() < 0.5
        s = Solver(e)
        s.root_status = status
        best = s.minimize(xs[k], label_static(xs), maximize=maximize)
        if not brute:
            assert best is None
            continue
        vals = [t[k] for t in brute]
        assert best == ObjectiveValueInt(max(vals) if maximize else min(vals), not maximize)
        assert e.objective is None


def test_minimize_trivial():
    e = Engine()
    x = e.int_var(3, 7)
    s = Solver(e)
    best = s.minimize(x, label_static([x]))
    assert best.value == 3 and s.stats.solutions == 1


def test_objective_values():
    a, b = ObjectiveValueInt(3), ObjectiveValueInt(5)
    assert a.best(b) == a and b.best(a) == a
    assert a.compare(b) == -b.compare(a) == -1
    m1, m2 = ObjectiveValueInt(3, False), ObjectiveValueInt(5, False)
    assert m1.best(m2) == m2
    with pytest.raises(ValueError):
        a.compare(m1)


def test_dynamic_labeling_finds_all():
    e = Engine()
    xs = [e.int_var(0, 2) for _ in range(3)]
    e.add(LessEqBC(xs[0], xs[1], -1))

    def select():
        free = [x for x in xs if not x.bound()]
        return min(free, key=lambda x: (x.size(), x.id)) if free else None
    s = Solver(e)
    found = []
    s.solve_all(label_with(select), xs, lambda v: found.append(tuple(v)))
    expect = [t for t in itertools.product(range(3), repeat=3) if t[0] < t[1]]
    assert sorted(found) == expect
