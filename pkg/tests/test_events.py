import random

import pytest

from cpkernel.events import ClosureEventList, TriggerMap
from cpkernel.kernel import TRIGGER, Kernel, KernelError


def queued(k):
    return list(k.queues[TRIGGER])


def test_closure_list_order_and_range():
    lst = ClosureEventList()
    g, h = (lambda: None), (lambda: None)
    lst.insert(g, 0)
    lst.insert(h, 5)
    assert [f for f, _, _ in lst] == [g, h]
    with pytest.raises(KernelError):
        lst.insert(g, 7)


def test_add_for_value_grows_domain():
    tm = TriggerMap(0, 9)
    f, g = (lambda: None), (lambda: None)
    assert tm.triggers(4) == []
    tm.add_for_value(g, 4)
    tm.add_for_value(f, 4)
    assert set(tm.triggers(4)) == {f, g}


def test_same_closure_twice_gives_two_handles():
    k = Kernel()
    tm = TriggerMap(0, 9)
    f = lambda: None  # noqa: E731
    a = tm.add_for_value(f, 2)
    b = tm.add_for_value(f, 2)
    assert a is not b
    tm.dispatch(k, 2)
    assert queued(k) == [f, f]


def test_dispatch_cases():
    k = Kernel()
    tm = TriggerMap(0, 9)
    f, g = (lambda: None), (lambda: None)
    tm.add_for_value(f, 2)
    tm.dispatch(k, 5)
    assert queued(k) == []
    tm.dispatch(k, 2)
    assert queued(k) == [f]
    tm.add_for_value(g, 2)
    k.queues[TRIGGER].clear()
    tm.dispatch(k, 2)
    assert queued(k) == [f, g]


def test_remove_and_relocate():
    k = Kernel()
    tm1, tm2 = TriggerMap(0, 3), TriggerMap(0, 3)
    f, g = (lambda: None), (lambda: None)
    hf = tm1.add_for_value(f, 2)
    tm1.add_for_value(g, 2)
    tm1.remove_trigger(hf)
    tm1.dispatch(k, 2)
    assert queued(k) == [g]
    tm2.add_trigger(hf, 1)
    k.queues[TRIGGER].clear()
    tm2.dispatch(k, 1)
    assert queued(k) == [f]


def test_handle_contract_errors():
    tm1, tm2 = TriggerMap(0, 3), TriggerMap(0, 3)
    h = tm1.add_for_value(lambda: None, 1)
    with pytest.raises(KernelError):
        tm2.add_trigger(h, 1)
    with pytest.raises(KernelError):
        tm2.remove_trigger(h)
    tm1.remove_trigger(h)
    with pytest.raises(KernelError):
        tm1.remove_trigger(h)


def test_round_trip_is_identity():
    tm = TriggerMap(0, 3)
    f = lambda: None  # noqa: E731
    h = tm.add_for_value(f, 3)
    tm.remove_trigger(h)
    assert tm.triggers(3) == [] and tm.size == 0
    tm.add_trigger(h, 3)
    assert tm.triggers(3) == [f] and tm.size == 1


def test_bind_triggers_in_registration_order():
    k = Kernel()
    tm = TriggerMap(0, 3)
    tm.dispatch_bind(k)
    assert queued(k) == []
    f, g = (lambda: None), (lambda: None)
    tm.add_for_bind(f)
    tm.add_for_bind(g)
    k.trigger_bind_evt(tm)
    assert queued(k) == [f, g]


def test_handle_lifecycle_random_interleavings():
    # Model: handle -> (map index, value) or None. Dispatch must enqueue
    # exactly the handles registered for the dispatched value.
    rng = random.Random(7)
    maps = [TriggerMap(0, 5) for _ in range(3)]
    handles = []
    where = {}
    k = Kernel()
    for _ in range(5000):
        op = rng.random()
        if op < 0.3 or not handles:
            m, w = rng.randrange(3), rng.randrange(6)
            h = maps[m].add_for_value(object(), w)
            handles.append(h)
            where[h] = (m, w)
        elif op < 0.55:
            h = rng.choice(handles)
            if where[h] is not None:
                maps[where[h][0]].remove_trigger(h)
                where[h] = None
        elif op < 0.75:
            h = rng.choice(handles)
            if where[h] is None:
                m, w = rng.randrange(3), rng.randrange(6)
                maps[m].add_trigger(h, w)
                where[h] = (m, w)
        else:
            m, w = rng.randrange(3), rng.randrange(6)
            k.queues[TRIGGER].clear()
            maps[m].dispatch(k, w)
            expect = sorted(id(h.closure) for h in handles if where[h] == (m, w))
            assert sorted(id(c) for c in queued(k)) == expect
    for m in range(3):
        assert maps[m].size == sum(1 for h in handles if where[h] and where[h][0] == m)
