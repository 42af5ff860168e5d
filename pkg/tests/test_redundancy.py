import threading

from hypothesis import given, settings, strategies as st

from hlsdiff.execution import InputFormat, SlotFormat, TestInput
from hlsdiff.minic.types import INT32
from hlsdiff.redundancy import Decision, RecordTable, should_execute, update_record

FMT = InputFormat((SlotFormat("a", "array", INT32, 1, 6, lo=-50, hi=50),))


def arr(*xs):
    return TestInput((tuple(xs),))


def test_paper_example():
    t = RecordTable()
    update_record(t, arr(2, 5, 3))
    assert t.ranges == [(2, 5)]
    assert should_execute(t, arr(1, 4, 5)) is Decision.EXECUTE
    update_record(t, arr(1, 4, 5))
    assert t.ranges == [(1, 5)]
    assert should_execute(t, arr(1, 3, 5)) is Decision.SKIP


def test_empty_table_executes():
    assert RecordTable().should_execute(arr(0)) is Decision.EXECUTE


def test_unseen_shape_executes():
    t = RecordTable()
    t.update_record(arr(1, 5))
    assert t.should_execute(arr(1, 5, 3)) is Decision.EXECUTE


def test_forced_in_range_record_counts_only():
    t = RecordTable()
    t.update_record(arr(1, 5, 3))
    v = t.version
    t.update_record(arr(2, 4, 3))
    assert t.ranges == [(1, 5)] and t.executions == 2 and t.version == v


def test_shape_set_semantics():
    t = RecordTable()
    t.update_record(TestInput((((1, 2, 3), (4, 5, 6)),)))
    t.update_record(TestInput((((1, 2), (3, 4), (5, 6)),)))
    assert len(t.shapes) == 2


inputs = st.lists(st.integers(-50, 50), min_size=1, max_size=6).map(lambda xs: arr(*xs))


@settings(max_examples=200)
@given(st.lists(inputs, min_size=1, max_size=60))
def test_skips_are_justified_and_ranges_monotone(seq):
    t = RecordTable()
    prev = None
    for inp in seq:
        d = t.decide_and_update(inp)
        if d is Decision.SKIP:
            lo, hi = t.ranges[0]
            assert lo <= min(inp.values[0]) and max(inp.values[0]) <= hi
            assert inp.shape() in t.shapes
        if prev is not None:
            assert t.ranges[0][0] <= prev[0] and t.ranges[0][1] >= prev[1]
        prev = t.ranges[0]
    assert t.justify_skips(FMT) == []
    assert t.executions + t.skips == len(seq)


@given(inputs)
def test_update_idempotent(inp):
    a, b = RecordTable(), RecordTable()
    a.update_record(inp)
    b.update_record(inp)
    b.update_record(inp)
    assert (a.ranges, a.shapes, a.version) == (b.ranges, b.shapes, b.version)


def test_concurrent_decisions_are_atomic():
    t = RecordTable()
    same = arr(1, 2, 3)
    out = []

    def worker():
        for _ in range(200):
            out.append(t.decide_and_update(same))
    threads = [threading.Thread(target=worker) for _ in range(4)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    assert out.count(Decision.EXECUTE) == 1
    assert t.skips == 799


def test_skip_rate_and_dict():
    t = RecordTable()
    t.decide_and_update(arr(1, 2))
    t.decide_and_update(arr(2, 1))
    assert t.skip_rate == 0.5
    d = t.to_dict()
    assert d["ranges"] == [[1, 2]] and d["skips"] == 1
