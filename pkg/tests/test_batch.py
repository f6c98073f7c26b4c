import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elq.batch import BatchProcessor, double_width, double_width_naive
from elq.dom import parse_markup
from elq.errors import BatchJobFailed, NegativeLevel
from elq.harness import bench
from elq.layout import EventLoop, Page

from oracles import reference_batch_trace

CASES = settings(max_examples=200, deadline=None)


def _bp():
    loop = EventLoop()
    return loop, BatchProcessor(loop)


def test_levels_run_in_order():
    loop, bp = _bp()
    trace = []
    bp.add(1, lambda: trace.append("C"))
    bp.add(0, lambda: trace.append("A"))
    bp.add(0, lambda: trace.append("B"))
    bp.flush()
    assert trace == ["A", "B", "C"]


def test_sparse_level():
    loop, bp = _bp()
    trace = []
    bp.add(5, lambda: trace.append(5))
    loop.run_until_quiescent()
    assert trace == [5]
    assert bp.batches_flushed == 1


def test_add_during_flush_goes_to_next_batch():
    loop, bp = _bp()
    trace = []

    def first():
        trace.append(("first", bp.batches_flushed))
        bp.add(0, lambda: trace.append(("late", bp.batches_flushed)))

    bp.add(0, first)
    bp.add(1, lambda: trace.append(("level1", bp.batches_flushed)))
    loop.run_until_quiescent()
    assert trace == [("first", 0), ("level1", 0), ("late", 1)]


def test_empty_flush_is_noop():
    loop, bp = _bp()
    bp.flush()
    assert bp.batches_flushed == 0


def test_failing_job_aborts_its_batch_only():
    loop, bp = _bp()
    trace = []

    def boom():
        raise RuntimeError("boom")

    bp.add(0, boom)
    bp.add(1, lambda: trace.append("never"))
    with pytest.raises(BatchJobFailed) as info:
        bp.flush()
    assert (info.value.level, info.value.index) == (0, 0)
    assert isinstance(info.value.cause, RuntimeError)
    assert trace == []
    bp.add(0, lambda: trace.append("later"))
    loop.run_until_quiescent()
    assert trace == ["later"]


def test_negative_level():
    loop, bp = _bp()
    with pytest.raises(NegativeLevel):
        bp.add(-1, lambda: None)


def test_no_job_runs_in_its_own_macrotask():
    loop, bp = _bp()
    ran = []

    def macrotask():
        bp.add(0, lambda: ran.append(loop.tick_index))
        assert ran == []

    loop.call_soon(macrotask)
    loop.tick()
    assert ran == []
    loop.run_until_quiescent()
    assert ran and ran[0] > 1


# -- doubleWidth -----------------------------------------------------------

def _page(widths):
    items = "".join(f'<div style="width: {w}px; height: 10px"></div>' for w in widths)
    doc = parse_markup(f"<div>{items}</div>")
    page = Page(doc)
    page.load()
    return doc, page, list(doc.get(doc.root).children)


def test_double_width_reads_new_geometry():
    doc, page, (el,) = _page([100])
    bp = BatchProcessor(page.loop)
    seen = []
    double_width(bp, page.layout, el, lambda h: seen.append((h, page.layout.box(el).width)))
    assert seen == []
    page.settle()
    assert seen == [(10.0, 200.0)]


def test_double_width_zero():
    doc, page, (el,) = _page([0])
    seen = []
    double_width_naive(page.layout, el, seen.append)
    assert seen == [10.0]
    assert page.layout.box(el).width == 0


def test_many_synchronous_calls_one_flush():
    doc, page, targets = _page([10] * 50)
    bp = BatchProcessor(page.loop)
    before = page.layout.counters.snapshot()
    for el in targets:
        double_width(bp, page.layout, el, lambda h: None)
    page.settle()
    assert (page.layout.counters - before).forced_layouts <= 2
    assert all(page.layout.box(el).width == 20 for el in targets)


def test_batched_cost_is_constant_naive_grows():
    batched = [bench(n, "doubleWidth", "scroll")["forced_layouts"] for n in (2, 5, 40)]
    naive = [bench(n, "doubleWidth", "scroll-naive")["forced_layouts"] for n in (2, 5, 40)]
    assert len(set(batched)) == 1
    assert all(f >= n for f, n in zip(naive, (2, 5, 40)))


# -- properties ------------------------------------------------------------

@CASES
@given(st.lists(st.integers(0, 6), min_size=1, max_size=40))
def test_stable_sort_by_level(levels):
    loop, bp = _bp()
    trace = []
    for i, level in enumerate(levels):
        bp.add(level, lambda i=i: trace.append(i))
    loop.run_until_quiescent()
    assert trace == sorted(range(len(levels)), key=lambda i: (levels[i], i))


_job = st.recursive(
    st.tuples(st.integers(0, 3), st.just(())),
    lambda kids: st.tuples(st.integers(0, 3), st.lists(kids, max_size=3).map(tuple)),
    max_leaves=10,
)


@CASES
@given(st.lists(_job, min_size=1, max_size=8))
def test_trace_matches_reference_queue(program):
    counter = iter(range(10_000))

    def label(job):
        level, kids = job
        return (level, next(counter), [label(k) for k in kids])

    program = [label(j) for j in program]
    loop, bp = _bp()
    trace = []

    def add(job):
        level, name, kids = job
        bp.add(level, lambda: (trace.append(name), [add(k) for k in kids]))

    for job in program:
        add(job)
    loop.run_until_quiescent()
    assert trace == reference_batch_trace(program)
