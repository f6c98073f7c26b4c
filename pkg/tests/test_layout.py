from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elq.dom import Mutation, parse_markup
from elq.errors import DisplayNone, NonQuiescent, UnknownElement
from elq.layout import EventLoop, LayoutEngine, Page
from elq.style import parse_stylesheet

import gen
from oracles import chain_widths, count_forced

CASES = settings(max_examples=200, deadline=None)


def _page(markup, css="", viewport=(1000, 800)):
    doc = parse_markup(markup)
    page = Page(doc, parse_stylesheet(css), viewport)
    page.load()
    return doc, page


def _el(doc, name):
    return doc.by_attribute_id(name).id


# -- read_size -------------------------------------------------------------

def test_clean_read_is_free():
    doc, page = _page('<div><div id="a"></div></div>')
    before = page.layout.counters.snapshot()
    box = page.layout.read_size(_el(doc, "a"))
    assert box.width == 1000
    assert page.layout.counters == before


def test_pending_mutation_forces_one_layout():
    doc, page = _page('<div><div id="a"></div></div>')
    a = _el(doc, "a")
    doc.set_style(a, "width", "400px")
    assert page.layout.read_size(a).width == 400
    assert page.layout.counters.forced_layouts == 1
    page.layout.read_size(a)
    assert page.layout.counters.forced_layouts == 1


def test_display_none_has_no_box():
    doc, page = _page('<div><div id="a" style="display: none"><p id="b"></p></div></div>')
    with pytest.raises(DisplayNone):
        page.layout.read_size(_el(doc, "a"))
    assert page.layout.box(_el(doc, "b")) is None


# -- mutate ----------------------------------------------------------------

def test_mutation_is_pending_until_layout():
    doc, page = _page('<div><div id="a"></div></div>')
    a = _el(doc, "a")
    committed = dict(page.layout.state.committed)
    doc.set_style(a, "width", "400px")
    assert len(page.layout.state.pending) == 1
    assert page.layout.state.committed == committed
    assert page.layout.box(a).width == 1000


def test_many_mutations_no_reads():
    doc, page = _page('<div><div id="a"></div></div>')
    a = _el(doc, "a")
    for i in range(1000):
        doc.set_style(a, "width", f"{i}px")
    assert page.layout.counters.forced_layouts == 0


def test_unknown_element_mutation():
    doc, page = _page("<div></div>")
    with pytest.raises(UnknownElement):
        page.layout.mutate(Mutation("style", 42, ("width", "1px")))


# -- box model -------------------------------------------------------------

@pytest.mark.parametrize("markup,name,width", [
    ('<div style="width: 1000px"><div id="x" style="width: 50%"></div></div>', "x", 500),
    ('<div style="font-size: 16px"><div id="x" style="width: 10em"></div></div>', "x", 160),
    ('<div style="width: 1000px"><div style="width: 50%"><div style="width: 50%">'
     '<div id="x" style="width: 30%"></div></div></div></div>', "x", 75),
    ('<div style="font-size: 20px"><div id="x" style="font-size: 2em; width: 1rem"></div></div>', "x", 20),
])
def test_widths(markup, name, width):
    doc, page = _page(markup)
    assert page.layout.box(_el(doc, name)).width == width


def test_auto_height_sums_children():
    doc, page = _page('<div id="r"><div style="height: 10px"></div><div style="height: 2em">'
                      '</div><div style="height: 5px; display: none"></div></div>')
    assert page.layout.box(_el(doc, "r")).height == 42


def test_percent_height_needs_explicit_parent():
    doc, page = _page('<div style="height: 200px"><div id="a" style="height: 50%">'
                      '<div id="b" style="height: 50%"></div></div></div>')
    assert page.layout.box(_el(doc, "a")).height == 100
    assert page.layout.box(_el(doc, "b")).height == 50
    doc, page = _page('<div><div id="a" style="height: 50%"></div></div>')
    assert page.layout.box(_el(doc, "a")).height == 0


_spec = st.one_of(
    st.just(("auto", 0)),
    st.tuples(st.just("pct"), st.integers(1, 200)),
    st.tuples(st.just("px"), st.integers(0, 2000)),
    st.tuples(st.just("em"), st.integers(0, 50)),
    st.tuples(st.just("rem"), st.integers(0, 50)),
)


@CASES
@given(st.integers(1, 3000), st.lists(_spec, min_size=1, max_size=8))
def test_width_chain_matches_fraction_oracle(viewport, specs):
    css = {"auto": lambda v: "", "pct": lambda v: f"width: {v}%", "px": lambda v: f"width: {v}px",
           "em": lambda v: f"width: {v}em", "rem": lambda v: f"width: {v}rem"}
    markup = "".join(f'<div id="n{i}" style="{css[k](v)}">' for i, (k, v) in enumerate(specs))
    markup += "</div>" * len(specs)
    doc, page = _page(markup, viewport=(viewport, 600))
    want = chain_widths(viewport, specs)
    for i, w in enumerate(want):
        assert page.layout.box(_el(doc, f"n{i}")).width == pytest.approx(float(w), rel=1e-9, abs=1e-9)


# -- event loop ------------------------------------------------------------

def test_idle_tick_changes_nothing():
    doc, page = _page("<div></div>")
    before = page.layout.counters.snapshot()
    page.loop.tick()
    assert page.layout.counters == before


def test_tick_after_mutations_schedules_layout():
    doc, page = _page('<div><div id="a"></div></div>')
    doc.set_style(_el(doc, "a"), "width", "10px")
    doc.set_style(_el(doc, "a"), "height", "10px")
    page.loop.tick()
    c = page.layout.counters
    assert (c.scheduled_layouts, c.forced_layouts) == (2, 0)  # load + this tick
    assert c.layout_passes == c.forced_layouts + c.scheduled_layouts


def test_notifications_arrive_the_tick_after():
    doc, page = _page('<div><div id="a"></div></div>')
    a = _el(doc, "a")
    seen = []
    page.layout.commit_listeners.append(
        lambda changed, forced: a in changed and page.loop.queue_microtask(lambda: seen.append(page.loop.tick_index))
    )
    start = page.loop.tick_index
    page.loop.call_soon(lambda: doc.set_style(a, "width", "10px"))
    page.loop.tick()
    assert seen == []
    page.loop.tick()
    assert seen == [start + 2]


def test_microtasks_before_next_macrotask():
    loop = EventLoop()
    order = []
    loop.call_soon(lambda: (order.append("m1"), loop.queue_microtask(lambda: order.append("u1"))))
    loop.call_soon(lambda: order.append("m2"))
    loop.run_until_quiescent()
    assert order == ["m1", "u1", "m2"]


def test_non_quiescent_guard():
    loop = EventLoop()

    def forever():
        loop.call_soon(forever)

    loop.call_soon(forever)
    with pytest.raises(NonQuiescent):
        loop.run_until_quiescent(max_ticks=50)


# -- properties ------------------------------------------------------------

@CASES
@given(gen.layout_documents())
def test_layout_is_pure(doc_css):
    markup, css, _ = doc_css
    a = LayoutEngine(parse_markup(markup), parse_stylesheet(css))
    b = LayoutEngine(parse_markup(markup), parse_stylesheet(css))
    a.flush(forced=False)
    b.flush(forced=False)
    a.layout_pass()
    assert a.state.committed == b.state.committed


@CASES
@given(st.integers(1, 30), st.lists(st.sampled_from("rw"), max_size=40))
def test_thrashing_law(n, ops):
    items = "".join(f'<div id="n{i}" style="width: 10px"></div>' for i in range(n))
    doc, page = _page(f"<div>{items}</div>")
    targets = [_el(doc, f"n{i}") for i in range(n)]
    layout = page.layout

    # interleaved read, mutate, read per element
    before = layout.counters.forced_layouts
    for i, el in enumerate(targets):
        layout.read_size(el)
        doc.set_style(el, "width", f"{20 + i}px")
        layout.read_size(el)
    assert layout.counters.forced_layouts - before >= n

    # all reads first, then all mutations, then all reads
    page.settle()
    before = layout.counters.forced_layouts
    for el in targets:
        layout.read_size(el)
    for i, el in enumerate(targets):
        doc.set_style(el, "width", f"{40 + i}px")
    for el in targets:
        layout.read_size(el)
    assert layout.counters.forced_layouts - before <= 1

    # arbitrary sequences agree with the dirty-flag oracle
    page.settle()
    before = layout.counters.forced_layouts
    for k, op in enumerate(ops):
        el = targets[k % n]
        if op == "w":
            doc.set_style(el, "height", f"{k}px")
        else:
            layout.read_size(el)
    assert layout.counters.forced_layouts - before == count_forced(ops)
