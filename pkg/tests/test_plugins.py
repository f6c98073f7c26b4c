import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elq.core import Breakpoint, BreakpointState, Elq
from elq.dom import parse_markup
from elq.errors import BadBreakpointToken, BadColumnClass
from elq.harness import run_scenario
from elq.layout import Page
from elq.plugins import (
    GridColumnSpec,
    generate_css,
    install_default_plugins,
    parse_breakpoints,
    parse_column_class,
)
from elq.style import Length, matches, parse_stylesheet

import gen
from oracles import brute_force_matches

CASES = settings(max_examples=200, deadline=None)


def _engine(markup, css="", viewport=(1000, 800)):
    doc = parse_markup(markup)
    page = Page(doc, parse_stylesheet(css), viewport)
    elq = Elq(page)
    install_default_plugins(elq)
    return doc, page, elq


def _el(doc, name):
    return doc.by_attribute_id(name).id


# -- breakpoint attributes -------------------------------------------------

def test_parse_breakpoints():
    assert parse_breakpoints("300 500", "width") == [
        Breakpoint("width", Length(300.0, "px")), Breakpoint("width", Length(500.0, "px"))]
    assert parse_breakpoints("10em", "height") == [Breakpoint("height", Length(10.0, "em"))]
    with pytest.raises(BadBreakpointToken):
        parse_breakpoints("30q", "width")


@pytest.mark.parametrize("attrs,flags", [
    ('elq elq-breakpoints elq-breakpoints-widths="300"', True),
    ('data-elq data-elq-breakpoints data-elq-breakpoints-widths="300"', True),
    ("elq", False),
])
def test_activation_flags(attrs, flags):
    doc, page, elq = _engine(f'<div><div id="t" {attrs}></div></div>')
    t = _el(doc, "t")
    elq.activate(t)
    p = elq.behavior(t)
    assert [p.resize_detection, p.update_breakpoints, p.apply_breakpoint_states, p.cycle_detection] == [flags] * 4


def test_data_prefixed_classes():
    doc, page, elq = _engine('<div><div id="t" data-elq data-elq-breakpoints '
                             'data-elq-breakpoints-widths="300 500" style="width: 400px"></div></div>')
    elq.activate(_el(doc, "t"))
    page.settle()
    assert doc.get(_el(doc, "t")).classes == ["elq-min-width-300px", "elq-max-width-500px"]


def test_authored_unit_kept_in_class():
    doc, page, elq = _engine('<div><div id="t" elq elq-breakpoints elq-breakpoints-widths="10em" '
                             'elq-breakpoints-heights="2.5rem" style="width: 200px; height: 30px"></div></div>')
    elq.activate(_el(doc, "t"))
    page.settle()
    assert doc.get(_el(doc, "t")).classes == ["elq-min-width-10em", "elq-max-height-2.5rem"]


# -- class applier ---------------------------------------------------------

def _state(v, side):
    return BreakpointState(Breakpoint("width", Length(float(v), "px")), side)


def test_applier_flip_replaces_one_token():
    doc, page, elq = _engine('<div class="user" id="t"></div>')
    t = _el(doc, "t")
    elq.apply_breakpoint_states(t, frozenset({_state(300, "min"), _state(500, "max")}))
    assert doc.get(t).classes == ["user", "elq-min-width-300px", "elq-max-width-500px"]
    elq.apply_breakpoint_states(t, frozenset({_state(300, "min"), _state(500, "min")}))
    assert doc.get(t).classes == ["user", "elq-min-width-300px", "elq-min-width-500px"]
    elq.apply_breakpoint_states(t, frozenset())
    assert doc.get(t).classes == ["user"]


_states = st.frozensets(st.builds(_state, st.sampled_from((100, 300, 500)),
                                  st.sampled_from(("min", "max"))), max_size=3)


@CASES
@given(_states, _states)
def test_applier_round_trip(s, s2):
    doc, page, elq = _engine('<div class="a b" id="t"></div>')
    t = _el(doc, "t")
    elq.apply_breakpoint_states(t, s)
    once = list(doc.get(t).classes)
    elq.apply_breakpoint_states(t, s2)
    elq.apply_breakpoint_states(t, s)
    assert doc.get(t).classes == once


# -- mirror ----------------------------------------------------------------

NESTED = '''<div id="outer" class="foo" elq elq-breakpoints elq-breakpoints-widths="300 500" style="width: {w}px">
  <div id="inner" class="foo" elq elq-breakpoints elq-breakpoints-widths="300 500">
    <p id="inner-p" elq elq-mirror></p>
  </div>
  <p id="outer-p" elq elq-mirror></p>
</div>'''
NESTED_CSS = ".foo { width: 50%; } .foo p.elq-min-width-500px { color: white; }"


@pytest.mark.parametrize("w,inner_white", [(1200, True), (800, False)])
def test_nested_mirrors(w, inner_white):
    report = run_scenario(NESTED.format(w=w), NESTED_CSS)
    e = report.elements
    assert e["#inner"]["box"]["width"] == w / 2
    for p, target in (("#inner-p", "#inner"), ("#outer-p", "#outer")):
        assert e[p]["classes"] == [c for c in e[target]["classes"] if c.startswith("elq-")]
    assert e["#outer-p"]["style"].get("color") == "white"
    assert (e["#inner-p"]["style"].get("color") == "white") is inner_white
    # the hand-computed cascade agrees with the brute-force matcher
    doc = parse_markup(NESTED.format(w=w))
    for key in ("#inner-p", "#outer-p"):
        doc.get(_el(doc, key[1:])).classes = e[key]["classes"]
    for key in ("#inner", "#outer"):
        doc.get(_el(doc, key[1:])).classes = e[key]["classes"]
    rule = parse_stylesheet(NESTED_CSS).rules[1]
    assert brute_force_matches(rule.selector, doc, _el(doc, "inner-p")) is inner_white


def test_mirror_without_ancestor():
    report = run_scenario('<div><p id="p" elq elq-mirror></p></div>', "")
    assert [w["code"] for w in report.warnings] == ["W_MIRROR_NO_ANCESTOR"]
    assert report.classes("#p") == []


@CASES
@given(gen.elq_documents())
def test_mirror_consistency(doc_css):
    markup, css = doc_css
    doc, page, elq = _engine(markup, css)
    elq.activate([el.id for el in doc.iter() if "elq" in el.attributes])
    page.settle()
    mirror = elq.plugin("elq-mirror")
    for el, target in mirror.targets.items():
        ours = [c for c in doc.get(el).classes if c.startswith("elq-")]
        theirs = [c for c in doc.get(target).classes if c.startswith("elq-")]
        assert sorted(ours) == sorted(theirs)


# -- grid ------------------------------------------------------------------

def test_column_classes():
    assert parse_column_class("col-500-4") == GridColumnSpec("col-500-4", Length(500.0, "px"), 4)
    assert parse_column_class("hidden-700-up").hidden_up
    assert parse_column_class("container") is None
    for bad in ("col-500-13", "col-500-0", "col-x-4", "hidden-up"):
        with pytest.raises(BadColumnClass):
            parse_column_class(bad)


def test_generated_css():
    specs = [parse_column_class(t) for t in ("col-700-6", "col-500-4", "hidden-700-up")]
    assert generate_css(specs).serialize() == (
        ".row > .col-500-4 { width: 100%; }\n"
        ".row > .col-700-6 { width: 100%; }\n"
        ".row.elq-min-width-500px > .col-500-4 { width: 33.333333%; }\n"
        ".row.elq-min-width-700px > .col-700-6 { width: 50%; }\n"
        ".row.elq-min-width-700px > .hidden-700-up { display: none; }\n"
    )


GRID = '''<div class="container" elq><div class="row" id="row">
<div id="a" class="col-500-4 col-700-6"></div>
<div id="b" class="col-500-4 col-700-6"></div>
<div id="c" class="col-500-4 hidden-700-up"></div></div></div>'''


@pytest.mark.parametrize("width,pcts", [
    (400, (100, 100, 100)), (499, (100, 100, 100)), (500, (100 / 3,) * 3),
    (600, (100 / 3,) * 3), (700, (50, 50, None)), (800, (50, 50, None)),
])
def test_grid_widths(width, pcts):
    e = run_scenario(GRID, "", {"viewport": [width, 600]}).elements
    for key, pct in zip(("#a", "#b", "#c"), pcts):
        if pct is None:
            assert e[key]["box"] is None
        else:
            assert e[key]["box"]["width"] / width * 100 == pytest.approx(pct, abs=1e-4)


def test_nested_grids_are_encapsulated():
    markup = '''<div class="container" elq><div class="row" id="outer">
      <div id="oc" class="col-500-6"><div class="row" id="inner">
        <div id="ic" class="col-800-3"></div><div id="ic2" class="col-500-12"></div>
      </div></div></div></div>'''
    doc, page, elq = _engine(markup, viewport=(1000, 800))
    elq.activate([el.id for el in doc.iter() if "elq" in el.attributes])
    page.settle()
    sheet = page.layout.stylesheet_named("elq-grid")
    for rule in sheet.rules:
        assert set(rule.selector.combinators) == {"child"}
        assert "row" in rule.selector.compounds[0].classes
        for el in doc.iter():
            assert matches(rule.selector, doc, el.id) == brute_force_matches(rule.selector, doc, el.id)
    # the inner row is 500px wide: min-500 but not min-800
    assert page.layout.box(_el(doc, "ic")).width == 500
    assert page.layout.box(_el(doc, "ic2")).width == 500
    assert page.layout.box(_el(doc, "oc")).width == 500
