"""Bundled plugins: breakpoint attributes, state classes, mirror and grid."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .core import UPDATE_LEVEL, Breakpoint, BreakpointState, Elq, PluginDefinition
from .dom import get_elq_attribute
from .errors import BadBreakpointToken, BadColumnClass
from .style import (
    Compound,
    Declaration,
    Keyword,
    Length,
    Percent,
    Rule,
    Selector,
    Stylesheet,
    format_number,
)

_TOKEN = re.compile(r"^(\d+(?:\.\d+)?|\.\d+)(px|em|rem)?$")
_STATE_CLASS = re.compile(r"^elq-(min|max)-(width|height)-")


def parse_breakpoint_token(token: str) -> Length:
    """``300`` -> 300px; ``10em``, ``2.5rem`` keep their unit."""
    m = _TOKEN.match(token)
    if not m:
        raise BadBreakpointToken(token)
    return Length(float(m.group(1)), m.group(2) or "px")


def parse_breakpoints(text: str, dimension: str) -> list[Breakpoint]:
    return [Breakpoint(dimension, parse_breakpoint_token(t)) for t in text.split()]


def state_class(state: BreakpointState) -> str:
    bp = state.breakpoint
    return f"elq-{state.side}-{bp.dimension}-{format_number(bp.value.magnitude)}{bp.value.unit}"


def min_class(bp_value: Length, dimension: str = "width") -> str:
    return state_class(BreakpointState(Breakpoint(dimension, bp_value), "min"))


def _state_order(state: BreakpointState):
    bp = state.breakpoint
    return (bp.dimension != "width", bp.value.unit, bp.value.magnitude)


# -- elq-breakpoints: attribute parser ---------------------------------

class BreakpointsParser:
    def __init__(self, elq: Elq, options: dict):
        self.elq = elq

    def _annotated(self, el: int) -> bool:
        return get_elq_attribute(self.elq.doc.get(el), "elq-breakpoints") is not None

    def activate(self, el: int) -> None:
        if not self._annotated(el):
            return
        props = self.elq.doc.get(el).elq
        props.resize_detection = True
        props.update_breakpoints = True
        props.apply_breakpoint_states = True
        props.cycle_detection = True

    def get_breakpoints(self, el: int) -> list[Breakpoint]:
        if not self._annotated(el):
            return []
        node = self.elq.doc.get(el)
        out: list[Breakpoint] = []
        for dimension in ("width", "height"):
            text = get_elq_attribute(node, f"elq-breakpoints-{dimension}s")
            if text:
                out.extend(parse_breakpoints(text, dimension))
        return out


def breakpoints_plugin() -> PluginDefinition:
    return PluginDefinition("elq-breakpoints", "1.0.0", BreakpointsParser)


# -- breakpoint state classes ------------------------------------------

class StateClassApplier:
    def __init__(self, elq: Elq, options: dict):
        self.elq = elq
        self.owned: dict[int, list[str]] = {}

    def apply_breakpoint_states(self, el: int, states) -> None:
        new = [state_class(s) for s in sorted(states, key=_state_order)]
        old = self.owned.get(el, [])
        # owned tokens always sit at the end of the list in a stable order
        self.elq.doc.set_classes(el, add=new, remove=old)
        self.owned[el] = new


def state_classes_plugin() -> PluginDefinition:
    return PluginDefinition("elq-breakpoint-classes", "1.0.0", StateClassApplier)


# -- mirror ------------------------------------------------------------

class Mirror:
    def __init__(self, elq: Elq, options: dict):
        self.elq = elq
        self.targets: dict[int, int] = {}
        self.mirrors: dict[int, list[int]] = {}
        elq.on("breakpointStatesChanged", self._target_changed)

    def _is_mirror(self, el: int) -> bool:
        return get_elq_attribute(self.elq.doc.get(el), "elq-mirror") is not None

    def find_target(self, el: int) -> int | None:
        for anc in self.elq.doc.ancestors(el):
            if get_elq_attribute(anc, "elq-breakpoints") is not None:
                return anc.id
        return None

    def get_elements(self, el: int) -> list[int]:
        if not self._is_mirror(el):
            return []
        target = self.find_target(el)
        return [] if target is None else [target]

    def activate(self, el: int) -> None:
        if not self._is_mirror(el):
            return
        target = self.find_target(el)
        if target is None:
            self.elq.warn("W_MIRROR_NO_ANCESTOR", el,
                          f"mirror element {el} has no elq-breakpoints ancestor")
            return
        self.elq.doc.get(el).elq.apply_breakpoint_states = True
        self.targets[el] = target
        self.mirrors.setdefault(target, []).append(el)
        if target in self.elq.applied:
            self.elq.batch.add(UPDATE_LEVEL, lambda: self._sync(el))

    def _sync(self, el: int) -> None:
        target = self.targets.get(el)
        if target is not None and target in self.elq.applied:
            self.apply_to_mirror(el, self.elq.applied[target])

    def apply_to_mirror(self, mirror_el: int, states) -> None:
        if mirror_el not in self.elq.doc:
            return
        props = self.elq.doc.get(mirror_el).elq
        if props is None or not props.apply_breakpoint_states:
            return
        self.elq.apply_breakpoint_states(mirror_el, states)

    def _target_changed(self, target: int, states) -> None:
        for el in self.mirrors.get(target, ()):
            self.apply_to_mirror(el, states)


def mirror_plugin() -> PluginDefinition:
    return PluginDefinition("elq-mirror", "1.0.0", Mirror)


# -- grid --------------------------------------------------------------

_COL = re.compile(r"^col-(\d+(?:\.\d+)?)(px|em|rem)?-(\d+)$")
_HIDDEN = re.compile(r"^hidden-(\d+(?:\.\d+)?)(px|em|rem)?-up$")
GRID_COLUMNS = 12


@dataclass(frozen=True)
class GridColumnSpec:
    """``col-{breakpoint}-{size}``, or ``hidden-{breakpoint}-up`` when size is None."""

    token: str
    breakpoint: Length
    size: int | None = None

    @property
    def hidden_up(self) -> bool:
        return self.size is None


def parse_column_class(token: str) -> GridColumnSpec | None:
    """Parse a grid class token; None for tokens that are not grid classes."""
    m = _COL.match(token)
    if m:
        size = int(m.group(3))
        if not 1 <= size <= GRID_COLUMNS:
            raise BadColumnClass(token)
        return GridColumnSpec(token, Length(float(m.group(1)), m.group(2) or "px"), size)
    m = _HIDDEN.match(token)
    if m:
        return GridColumnSpec(token, Length(float(m.group(1)), m.group(2) or "px"))
    if token.startswith("col-") or (token.startswith("hidden-") and token.endswith("-up")):
        raise BadColumnClass(token)
    return None


def column_specs(classes) -> list[GridColumnSpec]:
    return [s for s in (parse_column_class(c) for c in classes) if s is not None]


def _sort_px(length: Length) -> float:
    # ordering only; em/rem are ranked at the default 16px font size
    return length.to_px(16.0, 16.0)


def generate_css(specs) -> Stylesheet:
    """Rules for a set of column specs.

    Every column defaults to full width. Each spec then gets a rule keyed on
    the row's min-width state class; rules are emitted by ascending
    breakpoint so the largest satisfied breakpoint wins by source order.
    """
    specs = sorted(set(specs), key=lambda s: (_sort_px(s.breakpoint), s.hidden_up, s.token))
    row = Compound(None, frozenset({"row"}), ("row",))
    rules: list[Rule] = []

    def col(token):
        return Compound(None, frozenset({token}), (token,))

    for s in sorted({s.token for s in specs if not s.hidden_up}):
        rules.append(Rule(
            Selector((row, col(s)), ("child",)),
            (Declaration("width", Percent(100.0)),),
        ))
    for s in specs:
        cls = min_class(s.breakpoint)
        row_at = Compound(None, frozenset({"row", cls}), ("row", cls))
        if s.hidden_up:
            decl = Declaration("display", Keyword("none"))
        else:
            decl = Declaration("width", Percent(s.size * 100.0 / GRID_COLUMNS))
        rules.append(Rule(Selector((row_at, col(s.token)), ("child",)), (decl,)))
    return Stylesheet(tuple(Rule(r.selector, r.declarations, i) for i, r in enumerate(rules)))


class Grid:
    SHEET = "elq-grid"

    def __init__(self, elq: Elq, options: dict):
        self.elq = elq
        self.rows: dict[int, list[Length]] = {}
        self.specs: set[GridColumnSpec] = set()

    def _classes(self, el: int) -> list[str]:
        return self.elq.doc.get(el).classes

    def get_elements(self, el: int) -> list[int]:
        classes = self._classes(el)
        if "container" not in classes and "row" not in classes:
            return []
        return [n.id for n in self.elq.doc.iter(el, include_injected=False)
                if n.id != el and "row" in n.classes]

    def activate(self, el: int) -> None:
        if "row" not in self._classes(el):
            return
        doc = self.elq.doc
        specs: list[GridColumnSpec] = []
        for child in doc.get(el).children:
            node = doc.get(child)
            if not node.injected:
                specs.extend(column_specs(node.classes))
        bps: list[Length] = []
        for s in sorted(specs, key=lambda s: _sort_px(s.breakpoint)):
            if s.breakpoint not in bps:
                bps.append(s.breakpoint)
        self.rows[el] = bps
        props = doc.get(el).elq
        props.resize_detection = True
        props.update_breakpoints = True
        props.apply_breakpoint_states = True
        props.cycle_detection = True
        new = set(specs) - self.specs
        if new:
            self.specs |= new
            self.elq.layout.set_stylesheet(self.SHEET, generate_css(self.specs), first=True)

    def get_breakpoints(self, el: int) -> list[Breakpoint]:
        return [Breakpoint("width", v) for v in self.rows.get(el, ())]

    @property
    def css(self) -> str:
        sheet = self.elq.layout.stylesheet_named(self.SHEET)
        return sheet.serialize() if sheet is not None else ""


def grid_plugin() -> PluginDefinition:
    return PluginDefinition("elq-grid", "1.0.0", Grid)


BUNDLED = {
    "breakpoints": breakpoints_plugin,
    "classes": state_classes_plugin,
    "mirror": mirror_plugin,
    "grid": grid_plugin,
}
DEFAULT_PLUGINS = ("breakpoints", "classes", "mirror", "grid")


def install_default_plugins(elq: Elq, names=DEFAULT_PLUGINS) -> None:
    for name in names:
        elq.use(BUNDLED[name]())
