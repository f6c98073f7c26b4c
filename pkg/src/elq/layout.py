"""Box layout with a browser-like layout queue, plus a deterministic event loop.

Mutations only mark the tree dirty. Reading geometry while dirty forces a
synchronous layout pass (``forced_layouts``); otherwise the loop performs one
layout at the end of each tick (``scheduled_layouts``). These counters are the
performance observable of the whole package.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

from .dom import Document, Mutation
from .errors import DisplayNone, NonQuiescent, UnknownElement
from .style import Keyword, Length, Percent, Stylesheet, cascade


class Box(NamedTuple):
    element: int
    width: float
    height: float
    font_size: float

    @property
    def size(self) -> tuple[float, float]:
        return (self.width, self.height)


@dataclass
class Counters:
    forced_layouts: int = 0
    scheduled_layouts: int = 0
    layout_passes: int = 0

    def snapshot(self) -> "Counters":
        return Counters(self.forced_layouts, self.scheduled_layouts, self.layout_passes)

    def __sub__(self, other: "Counters") -> "Counters":
        return Counters(
            self.forced_layouts - other.forced_layouts,
            self.scheduled_layouts - other.scheduled_layouts,
            self.layout_passes - other.layout_passes,
        )


@dataclass
class LayoutState:
    committed: dict[int, Box] = field(default_factory=dict)
    # nothing has been laid out yet
    dirty: bool = True
    pending: list[Mutation] = field(default_factory=list)
    counters: Counters = field(default_factory=Counters)


# Per-element layout inputs pulled out of the cascade, cached until a mutation
# can change them: (flag, width_kind, width, height_kind, height, font_kind,
# font, position). flag is 0 laid out, 1 display:none, 2 injected.
_Computed = tuple

_AUTO, _PCT, _PX, _EM, _REM = range(5)
_KIND = {"px": _PX, "em": _EM, "rem": _REM}


def _compile(value) -> tuple[int, float]:
    if value is None or isinstance(value, Keyword):
        return _AUTO, 0.0
    if isinstance(value, Percent):
        return _PCT, value.fraction
    return _KIND[value.unit], value.magnitude


class LayoutEngine:
    def __init__(self, doc: Document, sheet: Stylesheet | None = None,
                 viewport: tuple[float, float] = (1024.0, 768.0)):
        self.doc = doc
        self.state = LayoutState()
        self.viewport = (float(viewport[0]), float(viewport[1]))
        self._sheets: list[tuple[str, Stylesheet]] = []
        self._combined = Stylesheet()
        self._style_cache: dict[int, _Computed] = {}
        self.commit_listeners: list[Callable[[set[int], bool], None]] = []
        if sheet is not None:
            self._sheets.append(("user", sheet))
            self._combined = sheet
        doc.observe(self.mutate)

    # -- stylesheet management ----------------------------------------

    @property
    def stylesheet(self) -> Stylesheet:
        return self._combined

    def add_stylesheet(self, sheet: Stylesheet, first: bool = False) -> None:
        """Register extra rules; ``first`` puts them before existing sheets."""
        self.set_stylesheet(f"sheet-{len(self._sheets)}", sheet, first)

    def set_stylesheet(self, name: str, sheet: Stylesheet, first: bool = False) -> None:
        """Install or replace the named sheet, keeping its position if it exists."""
        for i, (n, _) in enumerate(self._sheets):
            if n == name:
                self._sheets[i] = (name, sheet)
                break
        else:
            if first:
                self._sheets.insert(0, (name, sheet))
            else:
                self._sheets.append((name, sheet))
        combined = Stylesheet()
        for _, s in self._sheets:
            combined = combined + s
        self._combined = combined
        self.mutate(Mutation("stylesheet", None, name))

    def stylesheet_named(self, name: str) -> Stylesheet | None:
        for n, s in self._sheets:
            if n == name:
                return s
        return None

    def set_viewport(self, width: float, height: float | None = None) -> None:
        height = self.viewport[1] if height is None else float(height)
        new = (float(width), height)
        if new == self.viewport:
            return
        self.viewport = new
        self.mutate(Mutation("viewport", None, new))

    # -- queue --------------------------------------------------------

    def mutate(self, mutation: Mutation) -> None:
        """Record a mutation; no layout work happens here."""
        if mutation.target is not None and mutation.target not in self.doc:
            raise UnknownElement(mutation.target)
        self.state.pending.append(mutation)
        self.state.dirty = True
        self._invalidate(mutation)

    def _invalidate(self, m: Mutation) -> None:
        cache = self._style_cache
        if m.kind == "stylesheet":
            cache.clear()
        elif m.kind == "style":
            cache.pop(m.target, None)
        elif m.kind in ("classes", "attribute"):
            for el in self.doc.iter(m.target):
                cache.pop(el.id, None)
        elif m.kind == "remove":
            for el in self.doc.iter(m.target):
                cache.pop(el.id, None)

    @property
    def dirty(self) -> bool:
        return self.state.dirty

    @property
    def counters(self) -> Counters:
        return self.state.counters

    def flush(self, forced: bool) -> set[int]:
        """Run one layout pass if dirty, charging it as forced or scheduled."""
        if not self.state.dirty:
            return set()
        if forced:
            self.state.counters.forced_layouts += 1
        else:
            self.state.counters.scheduled_layouts += 1
        return self.layout_pass(forced=forced)

    def ensure_layout(self) -> None:
        self.flush(forced=True)

    # -- reads --------------------------------------------------------

    def read_size(self, el: int) -> Box:
        """Geometry read; forces a layout if anything is pending."""
        self.doc.get(el)
        self.flush(forced=True)
        box = self.box(el)
        if box is None:
            raise DisplayNone(el)
        return box

    def computed_style(self, el: int) -> dict:
        """Computed-style read (also forcing), returned as plain strings."""
        self.doc.get(el)
        self.flush(forced=True)
        decls = cascade(self.doc, self._combined, el)
        out = {prop: str(d.value) for prop, d in decls.items()}
        out.setdefault("position", "static")
        out.setdefault("display", "block")
        return out

    def reposition_scrollbars(self, el: int) -> None:
        """Read-dependent write: needs committed geometry, changes none."""
        self.doc.get(el)
        self.flush(forced=True)

    def box(self, el: int) -> Box | None:
        """Last committed box, without forcing anything.

        Injected detector nodes are not stored; they always cover their host.
        """
        box = self.state.committed.get(el)
        if box is not None:
            return box
        node = self.doc.nodes.get(el)
        if node is None or not node.injected:
            return None
        host = node
        while host.injected:
            host = self.doc.nodes[host.parent]
        hb = self.state.committed.get(host.id)
        return None if hb is None else Box(el, hb.width, hb.height, hb.font_size)

    def root_font_size(self) -> float:
        root = self.state.committed.get(self.doc.root) if self.doc.root is not None else None
        return root.font_size if root is not None else self.doc.root_font_size

    # -- the layout algorithm -----------------------------------------

    def _computed(self, el: int) -> _Computed:
        hit = self._style_cache.get(el)
        if hit is not None:
            return hit
        if self.doc.nodes[el].injected:
            value = (2, _AUTO, 0.0, _AUTO, 0.0, _AUTO, 0.0, "absolute")
            self._style_cache[el] = value
            return value
        decls = cascade(self.doc, self._combined, el)
        display = decls.get("display")
        position = decls.get("position")
        get = decls.get
        wk, wv = _compile(get("width").value if get("width") else None)
        hk, hv = _compile(get("height").value if get("height") else None)
        fk, fv = _compile(get("font-size").value if get("font-size") else None)
        value = (
            1 if display is not None and display.value == Keyword("none") else 0,
            wk, wv, hk, hv, fk, fv,
            position.value.name if position is not None else "static",
        )
        self._style_cache[el] = value
        return value

    def layout_pass(self, forced: bool = False) -> set[int]:
        """Recompute every box from the current document; return changed ids."""
        doc = self.doc
        state = self.state
        old = state.committed
        boxes: dict[int, Box] = {}
        if doc.root is not None:
            boxes = self._compute_boxes()
        state.committed = boxes
        state.pending = []
        state.dirty = False
        state.counters.layout_passes += 1
        get = old.get
        changed = {el for el, box in boxes.items() if get(el) != box}
        if len(old) != len(boxes) or changed:
            changed.update(el for el in old if el not in boxes)
        for listener in list(self.commit_listeners):
            listener(changed, forced)
        return changed

    def _compute_boxes(self) -> dict[int, Box]:
        doc = self.doc
        nodes = doc.nodes
        vw, vh = self.viewport
        base = doc.root_font_size
        cache = self._style_cache
        computed = self._computed

        rc = computed(doc.root)
        if rc[0]:
            return {}
        root_font = _font(rc[5], rc[6], base, base)

        # top-down: font, width, explicit height (-1.0 = auto)
        order: list[tuple] = []
        stack: list[tuple] = [(doc.root, base, vw, vh)]
        pop = stack.pop
        push = stack.append
        record = order.append
        while stack:
            el, pf, pw, ph = pop()
            c = cache.get(el) or computed(el)
            if c[0]:
                # display:none, or an injected detector node (see box())
                continue
            fk = c[5]
            if fk == _AUTO:
                f = pf
            else:
                f = _font(fk, c[6], pf, root_font if el != doc.root else base)
            wk = c[1]
            if wk == _AUTO:
                w = pw
            elif wk == _PCT:
                w = pw * c[2]
            elif wk == _PX:
                w = c[2]
            elif wk == _EM:
                w = c[2] * f
            else:
                w = c[2] * root_font
            hk = c[3]
            if hk == _AUTO:
                h = -1.0
            elif hk == _PCT:
                h = -1.0 if ph < 0 else ph * c[4]
            elif hk == _PX:
                h = c[4]
            elif hk == _EM:
                h = c[4] * f
            else:
                h = c[4] * root_font
            children = nodes[el].children
            record((el, f, w, h, children))
            for child in reversed(children):
                push((child, f, w, h))

        # bottom-up: auto heights sum laid-out, non-injected children
        height: dict[int, float] = {}
        boxes: dict[int, Box] = {}
        hget = height.get
        new = tuple.__new__
        for el, f, w, h, children in reversed(order):
            if h < 0:
                h = 0.0
                for child in children:
                    ch = hget(child)
                    if ch is not None:
                        h += ch
            height[el] = h
            boxes[el] = new(Box, (el, w, h, f))

        return boxes


def _font(kind: int, value: float, parent_font: float, root_font: float) -> float:
    if kind == _AUTO:
        return parent_font
    if kind == _PCT or kind == _EM:
        return parent_font * value
    if kind == _REM:
        return value * root_font
    return value


# -- event loop ------------------------------------------------------------

class EventLoop:
    """Deterministic macrotask/microtask loop with a rendering step.

    One ``tick``: drain microtasks, run one macrotask, drain microtasks, then
    the rendering step (a scheduled layout if dirty, then render hooks).
    Anything queued by the rendering step is seen on the next tick.
    """

    def __init__(self, layout: LayoutEngine | None = None):
        self.layout = layout
        self.macrotasks: deque[Callable[[], None]] = deque()
        self.microtasks: deque[Callable[[], None]] = deque()
        self.tick_index = 0
        self.render_hooks: list[Callable[[], None]] = []
        self.idle_hooks: list[Callable[[], None]] = []

    def call_soon(self, fn: Callable[[], None]) -> None:
        self.macrotasks.append(fn)

    def queue_microtask(self, fn: Callable[[], None]) -> None:
        self.microtasks.append(fn)

    def _drain(self) -> None:
        while self.microtasks:
            self.microtasks.popleft()()

    @property
    def quiescent(self) -> bool:
        return (
            not self.macrotasks
            and not self.microtasks
            and (self.layout is None or not self.layout.dirty)
        )

    def tick(self) -> None:
        self.tick_index += 1
        self._drain()
        if self.macrotasks:
            self.macrotasks.popleft()()
        self._drain()
        if self.layout is not None and self.layout.dirty:
            self.layout.flush(forced=False)
        for hook in list(self.render_hooks):
            hook()

    def run_until_quiescent(self, max_ticks: int = 10_000) -> int:
        ticks = 0
        while not self.quiescent:
            if ticks >= max_ticks:
                raise NonQuiescent(f"event loop still busy after {max_ticks} ticks")
            self.tick()
            ticks += 1
        for hook in list(self.idle_hooks):
            hook()
        return ticks


class Page:
    """A document, its stylesheets, layout state and event loop."""

    def __init__(self, doc: Document, sheet: Stylesheet | None = None,
                 viewport: tuple[float, float] = (1024.0, 768.0)):
        self.doc = doc
        self.layout = LayoutEngine(doc, sheet, viewport)
        self.loop = EventLoop(self.layout)

    def load(self) -> None:
        """Initial rendering: one scheduled layout, like a page load."""
        self.loop.run_until_quiescent()

    def settle(self, max_ticks: int = 10_000) -> int:
        return self.loop.run_until_quiescent(max_ticks)
