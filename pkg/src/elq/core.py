"""The ELQ instance: plugins, activation and update flows, events, cycles."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

from .batch import BatchProcessor
from .detection import FORCED_LAYOUT_LEVEL, ResizeDetection
from .errors import (
    DisplayNone,
    DuplicatePlugin,
    IncompatiblePlugin,
    NotActivated,
    PluginHookFailed,
)
from .layout import Page
from .style import Length

log = logging.getLogger(__name__)

MAX_SETTLE_ROUNDS = 10
UPDATE_LEVEL = FORCED_LAYOUT_LEVEL + 1
EVENTS = ("resize", "breakpointStatesChanged")
DIMENSIONS = ("width", "height")


@dataclass
class BehaviorProps:
    resize_detection: bool = False
    cycle_detection: bool = False
    update_breakpoints: bool = False
    apply_breakpoint_states: bool = False
    # plugin-defined properties
    extra: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Breakpoint:
    dimension: str
    value: Length

    def __post_init__(self):
        if self.dimension not in DIMENSIONS:
            raise ValueError(f"unknown breakpoint dimension {self.dimension!r}")

    def to_px(self, font_size: float, root_font_size: float) -> float:
        return self.value.to_px(font_size, root_font_size)


@dataclass(frozen=True)
class BreakpointState:
    breakpoint: Breakpoint
    side: str  # "min" (size >= value) or "max"

    def __post_init__(self):
        if self.side not in ("min", "max"):
            raise ValueError(f"bad breakpoint side {self.side!r}")


def merge_breakpoints(groups: Iterable[Iterable[Breakpoint]], font_size: float,
                      root_font_size: float) -> list[Breakpoint]:
    """Union keyed by (dimension, resolved px); first occurrence wins."""
    seen = set()
    out = []
    for group in groups:
        for bp in group:
            key = (bp.dimension, bp.to_px(font_size, root_font_size))
            if key not in seen:
                seen.add(key)
                out.append(bp)
    return out


def compute_states(breakpoints: Iterable[Breakpoint], width: float, height: float,
                   font_size: float, root_font_size: float) -> frozenset[BreakpointState]:
    """One state per breakpoint: min iff the size is at least the value."""
    sizes = {"width": width, "height": height}
    return frozenset(
        BreakpointState(bp, "min" if sizes[bp.dimension] >= bp.to_px(font_size, root_font_size) else "max")
        for bp in breakpoints
    )


class CycleHistory:
    """State sets an element went through during the current settling sequence.

    ``snapshots`` is scoped to the element's ancestor context and is reset
    when an ancestor applies new states; ``totals`` counts every accepted
    change until quiescence and carries the round cap.
    """

    def __init__(self, max_rounds: int = MAX_SETTLE_ROUNDS):
        self.max_rounds = max_rounds
        self.snapshots: dict[int, list[frozenset]] = {}
        self.totals: dict[int, int] = {}
        self.max_round_seen = 0

    def settle_round(self, el: int) -> int:
        return len(self.snapshots.get(el, ()))

    def reset(self, el: int) -> None:
        self.snapshots.pop(el, None)

    def clear(self) -> None:
        self.snapshots.clear()
        self.totals.clear()


def detect_cycle(hist: CycleHistory, el: int, new_states: frozenset) -> bool:
    """True if ``new_states`` revisits a state set of this sequence or the round cap is hit.

    Conservative: a long but legitimate chain of changes is also reported.
    """
    snaps = hist.snapshots.setdefault(el, [])
    total = hist.totals.get(el, 0)
    hist.max_round_seen = max(hist.max_round_seen, total)
    if new_states in snaps or total > hist.max_rounds:
        return True
    snaps.append(new_states)
    hist.totals[el] = total + 1
    return False


@dataclass
class PluginDefinition:
    name: str
    version: str
    make: Callable[["Elq", dict], Any]
    is_compatible: Callable[["Elq"], bool] = lambda instance: True


class Subscription:
    def __init__(self, registry: list, listener: Callable):
        self._registry = registry
        self.listener = listener

    def unsubscribe(self) -> None:
        if self.listener in self._registry:
            self._registry.remove(self.listener)


class Elq:
    """An ELQ instance bound to one page.

    ``strategy`` picks the resize detector used for elements whose plugins ask
    for resize detection; installs always go through the batch processor.
    """

    def __init__(self, page: Page, strategy: str = "scroll",
                 max_settle_rounds: int = MAX_SETTLE_ROUNDS,
                 batch: BatchProcessor | None = None):
        self.page = page
        self.doc = page.doc
        self.layout = page.layout
        self.loop = page.loop
        self.batch = batch or BatchProcessor(self.loop)
        self.detection = ResizeDetection(self.layout, self.loop, self.batch, strategy)
        self.history = CycleHistory(max_settle_rounds)
        self.plugins: list[tuple[str, Any]] = []
        self.versions: dict[str, str] = {}
        self.activated: set[int] = set()
        self.applied: dict[int, frozenset[BreakpointState]] = {}
        self.warnings: list[dict] = []
        self.errors: list[PluginHookFailed] = []
        self.cycles_detected = 0
        self._listeners: dict[str, list[Callable]] = {e: [] for e in EVENTS}
        self.loop.idle_hooks.append(self.history.clear)

    # -- plugins ------------------------------------------------------

    def use(self, definition: PluginDefinition, options: dict | None = None):
        if definition.name in self.versions:
            raise DuplicatePlugin(f"plugin {definition.name!r} is already registered")
        if not definition.is_compatible(self):
            raise IncompatiblePlugin(
                f"plugin {definition.name!r} {definition.version} is not compatible"
            )
        api = definition.make(self, dict(options or {}))
        self.plugins.append((definition.name, api))
        self.versions[definition.name] = definition.version
        return api

    def plugin(self, name: str):
        for n, api in self.plugins:
            if n == name:
                return api
        raise KeyError(name)

    def _hook(self, name: str, api: Any, hook: str, *args):
        fn = getattr(api, hook, None)
        if fn is None:
            return None
        try:
            return fn(*args)
        except PluginHookFailed:
            raise
        except Exception as exc:
            raise PluginHookFailed(name, hook, exc) from exc

    # -- events -------------------------------------------------------

    def on(self, event: str, listener: Callable) -> Subscription:
        if event not in self._listeners:
            raise ValueError(f"unknown event {event!r}")
        self._listeners[event].append(listener)
        return Subscription(self._listeners[event], listener)

    def emit(self, event: str, *args) -> None:
        for listener in list(self._listeners[event]):
            listener(*args)

    def warn(self, code: str, el: int | None, message: str, **extra) -> None:
        entry = {"code": code, "element": el, "message": message, **extra}
        self.warnings.append(entry)
        log.warning("%s: %s", code, message)

    # -- activation ---------------------------------------------------

    def behavior(self, el: int) -> BehaviorProps:
        props = self.doc.get(el).elq
        if props is None:
            raise NotActivated(f"element {el} is not activated")
        return props

    def activate(self, elements: int | Iterable[int]) -> None:
        if isinstance(elements, int):
            elements = [elements]
        for el in list(elements):
            self._activate(el)

    def _activate(self, el: int) -> None:
        node = self.doc.get(el)
        if el in self.activated:
            return
        self.activated.add(el)
        node.elq = BehaviorProps()
        for name, api in self.plugins:
            extras = self._hook(name, api, "get_elements", el) or []
            for extra in extras:
                self._activate(extra)
        for name, api in self.plugins:
            self._hook(name, api, "activate", el)
        if node.elq.resize_detection and el not in self.detection.detectors:
            self.detection.install(el, listener=self._on_resize)
        self.batch.add(UPDATE_LEVEL, lambda: self._safe_update(el))

    def _on_resize(self, el: int) -> None:
        self.emit("resize", el)
        self._safe_update(el)

    def _safe_update(self, el: int) -> None:
        if el not in self.doc:
            return
        try:
            self.update(el)
        except PluginHookFailed as exc:
            self.errors.append(exc)
            self.warn("E_PLUGIN_HOOK", el, str(exc), plugin=exc.name, hook=exc.hook)

    # -- update -------------------------------------------------------

    def breakpoints(self, el: int, font_size: float | None = None) -> list[Breakpoint]:
        box = self.layout.box(el)
        font = font_size if font_size is not None else (box.font_size if box else self.doc.root_font_size)
        groups = [self._hook(name, api, "get_breakpoints", el) or [] for name, api in self.plugins]
        return merge_breakpoints(groups, font, self.layout.root_font_size())

    def current_states(self, el: int) -> frozenset[BreakpointState] | None:
        box = self.layout.box(el)
        if box is None:
            if not self.layout.dirty:
                return None
            try:
                box = self.layout.read_size(el)
            except DisplayNone:
                return None
        bps = self.breakpoints(el, box.font_size)
        return compute_states(bps, box.width, box.height, box.font_size,
                              self.layout.root_font_size())

    def update(self, el: int) -> None:
        if el not in self.activated:
            raise NotActivated(f"element {el} is not activated")
        props = self.doc.get(el).elq
        if not props.update_breakpoints:
            return
        states = self.current_states(el)
        if states is None:
            return
        previous = self.applied.get(el, frozenset())
        if states == previous:
            return
        if props.cycle_detection:
            rnd = self.history.settle_round(el)
            if detect_cycle(self.history, el, states):
                self.cycles_detected += 1
                self.warn("W_CYCLE_DETECTED", el,
                          f"style cycle detected on element {el} at round {rnd}; "
                          "keeping previous breakpoint states",
                          round=rnd)
                return
        self.applied[el] = states
        # descendants flipping back after this change are not oscillating
        for d in list(self.history.snapshots):
            if d != el and d in self.doc and any(a.id == el for a in self.doc.ancestors(d)):
                self.history.reset(d)
        if props.apply_breakpoint_states:
            self.apply_breakpoint_states(el, states, record=False)
        self.emit("breakpointStatesChanged", el, states)

    def apply_breakpoint_states(self, el: int, states: frozenset[BreakpointState],
                                record: bool = True) -> None:
        if record:
            self.applied[el] = states
        for name, api in self.plugins:
            self._hook(name, api, "apply_breakpoint_states", el, states)

    @property
    def settle_rounds(self) -> int:
        return self.history.max_round_seen
