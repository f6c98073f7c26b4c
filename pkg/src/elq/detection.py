"""Element resize detection by injection.

Two strategies are simulated:

* ``object``: one frame-like ``object`` child that tracks the target's size.
  Initialising the frame needs the target's geometry right away, so every
  install on a dirty tree forces a layout, and every frame costs memory.
* ``scroll``: a container with four overflow ``div``s. The install is split
  over three batch levels (read, mutate, forced layout) so a whole batch of
  installs costs a constant number of forced layouts.

Both strategies deliver the same event stream: after each layout pass, every
ready detector whose target changed size queues a resize notification, which
listeners receive on the next microtask checkpoint.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .batch import BatchProcessor
from .dom import Node
from .errors import AlreadyInstalled, DisplayNone, NotInstalled, VoidTarget
from .layout import EventLoop, LayoutEngine

# heap growth per injected object frame, in MB
OBJECT_MEMORY_MB = Fraction(55, 100)

# every injected node carries this class so stylesheets and reports can tell
# detector nodes apart
INJECTED_CLASS = "elq-injected"

STRATEGIES = ("object", "scroll")

READ_LEVEL, MUTATION_LEVEL, FORCED_LAYOUT_LEVEL = 0, 1, 2


@dataclass
class Detector:
    target: int
    strategy: str
    last_size: tuple[float, float] | None = None
    injected_root: int | None = None
    listeners: list[Callable[[int], None]] = field(default_factory=list)
    install_state: str = "installing"  # installing -> positioned -> ready
    set_position: bool = False


@dataclass
class StrategyCost:
    forced_layouts_during_install: int = 0
    installs: int = 0
    objects: int = 0

    @property
    def memory_units(self) -> float:
        return float(self.objects * OBJECT_MEMORY_MB)


class CostLedger(dict):
    def __missing__(self, strategy):
        cost = self[strategy] = StrategyCost()
        return cost

    def as_dict(self) -> dict:
        return {
            name: {
                "forced_layouts_during_install": c.forced_layouts_during_install,
                "installs": c.installs,
                "memory_units": c.memory_units,
            }
            for name, c in sorted(self.items())
        }


def object_subtree() -> Node:
    return Node("object", classes=["erd-object", INJECTED_CLASS],
                attributes={"type": "text/html"})


def scroll_subtree() -> Node:
    parts = ["erd-expand", "erd-expand-child", "erd-shrink", "erd-shrink-child"]
    return Node(
        "div",
        classes=["erd-scroll-container", INJECTED_CLASS],
        children=[Node("div", classes=[p, INJECTED_CLASS]) for p in parts],
    )


class ResizeDetection:
    """Registry of resize detectors attached to one page."""

    def __init__(self, layout: LayoutEngine, loop: EventLoop,
                 batch: BatchProcessor | None = None, strategy: str = "scroll"):
        if strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {strategy!r}")
        self.layout = layout
        self.doc = layout.doc
        self.loop = loop
        self.batch = batch
        self.strategy = strategy
        self.detectors: dict[int, Detector] = {}
        self.ledger = CostLedger()
        # (tick, element, (width, height)) for every delivered notification
        self.events: list[tuple[int, int, tuple[float, float]]] = []
        self.position_changes: list[int] = []
        layout.commit_listeners.append(self.on_layout_committed)
        loop.render_hooks.append(self._render_step)

    # -- install ------------------------------------------------------

    def _check_target(self, el: int) -> None:
        node = self.doc.get(el)
        if node.void:
            raise VoidTarget(f"cannot observe void element <{node.tag}>")
        if el in self.detectors:
            raise AlreadyInstalled(f"element {el} already has a resize detector")

    @contextmanager
    def _charge(self, strategy: str):
        before = self.layout.counters.forced_layouts
        try:
            yield
        finally:
            self.ledger[strategy].forced_layouts_during_install += (
                self.layout.counters.forced_layouts - before
            )

    def install(self, el: int, strategy: str | None = None,
                listener: Callable[[int], None] | None = None) -> Detector:
        """Install with the registry's default (or given) strategy, batched."""
        strategy = strategy or self.strategy
        if strategy == "object":
            det = self.install_object(el, deferred=self.batch is not None)
        elif strategy == "scroll":
            det = self.install_scroll(el)
        else:
            raise ValueError(f"unknown strategy {strategy!r}")
        if listener is not None:
            det.listeners.append(listener)
        return det

    def install_object(self, el: int, deferred: bool = False) -> Detector:
        self._check_target(el)
        det = self.detectors[el] = Detector(el, "object")
        self.ledger["object"].installs += 1

        def job():
            if self.detectors.get(el) is not det or el not in self.doc:
                return
            with self._charge("object"):
                det.injected_root = self.doc.insert_subtree(el, object_subtree(), injected=True)
                self.ledger["object"].objects += 1
                # the frame sizes itself from the target straight away
                det.last_size = self._size_now(el)
                det.install_state = "positioned"

        if deferred and self.batch is not None:
            self.batch.add(MUTATION_LEVEL, job)
        else:
            job()
        return det

    def install_scroll(self, el: int) -> Detector:
        if self.batch is None:
            raise ValueError("batched scroll install needs a batch processor")
        self._check_target(el)
        det = self.detectors[el] = Detector(el, "scroll")
        self.ledger["scroll"].installs += 1
        shared: dict = {}
        live = lambda: self.detectors.get(el) is det and el in self.doc

        def read():
            if live():
                with self._charge("scroll"):
                    shared["style"] = self.layout.computed_style(el)

        def mutate():
            if live() and "style" in shared:
                with self._charge("scroll"):
                    self._inject_scroll(det, shared["style"])

        def position():
            if live() and det.injected_root is not None:
                with self._charge("scroll"):
                    self._position_scrollbars(det)

        self.batch.add(READ_LEVEL, read)
        self.batch.add(MUTATION_LEVEL, mutate)
        self.batch.add(FORCED_LAYOUT_LEVEL, position)
        return det

    def install_scroll_naive(self, el: int) -> Detector:
        """Scroll install with all steps run back to back (no batching)."""
        self._check_target(el)
        det = self.detectors[el] = Detector(el, "scroll")
        self.ledger["scroll-naive"].installs += 1
        with self._charge("scroll-naive"):
            style = self.layout.computed_style(el)
            self._inject_scroll(det, style)
            self._position_scrollbars(det)
        return det

    def _inject_scroll(self, det: Detector, style: dict) -> None:
        el = det.target
        if style.get("position", "static") == "static":
            self.doc.set_style(el, "position", "relative")
            det.set_position = True
            self.position_changes.append(el)
        det.injected_root = self.doc.insert_subtree(el, scroll_subtree(), injected=True)

    def _position_scrollbars(self, det: Detector) -> None:
        self.layout.reposition_scrollbars(det.target)
        box = self.layout.box(det.target)
        det.last_size = box.size if box is not None else None
        det.install_state = "positioned"

    def _size_now(self, el: int) -> tuple[float, float] | None:
        try:
            return self.layout.read_size(el).size
        except DisplayNone:
            return None

    # -- events -------------------------------------------------------

    def listen(self, el: int, listener: Callable[[int], None]) -> Callable[[], None]:
        det = self.detectors.get(el)
        if det is None:
            raise NotInstalled(f"element {el} has no resize detector")
        det.listeners.append(listener)
        return lambda: det.listeners.remove(listener) if listener in det.listeners else None

    def _render_step(self) -> None:
        # scroll handlers fire asynchronously after the scrollbars were placed
        for det in self.detectors.values():
            if det.install_state == "positioned":
                det.install_state = "arming"
                self.loop.queue_microtask(lambda det=det: self._ready(det))

    def _ready(self, det: Detector) -> None:
        if self.detectors.get(det.target) is not det:
            return
        det.install_state = "ready"
        box = self.layout.box(det.target)
        if box is not None and box.size != det.last_size:
            # resized (or first displayed) while installing; the event is late, not lost
            det.last_size = box.size
            self._deliver(det, box.size)

    def on_layout_committed(self, changed: set[int], forced: bool = False) -> None:
        if not self.detectors:
            return
        if len(changed) < len(self.detectors):
            candidates = [self.detectors[el] for el in sorted(changed) if el in self.detectors]
        else:
            candidates = [self.detectors[el] for el in sorted(self.detectors) if el in changed]
        committed = self.layout.state.committed
        for det in candidates:
            if det.install_state != "ready":
                continue
            box = committed.get(det.target)
            if box is None:
                continue  # display:none suspends events
            size = box.size
            if size != det.last_size:
                det.last_size = size
                self.loop.queue_microtask(lambda det=det, size=size: self._deliver(det, size))

    def _deliver(self, det: Detector, size: tuple[float, float]) -> None:
        if self.detectors.get(det.target) is not det:
            return
        self.events.append((self.loop.tick_index, det.target, size))
        for listener in list(det.listeners):
            listener(det.target)

    # -- removal ------------------------------------------------------

    def uninstall(self, el: int) -> None:
        det = self.detectors.pop(el, None)
        if det is None:
            raise NotInstalled(f"element {el} has no resize detector")
        det.listeners.clear()
        if el not in self.doc:
            return
        if det.injected_root is not None and det.injected_root in self.doc:
            self.doc.remove_subtree(det.injected_root)
        if det.set_position:
            self.doc.set_style(el, "position", None)

    def injected_nodes(self) -> list[int]:
        return [el.id for el in self.doc.iter() if el.injected]
