"""Scenario runner, counter benchmarks and static validation.

Scenario files are JSON::

    {"viewport": [1000, 800],
     "steps": [{"op": "set_viewport", "width": 600},
               {"op": "set_style", "target": "#menu", "property": "width", "value": "40%"},
               {"op": "add_subtree", "parent": "#main", "markup": "<div></div>"},
               {"op": "remove", "target": ".sidebar"},
               {"op": "settle"}]}

Targets are ``#id`` (the markup ``id`` attribute) or a selector that must
match exactly one element.
"""

from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .batch import BatchProcessor, double_width, double_width_naive
from .core import MAX_SETTLE_ROUNDS, Elq
from .detection import ResizeDetection
from .dom import Document, get_elq_attribute, parse_fragment, parse_markup
from .errors import BadBreakpointToken, BadColumnClass, ElqError, ScenarioError
from .layout import Page
from .plugins import DEFAULT_PLUGINS, install_default_plugins, parse_breakpoints, parse_column_class, state_class
from .style import Stylesheet, cascade, format_number, matches, parse_selector, parse_stylesheet

SCHEMA_VERSION = 1
CSV_HEADER = ("n", "strategy", "forced_layouts", "scheduled_layouts", "memory_units")
WORKLOADS = ("install", "doubleWidth")
BENCH_STRATEGIES = ("object", "scroll", "scroll-naive")


@dataclass
class Config:
    strategy: str = "scroll"
    max_settle_rounds: int = MAX_SETTLE_ROUNDS
    plugins: tuple[str, ...] = DEFAULT_PLUGINS
    viewport: tuple[float, float] = (1024.0, 768.0)
    max_ticks: int = 10_000
    # activation order of [elq] elements; None keeps document order
    shuffle_seed: int | None = None


def _num(x: float):
    x = round(float(x), 6)
    return int(x) if x == int(x) else x


def element_key(doc: Document, el: int) -> str:
    node = doc.get(el)
    if "id" in node.attributes:
        return "#" + node.attributes["id"]
    path = []
    cur = node
    while cur.parent is not None:
        parent = doc.get(cur.parent)
        siblings = [c for c in parent.children if not doc.get(c).injected]
        path.append(str(siblings.index(cur.id)))
        cur = parent
    return "/" + "/".join(reversed(path))


def resolve_target(doc: Document, target: str) -> int:
    if target.startswith("#") and all(ch not in target for ch in " .>"):
        node = doc.by_attribute_id(target[1:])
        if node is None:
            raise ScenarioError(f"no element with id {target[1:]!r}")
        return node.id
    try:
        sel = parse_selector(target)
    except Exception as exc:
        raise ScenarioError(f"bad target selector {target!r}: {exc}") from exc
    found = [el.id for el in doc.iter(include_injected=False) if matches(sel, doc, el.id)]
    if len(found) != 1:
        raise ScenarioError(f"target {target!r} matched {len(found)} elements, expected 1")
    return found[0]


@dataclass
class Report:
    elements: dict[str, dict] = field(default_factory=dict)
    counters: dict[str, int] = field(default_factory=dict)
    warnings: list[dict] = field(default_factory=list)
    generated_css: str = ""
    injected_nodes: list[dict] = field(default_factory=list)
    steps: list[dict] = field(default_factory=list)
    ledger: dict = field(default_factory=dict)
    position_changes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "elements": self.elements,
            "counters": self.counters,
            "warnings": self.warnings,
            "generated_css": self.generated_css,
            "injected_nodes": self.injected_nodes,
            "steps": self.steps,
            "ledger": self.ledger,
            "position_changes": self.position_changes,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2) + "\n"

    def classes(self, key: str) -> list[str]:
        return self.elements[key]["classes"]


class Engine:
    """Page + ELQ instance configured for a harness run."""

    def __init__(self, doc: Document, sheet: Stylesheet, config: Config):
        self.config = config
        self.doc = doc
        self.user_sheet = sheet
        self.page = Page(doc, sheet, config.viewport)
        self.elq = Elq(self.page, strategy=config.strategy,
                       max_settle_rounds=config.max_settle_rounds)
        install_default_plugins(self.elq, config.plugins)

    def activate_all(self, root: int | None = None) -> None:
        found = [el.id for el in self.doc.iter(root, include_injected=False)
                 if get_elq_attribute(el, "elq") is not None]
        if self.config.shuffle_seed is not None:
            random.Random(self.config.shuffle_seed).shuffle(found)
        self.elq.activate(found)

    def settle(self) -> int:
        return self.page.settle(self.config.max_ticks)

    def step(self, step: dict) -> None:
        op = step.get("op")
        doc = self.doc
        if op == "set_viewport":
            self.page.layout.set_viewport(step["width"], step.get("height"))
        elif op == "set_style":
            doc.set_style(resolve_target(doc, step["target"]), step["property"], step.get("value"))
        elif op == "add_subtree":
            parent = resolve_target(doc, step["parent"])
            nodes = parse_fragment(step["markup"])
            first = doc.insert_subtree(parent, nodes)
            start = doc.get(parent).children.index(first)
            for child in doc.get(parent).children[start:]:
                self.activate_all(child)
        elif op == "remove":
            el = resolve_target(doc, step["target"])
            for sub in list(doc.iter(el)):
                if sub.id in self.elq.detection.detectors:
                    self.elq.detection.uninstall(sub.id)
            doc.remove_subtree(el)
        elif op == "settle":
            pass
        else:
            raise ScenarioError(f"unknown scenario step {op!r}")
        self.settle()

    def snapshot(self) -> dict[str, list[str]]:
        return {
            element_key(self.doc, el): list(self.doc.get(el).classes)
            for el in sorted(self.elq.activated) if el in self.doc
        }

    def report(self, steps: list[dict] | None = None) -> Report:
        doc = self.doc
        layout = self.page.layout
        sheet = layout.stylesheet
        elements = {}
        for node in doc.iter(include_injected=False):
            box = layout.box(node.id)
            states = self.elq.applied.get(node.id, frozenset())
            elements[element_key(doc, node.id)] = {
                "tag": node.tag,
                "classes": list(node.classes),
                "box": None if box is None else {
                    "width": _num(box.width), "height": _num(box.height),
                    "font_size": _num(box.font_size),
                },
                "states": sorted(state_class(s) for s in states),
                "style": {p: str(d.value) for p, d in sorted(cascade(doc, sheet, node.id).items())},
            }
        injected = []
        for node in doc.iter():
            if not node.injected:
                continue
            host = node
            while host.injected:
                host = doc.get(host.parent)
            injected.append({
                "host": element_key(doc, host.id),
                "tag": node.tag,
                "classes": list(node.classes),
                "matched_by": [str(r.selector) for r in self.user_sheet.rules
                               if matches(r.selector, doc, node.id)],
            })
        c = layout.counters
        grid = dict(self.elq.plugins).get("elq-grid")
        return Report(
            elements=elements,
            counters={
                "forced_layouts": c.forced_layouts,
                "scheduled_layouts": c.scheduled_layouts,
                "layout_passes": c.layout_passes,
                "resize_events": len(self.elq.detection.events),
                "cycles_detected": self.elq.cycles_detected,
                "settle_rounds": self.elq.settle_rounds,
            },
            warnings=[dict(w, element=None if w["element"] is None or w["element"] not in doc
                           else element_key(doc, w["element"])) for w in self.elq.warnings],
            generated_css=grid.css if grid is not None else "",
            injected_nodes=injected,
            steps=steps or [],
            ledger=_normalize(self.elq.detection.ledger.as_dict()),
            position_changes=[element_key(doc, el) for el in self.elq.detection.position_changes
                              if el in doc],
        )


def _normalize(obj):
    if isinstance(obj, float):
        return _num(obj)
    if isinstance(obj, dict):
        return {k: _normalize(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_normalize(v) for v in obj]
    return obj


def run_scenario(markup: str, css: str, scenario: dict | None = None,
                 config: Config | None = None) -> Report:
    """In-memory variant of :func:`run`."""
    config = config or Config()
    scenario = scenario or {}
    if "viewport" in scenario:
        vp = scenario["viewport"]
        config = Config(**{**config.__dict__, "viewport": (float(vp[0]), float(vp[1]))})
    engine = Engine(parse_markup(markup), parse_stylesheet(css), config)
    engine.activate_all()
    engine.settle()
    steps = [{"op": "activate", "elements": engine.snapshot()}]
    for step in scenario.get("steps", []):
        engine.step(step)
        steps.append({"op": step.get("op"), "elements": engine.snapshot()})
    return engine.report(steps)


def load_scenario(path: str | Path) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc
    if not isinstance(data, dict) or not isinstance(data.get("steps", []), list):
        raise ScenarioError(f"{path}: expected an object with a 'steps' list")
    return data


def run(doc_path, css_path, scenario_path=None, config: Config | None = None) -> Report:
    markup = Path(doc_path).read_text(encoding="utf-8")
    css = Path(css_path).read_text(encoding="utf-8") if css_path else ""
    scenario = load_scenario(scenario_path) if scenario_path else {}
    return run_scenario(markup, css, scenario, config)


# -- benchmarks --------------------------------------------------------------

def bench_document(n: int) -> Document:
    items = "".join('<div style="width: 100px; height: 10px"></div>' for _ in range(n))
    return parse_markup(f"<div>{items}</div>")


def bench(n: int, workload: str, strategy: str) -> dict:
    """Run one counter benchmark; returns a CSV row as a dict.

    ``install`` installs a resize detector on each of ``n`` elements.
    ``doubleWidth`` runs the reference workload, whose callback writes the
    measured height back to the element; ``scroll-naive`` runs it (and the
    scroll install) with every step executed immediately.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if workload not in WORKLOADS:
        raise ValueError(f"unknown workload {workload!r}")
    if strategy not in BENCH_STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    doc = bench_document(n)
    page = Page(doc)
    page.load()
    targets = list(doc.get(doc.root).children)
    bp = BatchProcessor(page.loop)
    before = page.layout.counters.snapshot()
    memory = 0.0
    if workload == "install":
        det = ResizeDetection(page.layout, page.loop, bp,
                              "object" if strategy == "object" else "scroll")
        for el in targets:
            if strategy == "object":
                det.install_object(el)
            elif strategy == "scroll":
                det.install_scroll(el)
            else:
                det.install_scroll_naive(el)
        page.settle()
        memory = det.ledger["object"].memory_units if strategy == "object" else 0.0
    else:
        for el in targets:
            if strategy == "scroll-naive":
                def write(h, el=el):
                    doc.set_attribute(el, "data-height", format_number(h))
                double_width_naive(page.layout, el, write)
            else:
                def write(h, el=el):
                    bp.add(0, lambda: doc.set_attribute(el, "data-height", format_number(h)))
                double_width(bp, page.layout, el, write)
        page.settle()
    delta = page.layout.counters - before
    return {
        "n": n,
        "strategy": strategy,
        "forced_layouts": delta.forced_layouts,
        "scheduled_layouts": delta.scheduled_layouts,
        "memory_units": _num(memory),
    }


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_HEADER, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


# -- validation --------------------------------------------------------------

@dataclass(frozen=True)
class Diagnostic:
    code: str
    severity: str  # "error" | "warning"
    element: str | None
    message: str

    def __str__(self):
        where = f" {self.element}" if self.element else ""
        return f"{self.severity.upper()} {self.code}{where}: {self.message}"


def validate_source(markup: str, css: str, config: Config | None = None) -> list[Diagnostic]:
    doc = parse_markup(markup)
    sheet = parse_stylesheet(css)
    out: list[Diagnostic] = []

    for node in doc.iter():
        key = element_key(doc, node.id)
        if get_elq_attribute(node, "elq-breakpoints") is not None:
            for dim in ("width", "height"):
                text = get_elq_attribute(node, f"elq-breakpoints-{dim}s") or ""
                try:
                    parse_breakpoints(text, dim)
                except BadBreakpointToken as exc:
                    out.append(Diagnostic("E_BAD_BREAKPOINT", "error", key, str(exc)))
        if get_elq_attribute(node, "elq-mirror") is not None:
            if not any(get_elq_attribute(a, "elq-breakpoints") is not None for a in doc.ancestors(node.id)):
                out.append(Diagnostic("W_MIRROR_NO_ANCESTOR", "warning", key,
                                      "mirror element has no elq-breakpoints ancestor"))
        is_col = False
        for token in node.classes:
            try:
                if parse_column_class(token) is not None:
                    is_col = True
            except BadColumnClass as exc:
                out.append(Diagnostic("E_BAD_COLUMN_CLASS", "error", key, str(exc)))
        if is_col and (node.parent is None or "row" not in doc.get(node.parent).classes):
            out.append(Diagnostic("W_GRID_COL_OUTSIDE_ROW", "warning", key,
                                  "grid column is not a direct child of a .row"))

    # install detectors for real and look for user selectors hitting them
    engine = Engine(doc, sheet, config or Config())
    try:
        engine.activate_all()
        engine.settle()
    except ElqError:
        # the static findings above already explain why activation failed
        if not any(d.severity == "error" for d in out):
            raise
    seen = set()
    for node in doc.iter():
        if not node.injected:
            continue
        for rule in sheet.rules:
            sel = str(rule.selector)
            if sel not in seen and matches(rule.selector, doc, node.id):
                seen.add(sel)
                out.append(Diagnostic(
                    "W_SELECTOR_MATCHES_INJECTED", "warning", None,
                    f"selector {sel!r} matches injected resize-detector nodes",
                ))
    return out


def validate(doc_path, css_path=None, config: Config | None = None) -> list[Diagnostic]:
    markup = Path(doc_path).read_text(encoding="utf-8")
    css = Path(css_path).read_text(encoding="utf-8") if css_path else ""
    return validate_source(markup, css, config)


def exit_code(diagnostics: list[Diagnostic]) -> int:
    return 1 if any(d.severity == "error" for d in diagnostics) else 0
