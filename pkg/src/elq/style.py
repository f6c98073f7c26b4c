"""CSS subset: values, selectors, stylesheet parsing, matching and cascade."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Union

from .dom import Document, Element
from .errors import CssSyntaxError, MediaQueryPresent, UnsupportedProperty

UNITS = ("px", "em", "rem")

_NUMBER = r"(?:\d+(?:\.\d*)?|\.\d+)"
_LENGTH_RE = re.compile(rf"^({_NUMBER})(px|em|rem)?$")
_PERCENT_RE = re.compile(rf"^({_NUMBER})%$")


# -- values ----------------------------------------------------------------

@dataclass(frozen=True)
class Length:
    magnitude: float
    unit: str = "px"

    def __post_init__(self):
        if self.unit not in UNITS:
            raise ValueError(f"unknown unit {self.unit!r}")
        if not (self.magnitude >= 0 and self.magnitude != float("inf")):
            raise ValueError(f"bad length magnitude {self.magnitude!r}")

    def to_px(self, font_size: float, root_font_size: float) -> float:
        if self.unit == "px":
            return self.magnitude
        if self.unit == "em":
            return self.magnitude * font_size
        return self.magnitude * root_font_size

    def __str__(self):
        return f"{format_number(self.magnitude)}{self.unit}"


@dataclass(frozen=True)
class Percent:
    value: float

    @property
    def fraction(self) -> float:
        return self.value / 100.0

    def __str__(self):
        return f"{format_number(self.value)}%"


@dataclass(frozen=True)
class Keyword:
    name: str

    def __str__(self):
        return self.name


Value = Union[Length, Percent, Keyword]


def format_number(x: float) -> str:
    """Shortest fixed-point rendering without trailing zeros."""
    if x == int(x):
        return str(int(x))
    return f"{x:.6f}".rstrip("0").rstrip(".")


def parse_length(token: str, default_unit: str | None = "px") -> Length | None:
    m = _LENGTH_RE.match(token.strip())
    if not m:
        return None
    unit = m.group(2) or default_unit
    if unit is None:
        return None
    return Length(float(m.group(1)), unit)


_DISPLAY = {"block", "none"}
_POSITION = {"static", "relative", "absolute", "fixed"}
PROPERTIES = (
    "width", "height", "font-size", "display",
    "background-color", "color", "position",
)


def parse_value(prop: str, raw: str) -> Value:
    """Validate and convert a declaration value for ``prop``.

    Raises ``ValueError`` for values the property does not accept and
    :class:`UnsupportedProperty` for unknown properties.
    """
    prop = prop.strip().lower()
    raw = raw.strip()
    if prop not in PROPERTIES:
        raise UnsupportedProperty(prop)
    token = raw.lower()
    if prop in ("width", "height", "font-size"):
        if prop != "font-size" and token == "auto":
            return Keyword("auto")
        m = _PERCENT_RE.match(token)
        if m:
            return Percent(float(m.group(1)))
        # unitless zero is the only bare number CSS accepts
        length = parse_length(token, default_unit=None)
        if length is None and re.fullmatch(r"0+(\.0*)?", token):
            length = Length(0.0, "px")
        if length is None:
            raise ValueError(f"bad {prop} value {raw!r}")
        return length
    if prop == "display":
        if token not in _DISPLAY:
            raise ValueError(f"bad display value {raw!r}")
        return Keyword(token)
    if prop == "position":
        if token not in _POSITION:
            raise ValueError(f"bad position value {raw!r}")
        return Keyword(token)
    if not raw or any(ch in raw for ch in "{};"):
        raise ValueError(f"bad {prop} value {raw!r}")
    return Keyword(raw)


# -- selectors -------------------------------------------------------------

@dataclass(frozen=True)
class Compound:
    tag: str | None = None
    classes: frozenset[str] = frozenset()
    # authored order, kept for serialization
    class_order: tuple[str, ...] = ()

    def matches(self, el: Element) -> bool:
        if self.tag is not None and el.tag != self.tag:
            return False
        return all(c in el.classes for c in self.class_order)

    def __str__(self):
        return (self.tag or "") + "".join("." + _escape_ident(c) for c in self.class_order)


@dataclass(frozen=True)
class Selector:
    """Compounds left to right; ``combinators[i]`` joins compound i and i+1."""

    compounds: tuple[Compound, ...]
    combinators: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.compounds:
            raise ValueError("selector needs at least one compound")
        if len(self.combinators) != len(self.compounds) - 1:
            raise ValueError("combinator count mismatch")
        for c in self.compounds:
            if c.tag is None and not c.classes:
                raise ValueError("empty compound selector")

    @property
    def specificity(self) -> tuple[int, int]:
        return (
            sum(len(c.class_order) for c in self.compounds),
            sum(1 for c in self.compounds if c.tag is not None),
        )

    def __str__(self):
        out = [str(self.compounds[0])]
        for comb, comp in zip(self.combinators, self.compounds[1:]):
            out.append(" > " if comb == "child" else " ")
            out.append(str(comp))
        return "".join(out)


@dataclass(frozen=True)
class Declaration:
    property: str
    value: Value

    def __str__(self):
        return f"{self.property}: {self.value}"


@dataclass(frozen=True)
class Rule:
    selector: Selector
    declarations: tuple[Declaration, ...]
    order: int = 0

    def __str__(self):
        body = " ".join(f"{d};" for d in self.declarations)
        return f"{self.selector} {{ {body} }}"


@dataclass(frozen=True)
class Stylesheet:
    rules: tuple[Rule, ...] = ()

    def __post_init__(self):
        orders = [r.order for r in self.rules]
        if any(b <= a for a, b in zip(orders, orders[1:])):
            raise ValueError("rule source order must be strictly increasing")

    def __len__(self):
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def __add__(self, other: "Stylesheet") -> "Stylesheet":
        rules = [*self.rules, *other.rules]
        return Stylesheet(tuple(
            Rule(r.selector, r.declarations, i) for i, r in enumerate(rules)
        ))

    def serialize(self) -> str:
        return "".join(f"{r}\n" for r in self.rules)


def _escape_ident(name: str) -> str:
    return re.sub(r"([^A-Za-z0-9_-])", r"\\\1", name)


# -- parsing ---------------------------------------------------------------

class _CssParser:
    _IDENT = re.compile(r"(?:[A-Za-z0-9_-]|\\.)+")

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def where(self, pos=None):
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def fail(self, message, pos=None):
        raise CssSyntaxError(message, *self.where(pos))

    def skip(self):
        text = self.text
        while self.pos < len(text):
            if text[self.pos].isspace():
                self.pos += 1
            elif text.startswith("/*", self.pos):
                end = text.find("*/", self.pos + 2)
                if end < 0:
                    self.fail("unterminated comment")
                self.pos = end + 2
            else:
                break

    def ident(self) -> str:
        m = self._IDENT.match(self.text, self.pos)
        if not m:
            self.fail("expected identifier")
        self.pos = m.end()
        return re.sub(r"\\(.)", r"\1", m.group())

    def stylesheet(self) -> list[tuple[Selector, list[Declaration]]]:
        out = []
        while True:
            self.skip()
            if self.pos >= len(self.text):
                return out
            if self.text[self.pos] == "@":
                if self.text.startswith("@media", self.pos):
                    raise MediaQueryPresent(
                        "media queries are not supported; use element breakpoint classes"
                    )
                self.fail("at-rules are not supported")
            selectors = self.selector_list()
            declarations = self.block()
            for sel in selectors:
                out.append((sel, declarations))

    def selector_list(self) -> list[Selector]:
        selectors = [self.selector()]
        while self.text.startswith(",", self.pos):
            self.pos += 1
            selectors.append(self.selector())
        if not self.text.startswith("{", self.pos):
            self.fail("expected '{'")
        return selectors

    def selector(self) -> Selector:
        compounds: list[Compound] = []
        combinators: list[str] = []
        self.skip()
        while True:
            compounds.append(self.compound())
            had_space = self.pos < len(self.text) and self.text[self.pos].isspace()
            self.skip()
            if self.pos >= len(self.text):
                self.fail("unexpected end of selector")
            ch = self.text[self.pos]
            if ch in "{,":
                return Selector(tuple(compounds), tuple(combinators))
            if ch == ">":
                self.pos += 1
                self.skip()
                combinators.append("child")
            elif had_space:
                combinators.append("descendant")
            else:
                self.fail(f"unexpected {ch!r} in selector")

    def compound(self) -> Compound:
        start = self.pos
        tag = None
        classes: list[str] = []
        if self.pos < len(self.text) and (self.text[self.pos].isalpha() or self.text[self.pos] == "*"):
            if self.text[self.pos] == "*":
                self.fail("universal selector is not supported")
            tag = self.ident().lower()
        while self.text.startswith(".", self.pos):
            self.pos += 1
            name = self.ident()
            if name not in classes:
                classes.append(name)
        if self.pos == start:
            ch = self.text[self.pos] if self.pos < len(self.text) else "end of input"
            self.fail(f"unsupported selector syntax near {ch!r}")
        if self.pos < len(self.text) and self.text[self.pos] in "#[:":
            self.fail(f"unsupported selector syntax {self.text[self.pos]!r}")
        return Compound(tag, frozenset(classes), tuple(classes))

    def block(self) -> list[Declaration]:
        self.pos += 1  # '{'
        declarations: list[Declaration] = []
        while True:
            self.skip()
            if self.pos >= len(self.text):
                self.fail("unterminated block")
            if self.text[self.pos] == "}":
                self.pos += 1
                return declarations
            if self.text[self.pos] == ";":
                self.pos += 1
                continue
            start = self.pos
            prop = self.ident().lower()
            self.skip()
            if not self.text.startswith(":", self.pos):
                self.fail("expected ':'")
            self.pos += 1
            vstart = self.pos
            while self.pos < len(self.text) and self.text[self.pos] not in ";}":
                if self.text[self.pos] == "{":
                    self.fail("unexpected '{'")
                self.pos += 1
            raw = self.text[vstart:self.pos]
            raw = re.sub(r"/\*.*?\*/", "", raw, flags=re.S).strip()
            if prop not in PROPERTIES:
                raise UnsupportedProperty(prop)
            try:
                value = parse_value(prop, raw)
            except ValueError as exc:
                self.fail(str(exc), start)
            declarations.append(Declaration(prop, value))


def parse_stylesheet(text: str) -> Stylesheet:
    parsed = _CssParser(text).stylesheet()
    return Stylesheet(tuple(
        Rule(sel, tuple(decls), i) for i, (sel, decls) in enumerate(parsed)
    ))


def parse_selector(text: str) -> Selector:
    p = _CssParser(text.strip() + "{")
    sel = p.selector()
    if p.pos != len(p.text) - 1:
        p.fail("trailing input after selector")
    return sel


# -- matching and cascade --------------------------------------------------

def matches(sel: Selector, doc: Document, el: int) -> bool:
    node = doc.get(el)
    last = len(sel.compounds) - 1
    if not sel.compounds[last].matches(node):
        return False
    return _match_left(sel, doc, last, node)


def _match_left(sel: Selector, doc: Document, i: int, node: Element) -> bool:
    # compounds[i] already matched ``node``; match compounds[:i] leftwards
    if i == 0:
        return True
    comp = sel.compounds[i - 1]
    if sel.combinators[i - 1] == "child":
        if node.parent is None:
            return False
        parent = doc.nodes[node.parent]
        return comp.matches(parent) and _match_left(sel, doc, i - 1, parent)
    parent_id = node.parent
    while parent_id is not None:
        anc = doc.nodes[parent_id]
        if comp.matches(anc) and _match_left(sel, doc, i - 1, anc):
            return True
        parent_id = anc.parent
    return False


def cascade(doc: Document, sheet: Stylesheet, el: int) -> dict[str, Declaration]:
    """Winning declaration per property for ``el``.

    Rules are ranked by (specificity, source order); inline style wins.
    Inline values that fail to parse are ignored, like a browser would.
    """
    node = doc.get(el)
    best: dict[str, tuple[tuple, Declaration]] = {}
    for rule in sheet.rules:
        if not matches(rule.selector, doc, el):
            continue
        rank = (rule.selector.specificity, rule.order)
        for decl in rule.declarations:
            held = best.get(decl.property)
            # later declarations in one rule beat earlier ones
            if held is None or rank >= held[0]:
                best[decl.property] = (rank, decl)
    out = {prop: decl for prop, (_, decl) in best.items()}
    for prop, raw in node.inline_style.items():
        try:
            out[prop] = Declaration(prop, parse_value(prop, raw))
        except (ValueError, UnsupportedProperty):
            continue
    return out


def matching_rules(doc: Document, sheet: Stylesheet, el: int) -> list[Rule]:
    return [r for r in sheet.rules if matches(r.selector, doc, el)]
