"""Document model and a small markup parser for the annotated HTML subset.

The parser understands nested tags, quoted or bare attribute values, boolean
attributes, self-closing tags, void tags, comments and a doctype. Text is kept
as an opaque payload on the enclosing element; layout never looks at it.

``class`` and ``style`` are lifted out of the attribute map into
:attr:`Element.classes` and :attr:`Element.inline_style`.
"""

from __future__ import annotations

import copy
import re
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Iterator, Sequence

from .errors import (
    EmptySubtree,
    MalformedMarkup,
    UnknownElement,
    VoidParent,
    VoidWithChildren,
)

VOID_TAGS = frozenset(
    {"area", "base", "br", "col", "embed", "hr", "img", "input",
     "link", "meta", "source", "track", "wbr"}
)


def is_void(tag: str) -> bool:
    return tag.lower() in VOID_TAGS


@dataclass(eq=False)
class Element:
    id: int
    tag: str
    attributes: dict[str, str] = field(default_factory=dict)
    classes: list[str] = field(default_factory=list)
    inline_style: dict[str, str] = field(default_factory=dict)
    children: list[int] = field(default_factory=list)
    parent: int | None = None
    text: str = ""
    injected: bool = False
    # behavior properties, installed on activation
    elq: Any = None

    @property
    def void(self) -> bool:
        return is_void(self.tag)

    def has_class(self, name: str) -> bool:
        return name in self.classes

    def has_attribute(self, name: str) -> bool:
        return name in self.attributes

    def __repr__(self):
        cls = "." + ".".join(self.classes) if self.classes else ""
        return f"<Element #{self.id} {self.tag}{cls}>"


@dataclass
class Node:
    """Detached element tree, used for parsing and for building injections."""

    tag: str
    attributes: dict[str, str] = field(default_factory=dict)
    classes: list[str] = field(default_factory=list)
    inline_style: dict[str, str] = field(default_factory=dict)
    children: list["Node"] = field(default_factory=list)
    text: str = ""


@dataclass(frozen=True)
class Mutation:
    """One entry of the pending mutation log.

    ``kind`` is one of ``classes``, ``style``, ``attribute``, ``insert``,
    ``remove``, ``viewport`` or ``stylesheet``.
    """

    kind: str
    target: int | None
    detail: Any = None


class Document:
    def __init__(self, root_font_size: float = 16.0):
        self.nodes: dict[int, Element] = {}
        self.root: int | None = None
        self.root_font_size = root_font_size
        self._next_id = 0
        self._observers: list[Callable[[Mutation], None]] = []

    # -- construction -------------------------------------------------

    @classmethod
    def from_node(cls, node: Node, root_font_size: float = 16.0) -> "Document":
        doc = cls(root_font_size)
        doc.root = doc._build(node, None, injected=False)
        return doc

    def _build(self, node: Node, parent: int | None, injected: bool) -> int:
        el = Element(
            id=self._next_id,
            tag=node.tag.lower(),
            attributes=dict(node.attributes),
            classes=_unique(node.classes),
            inline_style=dict(node.inline_style),
            parent=parent,
            text=node.text,
            injected=injected,
        )
        self._next_id += 1
        self.nodes[el.id] = el
        for child in node.children:
            el.children.append(self._build(child, el.id, injected))
        return el.id

    # -- observers ----------------------------------------------------

    def observe(self, callback: Callable[[Mutation], None]) -> None:
        self._observers.append(callback)

    def unobserve(self, callback: Callable[[Mutation], None]) -> None:
        self._observers.remove(callback)

    def _notify(self, mutation: Mutation) -> None:
        for callback in list(self._observers):
            callback(mutation)

    # -- queries ------------------------------------------------------

    def __contains__(self, el: int) -> bool:
        return el in self.nodes

    def __len__(self):
        return len(self.nodes)

    def get(self, el: int) -> Element:
        try:
            return self.nodes[el]
        except KeyError:
            raise UnknownElement(el) from None

    def iter(self, start: int | None = None, include_injected: bool = True) -> Iterator[Element]:
        """Pre-order walk starting at ``start`` (default: the root)."""
        start = self.root if start is None else start
        if start is None:
            return
        stack = [start]
        while stack:
            el = self.nodes[stack.pop()]
            if el.injected and not include_injected:
                continue
            yield el
            stack.extend(reversed(el.children))

    def ancestors(self, el: int) -> Iterator[Element]:
        parent = self.get(el).parent
        while parent is not None:
            node = self.nodes[parent]
            yield node
            parent = node.parent

    def find_all(self, predicate: Callable[[Element], bool]) -> list[Element]:
        return [el for el in self.iter() if predicate(el)]

    def by_attribute_id(self, value: str) -> Element | None:
        for el in self.iter():
            if el.attributes.get("id") == value:
                return el
        return None

    # -- mutations ----------------------------------------------------

    def set_classes(self, el: int, add: Iterable[str] = (), remove: Iterable[str] = ()) -> None:
        node = self.get(el)
        add = list(add)
        remove = set(remove)
        before = list(node.classes)
        kept = [c for c in node.classes if c not in remove]
        for c in add:
            if c not in kept:
                kept.append(c)
        if kept == before:
            return
        node.classes = kept
        self._notify(Mutation("classes", el, (tuple(before), tuple(kept))))

    def set_style(self, el: int, prop: str, value: str | None) -> None:
        node = self.get(el)
        if value is None:
            if prop not in node.inline_style:
                return
            del node.inline_style[prop]
        else:
            if node.inline_style.get(prop) == value:
                return
            node.inline_style[prop] = value
        self._notify(Mutation("style", el, (prop, value)))

    def set_attribute(self, el: int, name: str, value: str | None) -> None:
        node = self.get(el)
        if value is None:
            if name not in node.attributes:
                return
            del node.attributes[name]
        else:
            if node.attributes.get(name) == value:
                return
            node.attributes[name] = value
        self._notify(Mutation("attribute", el, (name, value)))

    def insert_subtree(self, parent: int, subtree: Node | Sequence[Node], injected: bool = False) -> int:
        """Append ``subtree`` (one tree or a list of trees) under ``parent``.

        Returns the id of the first inserted root.
        """
        host = self.get(parent)
        trees = [subtree] if isinstance(subtree, Node) else list(subtree)
        if not trees:
            raise EmptySubtree("nothing to insert")
        if host.void:
            raise VoidParent(f"cannot insert into void element <{host.tag}>")
        ids = []
        for tree in trees:
            new = self._build(tree, parent, injected)
            host.children.append(new)
            ids.append(new)
        self._notify(Mutation("insert", parent, tuple(ids)))
        return ids[0]

    def remove_subtree(self, el: int) -> None:
        node = self.get(el)
        if node.parent is None:
            raise ValueError("cannot remove the document root")
        self._notify(Mutation("remove", el, node.parent))
        self.nodes[node.parent].children.remove(el)
        for sub in list(self.iter(el)):
            del self.nodes[sub.id]

    # -- misc ---------------------------------------------------------

    def clone(self) -> "Document":
        other = Document(self.root_font_size)
        other.nodes = copy.deepcopy(self.nodes)
        other.root = self.root
        other._next_id = self._next_id
        return other

    def to_node(self, el: int | None = None, include_injected: bool = True) -> Node:
        node = self.get(self.root if el is None else el)
        return Node(
            tag=node.tag,
            attributes=dict(node.attributes),
            classes=list(node.classes),
            inline_style=dict(node.inline_style),
            children=[
                self.to_node(c, include_injected)
                for c in node.children
                if include_injected or not self.nodes[c].injected
            ],
            text=node.text,
        )

    def structure(self, include_injected: bool = True):
        """Hashable structural fingerprint (ids excluded)."""
        return _fingerprint(self.to_node(include_injected=include_injected))

    def check_invariants(self) -> None:
        """Assert link consistency, acyclicity and single reachability."""
        assert self.root is not None and self.root in self.nodes
        assert self.nodes[self.root].parent is None
        seen = set()
        stack = [self.root]
        while stack:
            el = self.nodes[stack.pop()]
            assert el.id not in seen, f"{el} reachable twice"
            seen.add(el.id)
            assert len(set(el.classes)) == len(el.classes)
            assert all(c and not any(ch.isspace() for ch in c) for c in el.classes)
            if el.void:
                assert not el.children
            for c in el.children:
                assert self.nodes[c].parent == el.id
                stack.append(c)
        assert seen == set(self.nodes), "unreachable nodes in store"


def _unique(tokens: Iterable[str]) -> list[str]:
    out: list[str] = []
    for t in tokens:
        if t and t not in out:
            out.append(t)
    return out


def _fingerprint(node: Node):
    return (
        node.tag,
        tuple(node.attributes.items()),
        tuple(node.classes),
        tuple(node.inline_style.items()),
        node.text,
        tuple(_fingerprint(c) for c in node.children),
    )


def get_elq_attribute(el: Element, name: str) -> str | None:
    """Look up an ELQ attribute, also accepting its ``data-`` spelling.

    The bare name wins when both are present.
    """
    if name in el.attributes:
        return el.attributes[name]
    return el.attributes.get("data-" + name)


def has_elq_attribute(el: Element, name: str) -> bool:
    return get_elq_attribute(el, name) is not None


# -- parsing ---------------------------------------------------------------

_NAME = re.compile(r"[A-Za-z][A-Za-z0-9_:.-]*")
_ATTR_NAME = re.compile(r"[^\s\"'<>/=]+")
_BARE_VALUE = re.compile(r"[^\s\"'<>=`]+")


def parse_style_attribute(text: str) -> dict[str, str]:
    style: dict[str, str] = {}
    for part in text.split(";"):
        if not part.strip():
            continue
        if ":" not in part:
            continue
        prop, value = part.split(":", 1)
        style[prop.strip().lower()] = value.strip()
    return style


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def where(self, pos=None):
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def fail(self, message, pos=None):
        raise MalformedMarkup(message, *self.where(pos))

    def parse(self, multiple_roots: bool = False) -> list[Node]:
        roots: list[Node] = []
        # (node, tag_start_pos); void tags stay open only until the next token
        stack: list[tuple[Node, int]] = []
        text = self.text
        n = len(text)
        while self.pos < n:
            lt = text.find("<", self.pos)
            if lt < 0:
                lt = n
            if lt > self.pos:
                chunk = text[self.pos:lt]
                if chunk.strip():
                    if stack and stack[-1][0].tag in VOID_TAGS:
                        self._close_void(stack)
                    if not stack:
                        self.fail("text outside of the root element")
                    stack[-1][0].text += chunk.strip()
                self.pos = lt
                continue
            if text.startswith("<!--", lt):
                end = text.find("-->", lt + 4)
                if end < 0:
                    self.fail("unterminated comment", lt)
                self.pos = end + 3
                continue
            if text.startswith("<!", lt):
                end = text.find(">", lt)
                if end < 0:
                    self.fail("unterminated declaration", lt)
                self.pos = end + 1
                continue
            if text.startswith("</", lt):
                self.pos = lt + 2
                m = _NAME.match(text, self.pos)
                if not m:
                    self.fail("expected tag name")
                tag = m.group().lower()
                self.pos = m.end()
                self._skip_ws()
                if not text.startswith(">", self.pos):
                    self.fail("expected '>'")
                self.pos += 1
                if stack and stack[-1][0].tag in VOID_TAGS and stack[-1][0].tag != tag:
                    self._close_void(stack)
                if not stack:
                    self.fail(f"unexpected </{tag}>", lt)
                top = stack[-1][0]
                if top.tag != tag:
                    # </img> after content that followed an open <img>
                    if tag in VOID_TAGS and any(c.tag == tag for c in top.children):
                        raise VoidWithChildren(tag, *self.where(lt))
                    self.fail(f"mismatched </{tag}>, expected </{top.tag}>", lt)
                stack.pop()
                continue
            # start tag
            start = lt
            self.pos = lt + 1
            m = _NAME.match(text, self.pos)
            if not m:
                self.fail("expected tag name")
            node = Node(tag=m.group().lower())
            self.pos = m.end()
            self_closing = self._attributes(node)
            if stack and stack[-1][0].tag in VOID_TAGS:
                self._close_void(stack)
            if stack:
                stack[-1][0].children.append(node)
            elif roots and not multiple_roots:
                self.fail("more than one root element", start)
            else:
                roots.append(node)
            if not self_closing:
                stack.append((node, start))
        if stack and stack[-1][0].tag in VOID_TAGS:
            self._close_void(stack)
        if stack:
            self.fail(f"unclosed <{stack[-1][0].tag}>", stack[-1][1])
        return roots

    def _close_void(self, stack):
        node, pos = stack.pop()
        parent = stack[-1][0] if stack else None
        return node, parent, pos

    def _skip_ws(self):
        text = self.text
        while self.pos < len(text) and text[self.pos].isspace():
            self.pos += 1

    def _attributes(self, node: Node) -> bool:
        text = self.text
        while True:
            self._skip_ws()
            if self.pos >= len(text):
                self.fail("unterminated start tag")
            if text.startswith("/>", self.pos):
                self.pos += 2
                return True
            if text[self.pos] == ">":
                self.pos += 1
                return False
            m = _ATTR_NAME.match(text, self.pos)
            if not m:
                self.fail("expected attribute name")
            name = m.group().lower()
            self.pos = m.end()
            self._skip_ws()
            value = ""
            if text.startswith("=", self.pos):
                self.pos += 1
                self._skip_ws()
                if self.pos >= len(text):
                    self.fail("unterminated attribute")
                quote = text[self.pos]
                if quote in "\"'":
                    end = text.find(quote, self.pos + 1)
                    if end < 0:
                        self.fail("unterminated attribute value", self.pos)
                    value = text[self.pos + 1:end]
                    self.pos = end + 1
                else:
                    vm = _BARE_VALUE.match(text, self.pos)
                    if not vm:
                        self.fail("expected attribute value")
                    value = vm.group()
                    self.pos = vm.end()
            if name == "class":
                node.classes = _unique(value.split())
            elif name == "style":
                node.inline_style = parse_style_attribute(value)
            elif name not in node.attributes:
                node.attributes[name] = value


def parse_fragment(text: str) -> list[Node]:
    """Parse markup that may contain several sibling roots."""
    return _Parser(text).parse(multiple_roots=True)


def parse_markup(text: str, root_font_size: float = 16.0) -> Document:
    """Parse a single-rooted markup document."""
    roots = _Parser(text).parse()
    if not roots:
        raise MalformedMarkup("document has no root element", 1, 1)
    return Document.from_node(roots[0], root_font_size)


# -- serialization ---------------------------------------------------------

def _quote(value: str) -> str:
    if '"' not in value:
        return f'"{value}"'
    return f"'{value}'"


def serialize_node(node: Node, indent: int = 0) -> str:
    pad = "  " * indent
    parts = [node.tag]
    for name, value in node.attributes.items():
        parts.append(name if value == "" else f"{name}={_quote(value)}")
    if node.classes:
        parts.append(f'class="{" ".join(node.classes)}"')
    if node.inline_style:
        style = "; ".join(f"{k}: {v}" for k, v in node.inline_style.items())
        parts.append(f"style={_quote(style)}")
    open_tag = f"{pad}<{' '.join(parts)}>"
    if is_void(node.tag):
        return open_tag
    if not node.children:
        return f"{open_tag}{node.text}</{node.tag}>"
    lines = [open_tag]
    if node.text:
        lines.append("  " * (indent + 1) + node.text)
    for child in node.children:
        lines.append(serialize_node(child, indent + 1))
    lines.append(f"{pad}</{node.tag}>")
    return "\n".join(lines)


def serialize(doc: Document, include_injected: bool = False) -> str:
    return serialize_node(doc.to_node(include_injected=include_injected)) + "\n"
