"""Rooted ordered labeled trees, with ingestion from HTML and a JSON tree format.

Trees are immutable after construction. Node ids are dense pre-order indices,
so ``tree.node(0)`` is always the root. Mutable :class:`DraftNode` trees are
the working representation for builders (the HTML parser, the JSON reader,
the mutation engine); :func:`freeze` turns a draft into a ``LabeledTree``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from html.parser import HTMLParser
from typing import Iterator


class IngestError(ValueError):
    """The input document did not yield a root element."""


class FormatError(ValueError):
    """JSON tree input violates the schema; ``path`` points at the bad element."""

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class DraftNode:
    """Mutable node used while building or rewriting a tree."""

    tag: str
    attrs: list[tuple[str, str]] = field(default_factory=list)
    text: str | None = None
    signature: str | None = None
    children: list["DraftNode"] = field(default_factory=list)

    def copy_deep(self, keep_signatures: bool = True) -> "DraftNode":
        return DraftNode(
            tag=self.tag,
            attrs=list(self.attrs),
            text=self.text,
            signature=self.signature if keep_signatures else None,
            children=[c.copy_deep(keep_signatures) for c in self.children],
        )


@dataclass(frozen=True)
class TreeNode:
    """One element of a :class:`LabeledTree`.

    ``attributes`` preserves source order. ``text`` is the node's own
    (direct) text content, whitespace-collapsed, or ``None``. ``signature``
    is an opaque ground-truth label that matchers never see.
    """

    id: int
    tag: str
    attributes: tuple[tuple[str, str], ...]
    text: str | None
    parent: int | None
    children: tuple[int, ...]
    xpath: str
    signature: str | None = None


class LabeledTree:
    """Immutable rooted ordered labeled tree.

    Node ids are pre-order positions in ``[0, size)``; the root is node 0.
    """

    __slots__ = ("nodes",)

    def __init__(self, nodes: tuple[TreeNode, ...]):
        self.nodes = nodes

    @property
    def root(self) -> int:
        return 0

    @property
    def size(self) -> int:
        return len(self.nodes)

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self) -> Iterator[TreeNode]:
        return iter(self.nodes)

    def node(self, node_id: int) -> TreeNode:
        return self.nodes[node_id]

    def __repr__(self) -> str:  # pragma: no cover - debug helper
        return f"LabeledTree(size={len(self.nodes)}, root_tag={self.nodes[0].tag!r})"


def freeze(root: DraftNode) -> LabeledTree:
    """Assign pre-order ids and xpaths to a draft tree and seal it.

    An xpath segment gets a 1-based ``[k]`` rank suffix only when the node
    has at least one same-tag sibling.
    """
    nodes: list[TreeNode | None] = []

    def visit(draft: DraftNode, parent_id: int | None, xpath: str) -> int:
        node_id = len(nodes)
        nodes.append(None)  # placeholder until children are assigned

        tag_counts: dict[str, int] = {}
        for child in draft.children:
            tag_counts[child.tag] = tag_counts.get(child.tag, 0) + 1
        child_ids = []
        seen: dict[str, int] = {}
        for child in draft.children:
            seen[child.tag] = seen.get(child.tag, 0) + 1
            rank = f"[{seen[child.tag]}]" if tag_counts[child.tag] >= 2 else ""
            child_ids.append(visit(child, node_id, xpath + "/" + child.tag + rank))

        text = draft.text
        if text is not None:
            text = " ".join(text.split()) or None
        nodes[node_id] = TreeNode(
            id=node_id,
            tag=draft.tag,
            attributes=tuple(draft.attrs),
            text=text,
            parent=parent_id,
            children=tuple(child_ids),
            xpath=xpath,
            signature=draft.signature,
        )
        return node_id

    visit(root, None, "/" + root.tag)
    return LabeledTree(tuple(nodes))  # type: ignore[arg-type]


def thaw(tree: LabeledTree) -> DraftNode:
    """Deep mutable copy of a tree, inverse of :func:`freeze` (ids/xpaths dropped)."""

    def build(node_id: int) -> DraftNode:
        node = tree.node(node_id)
        return DraftNode(
            tag=node.tag,
            attrs=list(node.attributes),
            text=node.text,
            signature=node.signature,
            children=[build(c) for c in node.children],
        )

    return build(tree.root)


def ancestor(tree: LabeledTree, node_id: int, i: int) -> int | None:
    """The i-th ancestor of a node; i=0 is the node itself, None past the root."""
    if i < 0:
        raise ValueError(f"ancestor level must be >= 0, got {i}")
    current: int | None = node_id
    tree.node(node_id)  # bounds check
    for _ in range(i):
        if current is None:
            return None
        current = tree.node(current).parent
    return current


# ---------------------------------------------------------------------------
# HTML ingestion

_VOID_TAGS = frozenset(
    "area base br col embed hr img input link meta param source track wbr".split()
)

# When a start tag in the value set arrives while the key tag is open on top
# of the stack, the key tag is implicitly closed (pragmatic HTML5 recovery).
_BLOCK_STARTERS = frozenset(
    "address article aside blockquote div dl fieldset footer form h1 h2 h3 h4 h5 h6 "
    "header hr main nav ol p pre section table ul".split()
)
_IMPLIED_CLOSE: dict[str, frozenset[str]] = {
    "p": _BLOCK_STARTERS,
    "li": frozenset({"li"}),
    "dt": frozenset({"dt", "dd"}),
    "dd": frozenset({"dt", "dd"}),
    "td": frozenset({"td", "th", "tr"}),
    "th": frozenset({"td", "th", "tr"}),
    "tr": frozenset({"tr"}),
    "option": frozenset({"option", "optgroup"}),
    "thead": frozenset({"tbody", "tfoot"}),
    "tbody": frozenset({"tbody", "tfoot"}),
}

_RAWTEXT_TAGS = frozenset({"script", "style"})


class _TreeBuilder(HTMLParser):
    """Lenient element-tree builder: elements only, first top-level element wins.

    Comments, doctype, and processing instructions are dropped; script/style
    text is excluded; stray end tags are ignored; duplicate attributes keep
    the first occurrence (as browsers do).
    """

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.root: DraftNode | None = None
        self.stack: list[DraftNode] = []
        self.texts: dict[int, list[str]] = {}
        self.done = False

    def _open(self, tag: str, attrs: list[tuple[str, str | None]], void: bool) -> None:
        if self.done:
            return
        if not self.stack and self.root is not None:
            return  # extra top-level element after the root closed
        while self.stack:
            top = self.stack[-1]
            closers = _IMPLIED_CLOSE.get(top.tag)
            if closers is not None and tag in closers:
                self.stack.pop()
                if not self.stack:
                    self.done = True
                    return
            else:
                break
        seen: set[str] = set()
        clean_attrs = []
        for name, value in attrs:
            if name in seen:
                continue
            seen.add(name)
            clean_attrs.append((name, value if value is not None else ""))
        node = DraftNode(tag=tag, attrs=clean_attrs)
        if self.stack:
            self.stack[-1].children.append(node)
        else:
            self.root = node
        if not (void or tag in _VOID_TAGS):
            self.stack.append(node)
        elif not self.stack and self.root is node:
            self.done = True  # void root, e.g. "<br>"

    def handle_starttag(self, tag, attrs):
        self._open(tag, attrs, void=False)

    def handle_startendtag(self, tag, attrs):
        self._open(tag, attrs, void=True)

    def handle_endtag(self, tag):
        if self.done or not self.stack:
            return
        for depth in range(len(self.stack) - 1, -1, -1):
            if self.stack[depth].tag == tag:
                del self.stack[depth:]
                if not self.stack:
                    self.done = True
                return
        # stray end tag: no matching open element, ignore

    def handle_data(self, data):
        if self.done or not self.stack:
            return
        top = self.stack[-1]
        if top.tag in _RAWTEXT_TAGS:
            return
        self.texts.setdefault(id(top), []).append(data)

    def finish(self) -> DraftNode:
        if self.root is None:
            raise IngestError("document contains no element")
        _attach_texts(self.root, self.texts)
        return self.root


def _attach_texts(node: DraftNode, texts: dict[int, list[str]]) -> None:
    pieces = texts.get(id(node))
    if pieces:
        node.text = "".join(pieces)
    for child in node.children:
        _attach_texts(child, texts)


def parse_html(document: bytes | str) -> LabeledTree:
    """Parse HTML (possibly malformed) into a tree of element nodes.

    Only elements become nodes; direct text content is stored on its parent
    element. Raises :class:`IngestError` when no root element can be found.
    """
    if isinstance(document, bytes):
        document = document.decode("utf-8", errors="replace")
    builder = _TreeBuilder()
    builder.feed(document)
    builder.close()
    return freeze(builder.finish())


# ---------------------------------------------------------------------------
# JSON tree format
#
# {"tag": str, "attrs": {name: value, ...}?, "text": str?, "signature": str?,
#  "children": [...]?}  recursively, UTF-8.

def _draft_from_json(obj: object, path: str) -> DraftNode:
    if not isinstance(obj, dict):
        raise FormatError(f"expected object, got {type(obj).__name__}", path)
    if "tag" not in obj:
        raise FormatError("missing required field 'tag'", path)
    tag = obj["tag"]
    if not isinstance(tag, str) or not tag:
        raise FormatError("'tag' must be a non-empty string", path)

    attrs_obj = obj.get("attrs", {})
    if not isinstance(attrs_obj, dict):
        raise FormatError("'attrs' must be an object", path + ".attrs")
    attrs = []
    for name, value in attrs_obj.items():
        if not isinstance(value, str):
            raise FormatError("attribute values must be strings", f"{path}.attrs.{name}")
        attrs.append((name, value))

    text = obj.get("text")
    if text is not None and not isinstance(text, str):
        raise FormatError("'text' must be a string", path + ".text")
    signature = obj.get("signature")
    if signature is not None and not isinstance(signature, str):
        raise FormatError("'signature' must be a string", path + ".signature")

    children_obj = obj.get("children", [])
    if not isinstance(children_obj, list):
        raise FormatError("'children' must be an array", path + ".children")
    children = [
        _draft_from_json(child, f"{path}.children[{k}]")
        for k, child in enumerate(children_obj)
    ]
    return DraftNode(tag=tag, attrs=attrs, text=text, signature=signature, children=children)


def parse_tree_json(text: str | bytes) -> LabeledTree:
    """Read a tree from the JSON tree format; round-trips with :func:`serialize_tree_json`."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}", "$") from exc
    return freeze(_draft_from_json(obj, "$"))


def _node_to_json(tree: LabeledTree, node_id: int) -> dict:
    node = tree.node(node_id)
    obj: dict = {"tag": node.tag}
    if node.attributes:
        obj["attrs"] = {name: value for name, value in node.attributes}
    if node.text is not None:
        obj["text"] = node.text
    if node.signature is not None:
        obj["signature"] = node.signature
    obj["children"] = [_node_to_json(tree, c) for c in node.children]
    return obj


def serialize_tree_json(tree: LabeledTree, indent: int | None = None) -> str:
    return json.dumps(_node_to_json(tree, tree.root), ensure_ascii=False, indent=indent)
