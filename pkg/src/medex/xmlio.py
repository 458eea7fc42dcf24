"""Canonical XML construction and writing.

Every XML artifact this package emits (intermediate documents, SMIL, XHTML)
goes through this writer so golden files and round-trip tests can compare
bytes directly: UTF-8, LF line endings, two-space indentation, and attributes
ordered id-first then alphabetically.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

XML_DECL = '<?xml version="1.0" encoding="UTF-8"?>'

# id-like attributes always come first, in this order
_ID_FIRST = ("xml:id", "id")


@dataclass
class XmlNode:
    """One element to be written canonically.

    ``text`` and ``children`` are mutually exclusive; ``raw`` children are
    preformatted single-line snippets spliced in at the current indent.
    """

    tag: str
    attrs: dict[str, str] = field(default_factory=dict)
    children: list["XmlNode | RawNode"] = field(default_factory=list)
    text: str | None = None

    def child(self, tag: str, attrs: dict[str, str] | None = None,
              text: str | None = None) -> "XmlNode":
        node = XmlNode(tag, attrs or {}, text=text)
        self.children.append(node)
        return node


@dataclass
class RawNode:
    """A preformatted one-line XML snippet, emitted verbatim at depth."""

    line: str


def escape_text(value: str) -> str:
    return value.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def escape_attr(value: str) -> str:
    value = escape_text(value).replace('"', "&quot;")
    return value.replace("\t", "&#x9;").replace("\n", "&#xA;").replace("\r", "&#xD;")


def _sorted_attrs(attrs: dict[str, str]) -> list[tuple[str, str]]:
    head = [(k, attrs[k]) for k in _ID_FIRST if k in attrs]
    rest = sorted((k, v) for k, v in attrs.items() if k not in _ID_FIRST)
    return head + rest


def _format_attrs(attrs: dict[str, str]) -> str:
    return "".join(f' {k}="{escape_attr(v)}"' for k, v in _sorted_attrs(attrs))


def serialize(root: XmlNode, doctype: str | None = None,
              expand_empty: frozenset[str] = frozenset()) -> bytes:
    """Write the canonical byte form of an element tree.

    ``expand_empty`` lists tags that must keep an explicit end tag even when
    empty (script/div and friends, which browsers refuse self-closed).
    """
    lines = [XML_DECL]
    if doctype:
        lines.append(doctype)
    _write(root, 0, lines, expand_empty)
    return ("\n".join(lines) + "\n").encode("utf-8")


def _write(node: XmlNode | RawNode, depth: int, lines: list[str],
           expand_empty: frozenset[str]) -> None:
    indent = "  " * depth
    if isinstance(node, RawNode):
        lines.append(indent + node.line)
        return
    open_part = f"{indent}<{node.tag}{_format_attrs(node.attrs)}"
    if node.children:
        lines.append(open_part + ">")
        for child in node.children:
            _write(child, depth + 1, lines, expand_empty)
        lines.append(f"{indent}</{node.tag}>")
    elif node.text is not None:
        lines.append(f"{open_part}>{escape_text(node.text)}</{node.tag}>")
    elif node.tag in expand_empty:
        lines.append(f"{open_part}></{node.tag}>")
    else:
        lines.append(open_part + "/>")


def compact(node: XmlNode) -> str:
    """One-line form of a subtree, used for foreign head content."""
    open_part = f"<{node.tag}{_format_attrs(node.attrs)}"
    if node.children:
        inner = "".join(compact(c) for c in node.children if isinstance(c, XmlNode))
        return f"{open_part}>{inner}</{node.tag}>"
    if node.text is not None:
        return f"{open_part}>{escape_text(node.text)}</{node.tag}>"
    return open_part + "/>"


def split_tag(tag: str) -> tuple[str, str]:
    """Split an ElementTree ``{ns}local`` tag into (namespace, local name)."""
    if tag.startswith("{"):
        ns, _, local = tag[1:].partition("}")
        return ns, local
    return "", tag


def from_etree(el: ET.Element) -> XmlNode:
    """Convert a parsed foreign element into a writable node.

    The element's own namespace is redeclared locally; namespaced attributes
    have no portable prefix form here and are dropped.
    """
    ns, local = split_tag(el.tag)
    attrs = {k: v for k, v in el.attrib.items() if not k.startswith("{")}
    if ns:
        attrs["xmlns"] = ns
    node = XmlNode(local, attrs)
    children = [from_etree(child) for child in el]
    if children:
        node.children = list(children)
    elif el.text and el.text.strip():
        node.text = el.text.strip()
    return node
