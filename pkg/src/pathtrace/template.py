"""Template parser: turns page files into a tag tree with exact source locations.

The grammar is a strict XML-like subset. Only namespaced tags (``<ui:inputText
.../>``) are structural; everything else, including plain HTML, is kept as raw
text runs. Each node remembers the exact bytes of its opening and closing
markup, so re-serializing a document reproduces the input byte for byte.
"""

from __future__ import annotations

import re
from bisect import bisect_right
from dataclasses import dataclass, field

DEFAULT_NAMESPACES = frozenset({"ui"})

_OPEN_RE = re.compile(r"<([A-Za-z_][A-Za-z0-9_]*):([A-Za-z_][A-Za-z0-9_]*)")
_CLOSE_RE = re.compile(r"</([A-Za-z_][A-Za-z0-9_]*):([A-Za-z_][A-Za-z0-9_]*)\s*>")
_ATTR_RE = re.compile(r"(\s+)([A-Za-z_][A-Za-z0-9_]*)\s*=\s*\"([^\"]*)\"")


@dataclass(frozen=True)
class SourceLocation:
    """A 1-based (line, column) position inside a template file.

    Columns count bytes within the line, so that pairing a location with the
    document's line index addresses the exact input byte.
    """

    file: str
    line: int
    column: int

    def __post_init__(self):
        if not self.file or ".." in self.file.split("/"):
            raise ValueError(f"bad source file path: {self.file!r}")
        if self.line < 1 or self.column < 1:
            raise ValueError(f"line/column must be >= 1: {self.line}:{self.column}")

    def __str__(self):
        return f"{self.file}:{self.line}:{self.column}"


@dataclass
class TextRun:
    """A verbatim stretch of non-tag input."""

    text: str


@dataclass
class TagNode:
    namespace: str
    tag: str
    attributes: dict[str, str]
    children: list["TagNode | TextRun"]
    location: SourceLocation
    raw_open: str = ""
    raw_close: str = ""

    @property
    def name(self) -> str:
        return f"{self.namespace}:{self.tag}"


@dataclass
class TemplateDocument:
    root: list[TagNode | TextRun]
    source_file: str
    line_index: dict[int, int] = field(default_factory=dict)

    def tags(self):
        """All TagNodes in document order (pre-order)."""
        stack = [item for item in reversed(self.root)]
        while stack:
            item = stack.pop()
            if isinstance(item, TagNode):
                yield item
                stack.extend(reversed(item.children))


class TemplateError(Exception):
    """Parse failure carrying the offending source location."""

    def __init__(self, message: str, location: SourceLocation):
        super().__init__(f"{location}: {message}")
        self.location = location


class UnclosedTagError(TemplateError):
    pass


class MismatchedTagError(TemplateError):
    pass


class DuplicateAttributeError(TemplateError):
    pass


class BadNamespaceError(TemplateError):
    pass


class MalformedTagError(TemplateError):
    pass


class _Scanner:
    """Tracks byte-accurate line/column positions over the decoded text."""

    def __init__(self, text: str, file_name: str):
        self.text = text
        self.file = file_name
        # Prefix sums of UTF-8 byte lengths; byte_of[i] is the byte offset of
        # character i. Collapses to the identity for ASCII input.
        byte_of = [0] * (len(text) + 1)
        off = 0
        for i, ch in enumerate(text):
            off += len(ch.encode("utf-8"))
            byte_of[i + 1] = off
        self.byte_of = byte_of
        self.line_starts = [0] + [m.end() for m in re.finditer("\n", text)]

    def location(self, char_index: int) -> SourceLocation:
        line = bisect_right(self.line_starts, char_index)
        line_start = self.line_starts[line - 1]
        col = self.byte_of[char_index] - self.byte_of[line_start] + 1
        return SourceLocation(self.file, line, col)

    def line_index(self) -> dict[int, int]:
        return {i + 1: self.byte_of[start] for i, start in enumerate(self.line_starts)}


def parse_template(
    text: str,
    file_name: str,
    namespaces: frozenset[str] = DEFAULT_NAMESPACES,
) -> TemplateDocument:
    """Parse template text into a TemplateDocument.

    Namespaced tags become TagNodes; any other markup is preserved verbatim as
    text runs. Tags must be self-closed or explicitly closed, attribute values
    are double-quoted, entities pass through untouched. Raises a TemplateError
    subclass (with location) on unclosed or mismatched tags, duplicate
    attributes, and namespaces missing from ``namespaces``.
    """
    if not file_name:
        raise ValueError("file_name must be non-empty")
    scanner = _Scanner(text, file_name)
    root: list[TagNode | TextRun] = []
    stack: list[TagNode] = []

    def sink() -> list[TagNode | TextRun]:
        return stack[-1].children if stack else root

    def flush_text(start: int, end: int):
        if end > start:
            sink().append(TextRun(text[start:end]))

    i = 0
    seg_start = 0
    n = len(text)
    while i < n:
        lt = text.find("<", i)
        if lt == -1:
            break
        close = _CLOSE_RE.match(text, lt)
        if close is not None:
            ns, name = close.group(1), close.group(2)
            loc = scanner.location(lt)
            if ns not in namespaces:
                raise BadNamespaceError(f"undeclared namespace {ns!r}", loc)
            if not stack or (stack[-1].namespace, stack[-1].tag) != (ns, name):
                raise MismatchedTagError(f"unexpected closing tag </{ns}:{name}>", loc)
            flush_text(seg_start, lt)
            node = stack.pop()
            node.raw_close = close.group(0)
            sink().append(node)
            i = seg_start = close.end()
            continue
        opened = _OPEN_RE.match(text, lt)
        if opened is None:
            i = lt + 1  # plain '<', stays inside the current text run
            continue
        ns, name = opened.group(1), opened.group(2)
        loc = scanner.location(lt)
        if ns not in namespaces:
            raise BadNamespaceError(f"undeclared namespace {ns!r}", loc)
        flush_text(seg_start, lt)
        attrs: dict[str, str] = {}
        j = opened.end()
        while True:
            attr = _ATTR_RE.match(text, j)
            if attr is None:
                break
            attr_name = attr.group(2)
            if attr_name in attrs:
                raise DuplicateAttributeError(
                    f"duplicate attribute {attr_name!r} on <{ns}:{name}>",
                    scanner.location(attr.start(2)),
                )
            attrs[attr_name] = attr.group(3)
            j = attr.end()
        while j < n and text[j] in " \t\r\n":
            j += 1
        if text.startswith("/>", j):
            end = j + 2
            self_closed = True
        elif j < n and text[j] == ">":
            end = j + 1
            self_closed = False
        elif j >= n:
            raise UnclosedTagError(f"<{ns}:{name}> never closed", loc)
        else:
            raise MalformedTagError(
                f"unexpected {text[j]!r} inside <{ns}:{name}>", scanner.location(j)
            )
        node = TagNode(
            namespace=ns,
            tag=name,
            attributes=attrs,
            children=[],
            location=loc,
            raw_open=text[lt:end],
        )
        if self_closed:
            sink().append(node)
        else:
            stack.append(node)
        i = seg_start = end
    if stack:
        node = stack[-1]
        raise UnclosedTagError(f"<{node.name}> never closed", node.location)
    flush_text(seg_start, n)
    return TemplateDocument(root=root, source_file=file_name, line_index=scanner.line_index())


def serialize(doc: TemplateDocument) -> str:
    """Reproduce the exact input text the document was parsed from."""
    return _serialize_items(doc.root)


def _serialize_items(items: list[TagNode | TextRun]) -> str:
    parts = []
    for item in items:
        if isinstance(item, TextRun):
            parts.append(item.text)
        else:
            parts.append(item.raw_open)
            parts.append(_serialize_items(item.children))
            parts.append(item.raw_close)
    return "".join(parts)
