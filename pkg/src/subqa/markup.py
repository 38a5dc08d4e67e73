"""Inline markup handling for cue payloads.

Tags are lifted out of a payload into :class:`MarkupSpan` records whose
offsets index the remaining plain text. Each span keeps its opening and
closing tag verbatim, so :func:`reinsert_markup` rebuilds the original
payload byte for byte.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, replace
from enum import Enum


class MarkupKind(str, Enum):
    ITALIC = "italic"
    BOLD = "bold"
    UNDERLINE = "underline"
    OTHER = "other-tag"


_KIND_BY_NAME = {"i": MarkupKind.ITALIC, "b": MarkupKind.BOLD, "u": MarkupKind.UNDERLINE}

# Group 1: "/" for closers; 2: tag name; 3: VTT classes; 4: annotation or
# attributes. Group 5 matches VTT inline timestamps, which have no closer.
TAG_RE = re.compile(
    r"<(/?)([A-Za-z][A-Za-z0-9]*)((?:\.[^\s<>.]+)*)(\s[^<>]*)?>"
    r"|<((?:\d+:)?\d{1,2}:\d{2}[.,]\d{3})>"
)


class UnbalancedTag(ValueError):
    def __init__(self, tag: str, offset: int, reason: str = "unbalanced"):
        super().__init__(f"{reason} tag <{tag}> at plain-text offset {offset}")
        self.tag = tag
        self.offset = offset


class SpanOutOfBounds(ValueError):
    pass


@dataclass(frozen=True)
class MarkupSpan:
    """A tag pair lifted out of a payload.

    ``start``/``end`` index the plain text. ``depth`` is the nesting level,
    which disambiguates empty spans sitting on a sibling boundary. Unmatched
    tags (lenient mode only) keep an empty ``close_tag``.
    """

    kind: MarkupKind
    tag_name: str
    start: int
    end: int
    open_tag: str
    close_tag: str
    depth: int = 0

    @property
    def is_pair(self) -> bool:
        """True for a real opener (matched or not), False for timestamps and stray closers."""
        return not self.open_tag.startswith("</") and not self.open_tag[1:2].isdigit()


def kind_for(tag_name: str) -> MarkupKind:
    return _KIND_BY_NAME.get(tag_name.lower(), MarkupKind.OTHER)


def strip_markup(text: str, strict: bool = True) -> tuple[str, list[MarkupSpan]]:
    """Split ``text`` into plain text and the tag spans around it.

    With ``strict`` an unmatched or crossing tag raises :class:`UnbalancedTag`.
    Otherwise stray closers become zero-width spans and unclosed openers run
    to the end of the text (or of their enclosing tag), which keeps
    :func:`reinsert_markup` exact on malformed input.
    """
    if "<" not in text:
        return text, []
    parts: list[str] = []
    spans: list[MarkupSpan] = []
    stack: list[int] = []
    pos = 0
    last = 0
    for m in TAG_RE.finditer(text):
        chunk = text[last : m.start()]
        parts.append(chunk)
        pos += len(chunk)
        last = m.end()
        if m.group(5) is not None:
            spans.append(
                MarkupSpan(MarkupKind.OTHER, m.group(5), pos, pos, m.group(0), "", len(stack))
            )
            continue
        closing, name = m.group(1), m.group(2)
        if not closing:
            spans.append(MarkupSpan(kind_for(name), name, pos, pos, m.group(0), "", len(stack)))
            stack.append(len(spans) - 1)
            continue
        lname = name.lower()
        match = None
        for k in range(len(stack) - 1, -1, -1):
            if spans[stack[k]].tag_name.lower() == lname:
                match = k
                break
        if strict and (match is None or match != len(stack) - 1):
            raise UnbalancedTag(name, pos, "unmatched closing" if match is None else "crossing")
        if match is None:
            spans.append(MarkupSpan(kind_for(name), name, pos, pos, m.group(0), "", len(stack)))
            continue
        while len(stack) - 1 > match:
            idx = stack.pop()
            spans[idx] = replace(spans[idx], end=pos)
        idx = stack.pop()
        spans[idx] = replace(spans[idx], end=pos, close_tag=m.group(0))
    parts.append(text[last:])
    plain = "".join(parts)
    if stack:
        if strict:
            first = spans[stack[0]]
            raise UnbalancedTag(first.tag_name, first.start, "unclosed")
        for idx in stack:
            spans[idx] = replace(spans[idx], end=len(plain))
    return plain, spans


def plain_text(text: str) -> str:
    """Tag-free text of a payload; never raises."""
    if "<" not in text:
        return text
    return strip_markup(text, strict=False)[0]


class _Node:
    __slots__ = ("span", "start", "end", "children")

    def __init__(self, span: MarkupSpan | None, start: int, end: int):
        self.span = span
        self.start = start
        self.end = end
        self.children: list[_Node] = []


def reinsert_markup(plain: str, spans: list[MarkupSpan]) -> str:
    """Inverse of :func:`strip_markup`.

    ``spans`` must be in the order :func:`strip_markup` produces them
    (opening-tag order).
    """
    if not spans:
        return plain
    root = _Node(None, 0, len(plain))
    stack: list[_Node] = [root]
    for span in spans:
        if not 0 <= span.start <= span.end <= len(plain):
            raise SpanOutOfBounds(
                f"span <{span.tag_name}> [{span.start}, {span.end}) outside text of length {len(plain)}"
            )
        while len(stack) > 1 and stack[-1].span.depth >= span.depth:
            stack.pop()
        parent = stack[-1]
        floor = parent.children[-1].end if parent.children else parent.start
        if span.start < floor or span.end > parent.end:
            raise SpanOutOfBounds(f"span <{span.tag_name}> [{span.start}, {span.end}) is not properly nested")
        node = _Node(span, span.start, span.end)
        parent.children.append(node)
        stack.append(node)

    out: list[str] = []

    def emit(node: _Node) -> None:
        if node.span is not None:
            out.append(node.span.open_tag)
        cursor = node.start
        for child in node.children:
            out.append(plain[cursor : child.start])
            emit(child)
            cursor = child.end
        out.append(plain[cursor : node.end])
        if node.span is not None:
            out.append(node.span.close_tag)

    emit(root)
    return "".join(out)


def apply_replacements(text: str, replacements: list[tuple[int, int, str]]) -> str:
    """Apply plain-text replacements to a payload, keeping its tags in place.

    ``replacements`` are ``(start, end, new_text)`` ranges in plain-text
    coordinates; they must not overlap.
    """
    if not replacements:
        return text
    plain, spans = strip_markup(text, strict=False)
    ordered = sorted(replacements, key=lambda r: (r[0], r[1]))
    pieces: list[str] = []
    shifts: list[tuple[int, int, int, int]] = []  # old start, old end, new start, new length
    cursor = 0
    out_len = 0
    for start, end, new in ordered:
        if start < cursor or end < start or end > len(plain):
            raise SpanOutOfBounds(f"replacement [{start}, {end}) overlaps or exceeds the text")
        pieces.append(plain[cursor:start])
        out_len += start - cursor
        shifts.append((start, end, out_len, len(new)))
        pieces.append(new)
        out_len += len(new)
        cursor = end
    pieces.append(plain[cursor:])
    new_plain = "".join(pieces)

    def remap(offset: int) -> int:
        delta = 0
        for start, end, new_start, new_len in shifts:
            if offset < start:
                break
            if offset < end or (offset == start == end):
                return new_start + min(offset - start, new_len) if offset > start else new_start
            delta = new_start + new_len - end
        return offset + delta

    moved = [replace(s, start=remap(s.start), end=remap(s.end)) for s in spans]
    return reinsert_markup(new_plain, moved)
