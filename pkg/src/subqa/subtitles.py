"""WebVTT and SRT parsing and serialization."""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum

from subqa.markup import plain_text

MAX_MILLIS = 99 * 3_600_000 + 59 * 60_000 + 59 * 1000 + 999
BOM = "\ufeff"

_TIMESTAMP_RE = re.compile(r"^(?:(\d{1,2}):)?(\d{2}):(\d{2})([.,])(\d{3})$")
_TIMING_RE = re.compile(r"^\s*(\S+)\s*-->\s*(\S+)(?:[ \t]+(.*?))?\s*$")
_VTT_MAGIC_RE = re.compile(r"^WEBVTT(?:[ \t].*)?$")


class Format(str, Enum):
    VTT = "vtt"
    SRT = "srt"

    @property
    def decimal_separator(self) -> str:
        return "." if self is Format.VTT else ","


class SubtitleParseError(ValueError):
    """Base class for fatal parse problems. ``line``/``column`` are 1-based."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
        self.message = message
        self.line = line
        self.column = column


class EmptyFile(SubtitleParseError):
    pass


class MalformedTimestamp(SubtitleParseError):
    pass


class MissingArrowSeparator(SubtitleParseError):
    pass


class MalformedBlock(SubtitleParseError):
    pass


class StructuralError(SubtitleParseError):
    """A structural warning promoted to an error by strict parsing."""


@dataclass(frozen=True, order=True)
class Timestamp:
    millis: int

    def __post_init__(self):
        if not 0 <= self.millis <= MAX_MILLIS:
            raise ValueError(f"timestamp out of range: {self.millis} ms")

    @classmethod
    def parse(cls, text: str) -> Timestamp:
        m = _TIMESTAMP_RE.match(text)
        if not m:
            raise ValueError(f"invalid timestamp {text!r}")
        hours, minutes, seconds, _, millis = m.groups()
        if int(minutes) > 59 or int(seconds) > 59:
            raise ValueError(f"invalid timestamp {text!r}")
        return cls(int(hours or 0) * 3_600_000 + int(minutes) * 60_000 + int(seconds) * 1000 + int(millis))

    def format(self, separator: str = ".") -> str:
        hours, rest = divmod(self.millis, 3_600_000)
        minutes, rest = divmod(rest, 60_000)
        seconds, millis = divmod(rest, 1000)
        return f"{hours:02d}:{minutes:02d}:{seconds:02d}{separator}{millis:03d}"

    @property
    def seconds(self) -> float:
        return self.millis / 1000

    def __str__(self) -> str:
        return self.format()


@dataclass(frozen=True)
class Cue:
    """One timed block.

    ``index`` is the numeric cue identifier as written in the file (SRT
    counter or a numeric VTT id); a non-numeric VTT id goes to
    ``identifier``. ``settings`` holds VTT cue settings uninterpreted.
    """

    start: Timestamp
    end: Timestamp
    lines: tuple[str, ...]
    index: int | None = None
    identifier: str | None = None
    settings: str = ""

    def __post_init__(self):
        if not self.lines:
            raise ValueError("cue payload must have at least one line")
        for line in self.lines:
            if "\n" in line or "\r" in line:
                raise ValueError("cue lines must not contain line breaks")

    @property
    def raw(self) -> str:
        return "\n".join(self.lines)

    @property
    def plain(self) -> str:
        return plain_text(self.raw)

    @property
    def duration_ms(self) -> int:
        return self.end.millis - self.start.millis

    def with_payload(self, payload: str) -> Cue:
        return replace(self, lines=tuple(payload.split("\n")))


@dataclass(frozen=True)
class ParseWarning:
    kind: str
    line: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.message}"


@dataclass(frozen=True)
class SubtitleDocument:
    format: Format
    cues: tuple[Cue, ...]
    header: str | None = None
    bom: bool = False
    warnings: tuple[ParseWarning, ...] = field(default=(), compare=False)

    def __len__(self) -> int:
        return len(self.cues)

    def with_cues(self, cues) -> SubtitleDocument:
        return replace(self, cues=tuple(cues), warnings=())


def detect_format(text: str) -> Format:
    first = text.lstrip(BOM).split("\n", 1)[0].rstrip("\r")
    return Format.VTT if _VTT_MAGIC_RE.match(first) else Format.SRT


def _blocks(lines: list[str], first_line: int):
    """Yield (line number of first line, list of lines) for each blank-separated block."""
    block: list[str] = []
    start = 0
    for offset, line in enumerate(lines):
        if line.strip():
            if not block:
                start = first_line + offset
            block.append(line)
        elif block:
            yield start, block
            block = []
    if block:
        yield start, block


def _parse_timestamp(token: str, line_no: int, line: str, fmt: Format, warnings: list) -> Timestamp:
    column = line.find(token) + 1
    try:
        ts = Timestamp.parse(token)
    except ValueError:
        raise MalformedTimestamp(f"malformed timestamp {token!r}", line_no, column) from None
    if token[-4] != fmt.decimal_separator:
        warnings.append(
            ParseWarning(
                "separator",
                line_no,
                f"timestamp {token!r} uses {token[-4]!r} as decimal separator in a {fmt.name} file",
            )
        )
    return ts


def _parse_cue(block: list[str], line_no: int, fmt: Format, warnings: list) -> Cue:
    arrow_at = next((i for i, line in enumerate(block[:2]) if "-->" in line), None)
    if arrow_at is None:
        bad = line_no + (1 if len(block) > 1 else 0)
        raise MissingArrowSeparator("expected a timing line containing '-->'", bad, None)
    index = identifier = None
    if arrow_at == 1:
        ident = block[0].strip()
        if ident.isdigit() and int(ident) > 0:
            index = int(ident)
        elif fmt is Format.SRT:
            raise MalformedBlock(f"invalid SRT cue number {ident!r}", line_no, 1)
        else:
            identifier = block[0]
    timing_no = line_no + arrow_at
    timing = block[arrow_at]
    m = _TIMING_RE.match(timing)
    if not m:
        raise MalformedTimestamp(f"malformed timing line {timing!r}", timing_no, 1)
    start = _parse_timestamp(m.group(1), timing_no, timing, fmt, warnings)
    end = _parse_timestamp(m.group(2), timing_no, timing, fmt, warnings)
    payload = block[arrow_at + 1 :]
    if not payload:
        raise MalformedBlock("cue has an empty payload", timing_no, None)
    return Cue(start, end, tuple(payload), index, identifier, m.group(3) or "")


def parse_document(text: str, format_hint: Format | None = None, strict: bool = False) -> SubtitleDocument:
    """Parse a WebVTT or SRT file.

    Without ``format_hint`` the file is VTT iff its first line is the
    ``WEBVTT`` magic line. Structural problems (overlaps, non-monotonic
    starts, cues ending before they start, non-increasing SRT numbers) are
    collected in ``warnings``; ``strict`` raises :class:`StructuralError`
    for them instead.
    """
    bom = text.startswith(BOM)
    if bom:
        text = text[1:]
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    if not text.strip():
        raise EmptyFile("file contains no subtitle blocks")
    fmt = format_hint or detect_format(text)
    lines = text.split("\n")
    warnings: list[ParseWarning] = []
    header = None
    cues: list[Cue] = []
    cue_lines: list[int] = []
    blocks = list(_blocks(lines, 1))

    if fmt is Format.VTT:
        if not _VTT_MAGIC_RE.match(blocks[0][1][0]):
            raise MalformedBlock("WebVTT file must start with 'WEBVTT'", blocks[0][0], 1)
        preamble = []
        position = 0
        for position, (line_no, block) in enumerate(blocks):
            is_cue = any("-->" in line for line in block[:2])
            if position > 0 and is_cue:
                break
            preamble.append("\n".join(block))
        else:
            position = len(blocks)
        header = "\n\n".join(preamble)
        body = blocks[position:]
    else:
        body = blocks

    for line_no, block in body:
        head = block[0].strip()
        if fmt is Format.VTT and head.split(" ", 1)[0] in ("NOTE", "STYLE", "REGION") and "-->" not in head:
            warnings.append(ParseWarning("dropped", line_no, f"{head.split(' ', 1)[0]} block between cues dropped"))
            continue
        cues.append(_parse_cue(block, line_no, fmt, warnings))
        cue_lines.append(line_no)

    structural = _structural_warnings(cues, cue_lines, fmt)
    if strict and structural:
        first = structural[0]
        raise StructuralError(first.message, first.line, None)
    return SubtitleDocument(fmt, tuple(cues), header, bom, tuple(warnings + structural))


def _structural_warnings(cues: list[Cue], cue_lines: list[int], fmt: Format) -> list[ParseWarning]:
    found = []
    prev = None
    for pos, (cue, line_no) in enumerate(zip(cues, cue_lines)):
        if cue.end <= cue.start:
            found.append(ParseWarning("duration", line_no, f"cue {pos + 1} ends at or before its start"))
        if prev is not None:
            if cue.start < prev.start:
                found.append(ParseWarning("order", line_no, f"cue {pos + 1} starts before the previous cue"))
            elif cue.start < prev.end:
                found.append(ParseWarning("overlap", line_no, f"cue {pos + 1} overlaps the previous cue"))
            if fmt is Format.SRT and cue.index is not None and prev.index is not None and cue.index <= prev.index:
                found.append(ParseWarning("numbering", line_no, f"SRT cue number {cue.index} is not increasing"))
        prev = cue
    return found


def serialize_document(doc: SubtitleDocument) -> str:
    """Write a document back out; blocks are separated by one blank line."""
    sep = doc.format.decimal_separator
    blocks = []
    if doc.format is Format.VTT:
        blocks.append(doc.header or "WEBVTT")
    for pos, cue in enumerate(doc.cues):
        out = []
        if doc.format is Format.SRT:
            out.append(str(cue.index if cue.index is not None else pos + 1))
        elif cue.identifier is not None:
            out.append(cue.identifier)
        elif cue.index is not None:
            out.append(str(cue.index))
        timing = f"{cue.start.format(sep)} --> {cue.end.format(sep)}"
        if cue.settings:
            timing += " " + cue.settings
        out.append(timing)
        out.extend(cue.lines)
        blocks.append("\n".join(out))
    return (BOM if doc.bom else "") + "\n\n".join(blocks) + "\n"


def read_document(path, format_hint: Format | None = None, strict: bool = False) -> SubtitleDocument:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_document(text, format_hint, strict)


def write_document(doc: SubtitleDocument, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_document(doc))
