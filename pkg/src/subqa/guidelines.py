"""Single-document guideline checks."""
from __future__ import annotations

import re
from functools import lru_cache

from subqa.alignment import AlignedCuePair
from subqa.findings import ErrorCategory, Finding, Severity
from subqa.markup import MarkupKind, strip_markup
from subqa.resources import GuidelineProfile, LexiconSet, Spacing
from subqa.subtitles import Cue, SubtitleDocument
from subqa.text import tokenize

COMPOUND_MIN_LENGTH = 18
MAX_GROUP = 4

# A speaker-change hyphen opens a line or follows terminal punctuation.
SPEAKER_HYPHEN_RE = re.compile(r"(?:^|(?<=[.!?…]\s))-(?!-)", re.MULTILINE)
_INNER_SPACES_RE = re.compile(r"(?<=[^ \n]) {2,}(?=[^ \n])")
_REPEAT_SEP_RE = re.compile(r"^[ ,]+$")
_TERMINAL_RE = re.compile(r"[.!?…;:]*")


def _line_offsets(plain: str):
    offset = 0
    for line in plain.split("\n"):
        yield offset, line
        offset += len(line) + 1


def _reading_length(plain: str) -> int:
    return len(plain) - plain.count("\n")


def check_line_length(cue: Cue, profile: GuidelineProfile, index: int = 0) -> list[Finding]:
    """Flag each line whose tag-free length exceeds the profile limit."""
    limit = profile.max_chars_per_line
    findings = []
    for offset, line in _line_offsets(cue.plain):
        if len(line) > limit:
            findings.append(
                Finding(
                    ErrorCategory.LINE_TOO_LONG,
                    index,
                    Severity.ERROR,
                    f"line has {len(line)} characters, limit is {limit}",
                    span=(offset + limit, offset + len(line)),
                )
            )
    return findings


def check_line_count(cue: Cue, profile: GuidelineProfile, index: int = 0) -> list[Finding]:
    count = len(cue.lines)
    if count <= profile.max_lines_per_block:
        return []
    return [
        Finding(
            ErrorCategory.TOO_MANY_LINES,
            index,
            Severity.ERROR,
            f"cue has {count} lines, limit is {profile.max_lines_per_block}",
        )
    ]


def check_reading_speed(cue: Cue, profile: GuidelineProfile, index: int = 0) -> list[Finding]:
    """Characters per second over the cue duration; line breaks are not counted."""
    duration = cue.duration_ms
    if duration <= 0:
        return [
            Finding(
                ErrorCategory.READING_SPEED_EXCEEDED,
                index,
                Severity.WARNING,
                "cue has zero or negative duration",
            )
        ]
    chars = _reading_length(cue.plain)
    if chars == 0:
        return []
    # integer-exact form of chars / seconds > limit
    if chars * 1000 <= profile.max_reading_speed * duration:
        return []
    cps = chars * 1000 / duration
    return [
        Finding(
            ErrorCategory.READING_SPEED_EXCEEDED,
            index,
            Severity.WARNING,
            f"reading speed {cps:.1f} CPS exceeds {profile.max_reading_speed:g} CPS",
        )
    ]


@lru_cache(maxsize=None)
def _ellipsis_re(forms: frozenset[str]) -> re.Pattern:
    alternation = "|".join(re.escape(f) for f in sorted(forms, key=len, reverse=True))
    return re.compile(rf"(?:{alternation})")


def spacing_findings(plain: str, profile: GuidelineProfile, index: int = 0) -> list[Finding]:
    found: list[Finding] = []
    taken: list[tuple[int, int]] = []

    def add(start: int, end: int, suggestion: str, message: str) -> None:
        taken.append((start, end))
        found.append(
            Finding(ErrorCategory.INCORRECT_SPACING, index, Severity.ERROR, message, (start, end), suggestion)
        )

    ellipsis = _ellipsis_re(profile.ellipsis_forms)
    for offset, line in _line_offsets(plain):
        line_start_after_hyphen = 0
        for m in SPEAKER_HYPHEN_RE.finditer(line):
            pos = m.start()
            rest = line[pos + 1 :]
            spaces = len(rest) - len(rest.lstrip(" \t"))
            if pos == 0:
                line_start_after_hyphen = 1 + spaces
            if profile.hyphen_spacing is Spacing.ATTACHED:
                if spaces and rest[spaces:]:
                    add(offset + pos, offset + pos + 1 + spaces, "-", "space after speaker hyphen")
            elif rest and not rest[0].isspace() and not rest[0].isdigit():
                add(offset + pos, offset + pos + 1, "- ", "missing space after speaker hyphen")
        m = ellipsis.match(line, line_start_after_hyphen)
        if m:
            rest = line[m.end() :]
            spaces = len(rest) - len(rest.lstrip(" \t"))
            follower = rest[spaces : spaces + 1]
            if profile.ellipsis_spacing is Spacing.ATTACHED:
                if spaces and follower.islower():
                    add(offset + m.start(), offset + m.end() + spaces, m.group(0), "space after leading ellipsis")
            elif not spaces and follower.islower():
                add(offset + m.start(), offset + m.end(), m.group(0) + " ", "missing space after leading ellipsis")
    for m in _INNER_SPACES_RE.finditer(plain):
        if not any(s < m.end() and m.start() < e for s, e in taken):
            add(m.start(), m.end(), " ", "multiple consecutive spaces")
    return sorted(found, key=lambda f: f.span)


def check_spacing(cue: Cue, profile: GuidelineProfile, index: int = 0) -> list[Finding]:
    """Speaker-hyphen and leading-ellipsis spacing per the profile, plus
    repeated spaces. Each finding's suggestion replaces its span."""
    return spacing_findings(cue.plain, profile, index)


def repetition_findings(plain: str, index: int = 0) -> list[Finding]:
    tokens = tokenize(plain)
    folded = [t.folded for t in tokens]
    findings = []

    def sep_ok(a: int, b: int) -> bool:
        return bool(_REPEAT_SEP_RE.match(plain[tokens[a].end : tokens[b].start]))

    i = 0
    while i < len(tokens):
        best = None
        for size in range(1, MAX_GROUP + 1):
            if i + 2 * size > len(tokens):
                break
            if not all(sep_ok(i + k, i + k + 1) for k in range(size - 1)):
                continue
            group = folded[i : i + size]
            reps = 1
            while True:
                nxt = i + reps * size
                if folded[nxt : nxt + size] != group or not sep_ok(nxt - 1, nxt):
                    break
                if not all(sep_ok(nxt + k, nxt + k + 1) for k in range(size - 1)):
                    break
                reps += 1
            if reps >= 2:
                best = (size, reps)
                break
        if best is None:
            i += 1
            continue
        size, reps = best
        last = i + size * reps - 1
        start, end = tokens[i].start, tokens[last].end
        first_occurrence = plain[start : tokens[i + size - 1].end]
        trail = _TERMINAL_RE.match(plain, end).group(0)
        findings.append(
            Finding(
                ErrorCategory.REPEATED_PHRASE,
                index,
                Severity.WARNING,
                f"{first_occurrence!r} repeated {reps} times",
                span=(start, end + len(trail)),
                suggestion=first_occurrence + trail,
            )
        )
        i = last + 1
    return findings


def detect_repetitions(cue: Cue, index: int = 0) -> list[Finding]:
    """Runs of two or more identical consecutive tokens or 2-4 token groups,
    separated only by spaces and commas. The suggestion keeps the first
    occurrence plus the run's terminal punctuation."""
    return repetition_findings(cue.plain, index)


def _tag_keys(spans) -> set[str]:
    keys = set()
    for span in spans:
        if span.is_pair:
            keys.add(span.kind.value if span.kind is not MarkupKind.OTHER else f"<{span.tag_name.lower()}>")
    return keys


def markup_integrity_findings(source: Cue, target: Cue, index: int = 0) -> list[Finding]:
    src_plain, src_spans = strip_markup(source.raw, strict=False)
    tgt_plain, tgt_spans = strip_markup(target.raw, strict=False)
    findings = []
    for key in sorted(_tag_keys(src_spans) - _tag_keys(tgt_spans)):
        findings.append(
            Finding(ErrorCategory.NON_TEXT_CHARACTER, index, Severity.ERROR, f"missing {key}")
        )
    if len(source.lines) != len(target.lines):
        findings.append(
            Finding(
                ErrorCategory.NON_TEXT_CHARACTER,
                index,
                Severity.ERROR,
                f"line-break count differs: {len(source.lines)}→{len(target.lines)} lines",
            )
        )
    src_hyphens = len(SPEAKER_HYPHEN_RE.findall(src_plain))
    tgt_hyphens = len(SPEAKER_HYPHEN_RE.findall(tgt_plain))
    if src_hyphens != tgt_hyphens:
        findings.append(
            Finding(
                ErrorCategory.NON_TEXT_CHARACTER,
                index,
                Severity.ERROR,
                f"speaker hyphen count differs: {src_hyphens}→{tgt_hyphens}",
            )
        )
    return findings


def check_markup_integrity(
    pair: AlignedCuePair, source_doc: SubtitleDocument, target_doc: SubtitleDocument
) -> list[Finding]:
    """Compare tags, line breaks and speaker hyphens across a 1-to-1 pair."""
    if not pair.one_to_one:
        raise ValueError(f"markup integrity needs a 1-to-1 pair, got {pair.shape}")
    s, t = pair.source_indices[0], pair.target_indices[0]
    return markup_integrity_findings(source_doc.cues[s], target_doc.cues[t], t)


def check_compound_length(cue: Cue, lexicons: LexiconSet, index: int = 0) -> list[Finding]:
    """Warn on long tokens (likely compounds) that the wordlist does not know."""
    if lexicons.target_wordlist is None:
        return []
    findings = []
    for token in tokenize(cue.plain):
        if token.is_number or len(token.text) < COMPOUND_MIN_LENGTH or lexicons.knows(token.text):
            continue
        findings.append(
            Finding(
                ErrorCategory.COMPOUND_WORD_OOV,
                index,
                Severity.WARNING,
                f"long out-of-vocabulary word {token.text!r} ({len(token.text)} characters)",
                span=(token.start, token.end),
            )
        )
    return findings
