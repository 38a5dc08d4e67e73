"""Deterministic corrections for mechanically fixable findings."""
from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from subqa.alignment import AlignedCuePair, align_by_time
from subqa.findings import ErrorCategory
from subqa.guidelines import repetition_findings, spacing_findings
from subqa.markup import MarkupSpan, apply_replacements, strip_markup
from subqa.resources import GuidelineProfile, UnitRule
from subqa.subtitles import Cue, SubtitleDocument
from subqa.text import LocaleNumber, format_number

MAX_PASSES = 10


@dataclass(frozen=True)
class Edit:
    """A payload rewrite. ``before`` and ``after`` are whole cue payloads
    (lines joined with line breaks), markup included."""

    cue_index: int
    category: ErrorCategory
    before: str
    after: str

    def __post_init__(self):
        if self.before == self.after:
            raise ValueError("an edit must change the payload")

    def to_dict(self) -> dict:
        return {
            "cue_index": self.cue_index,
            "category": self.category.value,
            "before": self.before,
            "after": self.after,
        }

    @classmethod
    def from_dict(cls, data: dict) -> Edit:
        return cls(int(data["cue_index"]), ErrorCategory.parse(data["category"]), data["before"], data["after"])


class EditConflict(ValueError):
    """An edit's ``before`` text does not match the cue it targets."""


class PartialSpanUnfixable(ValueError):
    """Source markup covers only part of the payload; the matching target
    span cannot be located without word alignment."""


def _fix_to_fixpoint(payload: str, finder) -> str:
    for _ in range(MAX_PASSES):
        plain = strip_markup(payload, strict=False)[0]
        replacements = []
        last_end = -1
        for finding in finder(plain):
            start, end = finding.span
            if start >= last_end and finding.suggestion is not None:
                replacements.append((start, end, finding.suggestion))
                last_end = end
        if not replacements:
            break
        payload = apply_replacements(payload, replacements)
    return payload


def _rewrite(doc: SubtitleDocument, category: ErrorCategory, finder) -> tuple[SubtitleDocument, list[Edit]]:
    cues = list(doc.cues)
    edits = []
    for index, cue in enumerate(cues):
        before = cue.raw
        after = _fix_to_fixpoint(before, finder)
        if after != before:
            cues[index] = cue.with_payload(after)
            edits.append(Edit(index, category, before, after))
    return (doc.with_cues(cues) if edits else doc), edits


def fix_spacing(doc: SubtitleDocument, profile: GuidelineProfile) -> tuple[SubtitleDocument, list[Edit]]:
    """Apply every IncorrectSpacing suggestion until the spacing check is clean."""
    return _rewrite(doc, ErrorCategory.INCORRECT_SPACING, lambda plain: spacing_findings(plain, profile))


def collapse_repetitions(doc: SubtitleDocument) -> tuple[SubtitleDocument, list[Edit]]:
    """Replace each repeated run by its first occurrence plus the run's final punctuation."""
    return _rewrite(doc, ErrorCategory.REPEATED_PHRASE, repetition_findings)


def _full_wraps(text: str) -> list[MarkupSpan] | None:
    """Tag pairs wrapping all of ``text`` (outermost first), or None when
    some tag covers only part of it."""
    plain, spans = strip_markup(text, strict=False)
    wraps = []
    for span in spans:
        if not span.is_pair:
            continue
        if span.start != 0 or span.end != len(plain) or not span.close_tag:
            return None
        wraps.append(span)
    return sorted(wraps, key=lambda s: s.depth)


def _wrap(text: str, wraps: list[MarkupSpan]) -> str:
    present = {s.tag_name.lower() for s in strip_markup(text, strict=False)[1] if s.is_pair}
    missing = [s for s in wraps if s.tag_name.lower() not in present]
    if not missing:
        return text
    if any(s.tag_name.lower() in present for s in wraps) and _full_wraps(text) is None:
        raise PartialSpanUnfixable("target already carries part of the source markup")
    opening = "".join(s.open_tag for s in missing)
    closing = "".join(s.close_tag for s in reversed(missing))
    return opening + text + closing


def reinsert_source_markup(
    pair: AlignedCuePair, source_doc: SubtitleDocument, target_doc: SubtitleDocument
) -> tuple[Cue, list[Edit]]:
    """Copy tags that wrap the whole source payload (or each source line) onto the target.

    Raises PartialSpanUnfixable when a source tag covers only part of a
    payload or line.
    """
    if not pair.one_to_one:
        raise ValueError(f"markup reinsertion needs a 1-to-1 pair, got {pair.shape}")
    source = source_doc.cues[pair.source_indices[0]]
    index = pair.target_indices[0]
    target = target_doc.cues[index]
    wraps = _full_wraps(source.raw)
    if wraps is not None:
        after = _wrap(target.raw, wraps)
    else:
        per_line = [_full_wraps(line) for line in source.lines]
        if any(w is None for w in per_line):
            raise PartialSpanUnfixable(f"source cue {pair.source_indices[0] + 1} has markup on part of its text")
        keys = {tuple(s.open_tag for s in w) for w in per_line}
        if len(keys) != 1:
            raise PartialSpanUnfixable("source lines carry different markup")
        after = "\n".join(_wrap(line, per_line[0]) for line in target.lines)
    if after == target.raw:
        return target, []
    return target.with_payload(after), [Edit(index, ErrorCategory.NON_TEXT_CHARACTER, target.raw, after)]


def fix_markup(
    source_doc: SubtitleDocument,
    target_doc: SubtitleDocument,
    alignment: list[AlignedCuePair] | None = None,
) -> tuple[SubtitleDocument, list[Edit], list[int]]:
    """Reinsert source markup over every 1-to-1 pair.

    Returns the fixed document, the edits, and the target cue indices left
    unfixed because of partial-span markup.
    """
    if alignment is None:
        alignment = align_by_time(source_doc, target_doc)
    cues = list(target_doc.cues)
    edits: list[Edit] = []
    unfixable = []
    for pair in alignment:
        if not pair.one_to_one:
            continue
        try:
            cue, cue_edits = reinsert_source_markup(pair, source_doc, target_doc)
        except PartialSpanUnfixable:
            unfixable.append(pair.target_indices[0])
            continue
        if cue_edits:
            cues[pair.target_indices[0]] = cue
            edits.extend(cue_edits)
    fixed = target_doc.with_cues(cues) if edits else target_doc
    return fixed, sorted(edits, key=lambda e: e.cue_index), sorted(unfixable)


def replay_edits(doc: SubtitleDocument, edits: list[Edit]) -> SubtitleDocument:
    """Apply recorded edits in order; each ``before`` must match the current payload."""
    cues = list(doc.cues)
    for edit in edits:
        if not 0 <= edit.cue_index < len(cues):
            raise EditConflict(f"edit targets cue {edit.cue_index + 1}, document has {len(cues)}")
        current = cues[edit.cue_index].raw
        if current != edit.before:
            raise EditConflict(f"cue {edit.cue_index + 1} payload differs from the edit's 'before' text")
        cues[edit.cue_index] = cues[edit.cue_index].with_payload(edit.after)
    return doc.with_cues(cues) if edits else doc


@dataclass(frozen=True)
class UnitSuggestion:
    exact: float
    display: float
    text: str


def _round_display(value: float) -> Decimal:
    exact = Decimal(repr(value))
    if exact >= 1000:
        step = Decimal(100)
    elif exact >= 10:
        step = Decimal(10)
    elif exact == 0:
        return Decimal(0)
    else:
        # two significant figures; a step of 10 would round these to zero
        step = Decimal(1).scaleb(exact.adjusted() - 1)
    return (exact / step).quantize(Decimal(1), rounding=ROUND_HALF_UP) * step


def suggest_unit_conversion(number: float, rule: UnitRule, locale: LocaleNumber = LocaleNumber()) -> UnitSuggestion:
    """Converted value plus a rounded display form.

    Display rounding is to the nearest 100 from 1000 up and to the nearest 10
    from 10 up; smaller values keep two significant figures. The suggestion
    is advisory and never applied automatically.
    """
    if rule.factor <= 0:
        raise ValueError("unit factor must be positive")
    exact = number * rule.factor
    display = _round_display(exact)
    decimals = max(0, -display.normalize().as_tuple().exponent)
    text = f"{format_number(float(display), locale, decimals)} {rule.target_unit}"
    return UnitSuggestion(exact, float(display), text)

