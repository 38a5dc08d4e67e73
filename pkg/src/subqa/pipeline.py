"""Detector suites for a single target file and for a source/target pair."""
from __future__ import annotations

import logging
from dataclasses import dataclass

from subqa import guidelines, translation
from subqa.alignment import DEFAULT_THRESHOLD, AlignedCuePair, align_by_time, check_block_count
from subqa.findings import ErrorCategory, Finding, sort_findings
from subqa.langid import detect_mixed_language
from subqa.resources import GuidelineProfile, LexiconSet, register_table
from subqa.subtitles import SubtitleDocument

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CompareOptions:
    threshold: float = DEFAULT_THRESHOLD
    expansion: float = 1.0
    profanity_tolerance: int = translation.DEFAULT_PROFANITY_TOLERANCE
    register_window: int = translation.DEFAULT_REGISTER_WINDOW


def run_lint(
    doc: SubtitleDocument,
    profile: GuidelineProfile,
    lexicons: LexiconSet | None = None,
    register_window: int = translation.DEFAULT_REGISTER_WINDOW,
) -> list[Finding]:
    """Every single-document check on ``doc``, in cue order.

    Wordlist-based checks need ``lexicons``; register checks run only for
    languages with a shipped register table.
    """
    language = profile.language
    findings: list[Finding] = []
    for index, cue in enumerate(doc.cues):
        findings += guidelines.check_line_length(cue, profile, index)
        findings += guidelines.check_line_count(cue, profile, index)
        findings += guidelines.check_reading_speed(cue, profile, index)
        findings += guidelines.check_spacing(cue, profile, index)
        findings += guidelines.detect_repetitions(cue, index)
        if lexicons is not None:
            findings += guidelines.check_compound_length(cue, lexicons, index)
            findings += translation.check_spelling(cue, lexicons, index)
    findings += detect_mixed_language(doc, language)
    if register_table(language) is not None:
        findings += translation.check_register(doc, language, register_window, lexicons)
    return sort_findings(findings)


def _pair_findings(
    pair: AlignedCuePair,
    source: SubtitleDocument,
    target: SubtitleDocument,
    lexicons: LexiconSet,
    options: CompareOptions,
) -> list[Finding]:
    return [
        *guidelines.check_markup_integrity(pair, source, target),
        *translation.detect_not_translated(pair, source, target, lexicons),
        *translation.check_glossary(pair, source, target, lexicons),
        *translation.check_profanity(pair, source, target, lexicons, options.profanity_tolerance),
        *translation.check_numbers_units(pair, source, target, lexicons),
        *translation.check_addition_omission(pair, source, target, options.expansion),
        *translation.detect_stammering(pair, source, target),
    ]


def run_compare(
    source: SubtitleDocument,
    target: SubtitleDocument,
    profile: GuidelineProfile,
    lexicons: LexiconSet,
    options: CompareOptions = CompareOptions(),
    alignment: list[AlignedCuePair] | None = None,
) -> list[Finding]:
    """Align the pair, then run paired checks on each 1-to-1 group plus the
    single-document checks on the target. Ordered by target cue index.

    A token flagged both as NotTranslated and as a Misspelling keeps only one
    finding: Misspelling when the wordlist offers a correction, else NotTranslated.
    """
    if alignment is None:
        alignment = align_by_time(source, target, options.threshold)
    findings = run_lint(target, profile, lexicons, options.register_window)
    findings += check_block_count(alignment)
    for pair in alignment:
        if pair.one_to_one:
            findings += _pair_findings(pair, source, target, lexicons, options)
    findings += translation.check_lexical_consistency(alignment, source, target, lexicons)
    # One defect, one finding: a close wordlist match means a misspelling,
    # otherwise the token is an untranslated source word.
    corrected = {
        (f.cue_index, f.span)
        for f in findings
        if f.category is ErrorCategory.MISSPELLING and f.suggestion is not None
    }
    untranslated = {
        (f.cue_index, f.span) for f in findings if f.category is ErrorCategory.NOT_TRANSLATED
    }
    findings = [
        f
        for f in findings
        if not (f.category is ErrorCategory.MISSPELLING and (f.cue_index, f.span) in untranslated - corrected)
        and not (f.category is ErrorCategory.NOT_TRANSLATED and (f.cue_index, f.span) in corrected)
    ]
    return sort_findings(findings)


def has_errors(findings) -> bool:
    return any(f.is_error for f in findings)
