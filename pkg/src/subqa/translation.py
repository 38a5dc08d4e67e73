"""Checks that compare a target cue with its source cue or with lexicons."""
from __future__ import annotations

import re
from functools import lru_cache

from subqa.alignment import AlignedCuePair
from subqa.findings import ErrorCategory, Finding, Severity
from subqa.fixers import suggest_unit_conversion
from subqa.resources import KEEP_VERBATIM, LexiconSet, MissingResource, UnitRule, UnitSystem, register_table
from subqa.subtitles import Cue, SubtitleDocument
from subqa.text import LocaleNumber, Token, is_all_caps, is_sentence_initial, number_parts, parse_number, tokenize

UNIT_TOLERANCE = 0.10
LENGTH_RATIO_BOUNDS = (0.5, 2.0)
DEFAULT_PROFANITY_TOLERANCE = 1
DEFAULT_REGISTER_WINDOW = 10

_STAMMER_RE = re.compile(
    r"(?<![^\W\d_])([^\W\d_])(?:\.{2,3}|…|[-–—])\s?(?:\1(?:\.{2,3}|…|[-–—])\s?)*\1[^\W\d_]+",
    re.IGNORECASE,
)
_STAMMER_NOTE_RE = re.compile(r"\[[^\]]*(?:stamm|stott|stutt|bégai|tartamud|gaguej|balbuz)[^\]]*\]", re.IGNORECASE)


def _one_to_one(pair: AlignedCuePair, source_doc: SubtitleDocument, target_doc: SubtitleDocument):
    if not pair.one_to_one:
        raise ValueError(f"check needs a 1-to-1 pair, got {pair.shape}")
    t = pair.target_indices[0]
    return source_doc.cues[pair.source_indices[0]], target_doc.cues[t], t


@lru_cache(maxsize=4096)
def term_pattern(term: str) -> re.Pattern:
    """Case-insensitive match of ``term`` on word boundaries; any whitespace
    run (including a line break) matches a space."""
    words = [re.escape(w) for w in term.split()]
    return re.compile(r"(?<!\w)" + r"\s+".join(words) + r"(?!\w)", re.IGNORECASE)


def detect_not_translated(
    pair: AlignedCuePair, source_doc: SubtitleDocument, target_doc: SubtitleDocument, lexicons: LexiconSet
) -> list[Finding]:
    """Target words copied from the source that the target wordlist and the
    glossary do not know.

    Outside German, a word seen only capitalized and not at a sentence start
    is taken for a proper noun and skipped. German capitalizes every noun,
    so that test is not applied there.
    """
    if lexicons.target_wordlist is None:
        return []
    source, target, index = _one_to_one(pair, source_doc, target_doc)
    src_plain, tgt_plain = source.plain, target.plain
    src_tokens = [t for t in tokenize(src_plain) if not t.has_digit]
    src_words = {t.folded for t in src_tokens}
    tgt_tokens = [t for t in tokenize(tgt_plain) if not t.has_digit]
    check_case = lexicons.target_lang.split("-")[0].lower() != "de"
    seen_lower = {t.folded for t in src_tokens + tgt_tokens if t.text.islower()}
    findings = []
    for token in tgt_tokens:
        folded = token.folded
        if len(token.text) < 2 or folded not in src_words:
            continue
        if folded in lexicons.target_wordlist or folded in lexicons.glossary_vocabulary or folded in lexicons.proper_nouns:
            continue
        if check_case and token.text[0].isupper() and folded not in seen_lower:
            continue
        findings.append(
            Finding(
                ErrorCategory.NOT_TRANSLATED,
                index,
                Severity.ERROR,
                f"{token.text!r} copied from the source untranslated",
                span=(token.start, token.end),
            )
        )
    return findings


def check_spelling(cue: Cue, lexicons: LexiconSet, index: int = 0) -> list[Finding]:
    """Words outside the wordlist, glossary renderings and proper-noun list.

    Tokens with digits and single characters are exempt.
    """
    if lexicons.target_wordlist is None:
        return []
    findings = []
    for token in tokenize(cue.plain):
        if token.has_digit or len(token.text) < 2 or lexicons.knows(token.text):
            continue
        suggestion = lexicons.closest_word(token.text)
        findings.append(
            Finding(
                ErrorCategory.MISSPELLING,
                index,
                Severity.ERROR,
                f"unknown word {token.text!r}" + (f", did you mean {suggestion!r}?" if suggestion else ""),
                span=(token.start, token.end),
                suggestion=suggestion,
            )
        )
    return findings


def _glossary_hits(text: str, lexicons: LexiconSet):
    """Glossary entries whose source term occurs in ``text``, in first-occurrence order."""
    index = lexicons.glossary_by_first_word
    if not index:
        return []
    hits = {}
    for token in tokenize(text):
        for entry in index.get(token.folded, ()):
            if entry.term not in hits and term_pattern(entry.term).search(text, token.start):
                hits[entry.term] = entry
    return list(hits.values())


def check_glossary(
    pair: AlignedCuePair, source_doc: SubtitleDocument, target_doc: SubtitleDocument, lexicons: LexiconSet
) -> list[Finding]:
    """Source cue uses a glossary term but the target lacks its mandated rendering."""
    source, target, index = _one_to_one(pair, source_doc, target_doc)
    tgt_plain = target.plain
    findings = []
    for entry in _glossary_hits(source.plain, lexicons):
        required = entry.required
        if not required or term_pattern(required).search(tgt_plain):
            continue
        findings.append(
            Finding(
                ErrorCategory.GLOSSARY_VIOLATION,
                index,
                Severity.ERROR,
                f"glossary term {entry.term!r} must stay verbatim"
                if entry.target == KEEP_VERBATIM
                else f"glossary term {entry.term!r} must be rendered as {required!r}",
                suggestion=required,
            )
        )
    return findings


def check_lexical_consistency(
    alignment: list[AlignedCuePair],
    source_doc: SubtitleDocument,
    target_doc: SubtitleDocument,
    lexicons: LexiconSet,
) -> list[Finding]:
    """One finding per glossary term rendered in two or more known ways across the file.

    The rendering used in a target cue is the first of the entry's known
    renderings (mandated rendering plus variants) that occurs there.
    """
    seen: dict[str, dict[str, list[int]]] = {}
    for pair in alignment:
        if not pair.source_indices or not pair.target_indices:
            continue
        src_text = "\n".join(source_doc.cues[i].plain for i in pair.source_indices)
        tgt_text = "\n".join(target_doc.cues[i].plain for i in pair.target_indices)
        for entry in _glossary_hits(src_text, lexicons):
            found = [
                (m.start(), r) for r in entry.renderings for m in [term_pattern(r).search(tgt_text)] if m is not None
            ]
            if found:
                rendering = min(found)[1]
                seen.setdefault(entry.term, {}).setdefault(rendering, []).append(min(pair.target_indices))
    findings = []
    for term, renderings in seen.items():
        if len(renderings) < 2:
            continue
        first_cues = sorted((cues[0], r) for r, cues in renderings.items())
        listing = "; ".join(
            f"{r!r} in cue{'s' if len(c) > 1 else ''} {', '.join(str(i + 1) for i in c)}" for r, c in renderings.items()
        )
        findings.append(
            Finding(
                ErrorCategory.LEXICAL_INCONSISTENCY,
                first_cues[1][0],
                Severity.INFO,
                f"{term!r} rendered inconsistently: {listing}",
            )
        )
    return findings


def max_profanity(text: str, table: dict[str, int]) -> int:
    """Highest severity of any listed term in ``text``; 0 when none occur."""
    if not table:
        return 0
    words = {t.folded for t in tokenize(text)}
    best = 0
    for term, severity in table.items():
        if severity <= best:
            continue
        if (" " in term and term_pattern(term).search(text)) or term in words:
            best = severity
    return best


def check_profanity(
    pair: AlignedCuePair,
    source_doc: SubtitleDocument,
    target_doc: SubtitleDocument,
    lexicons: LexiconSet,
    tolerance: int = DEFAULT_PROFANITY_TOLERANCE,
) -> list[Finding]:
    """Profanity strength should survive translation within ``tolerance`` levels."""
    src_table = lexicons.profanity_for(lexicons.source_lang)
    tgt_table = lexicons.profanity_for(lexicons.target_lang)
    if not src_table or not tgt_table:
        return []
    source, target, index = _one_to_one(pair, source_doc, target_doc)
    src_level = max_profanity(source.plain, src_table)
    tgt_level = max_profanity(target.plain, tgt_table)
    if abs(src_level - tgt_level) <= tolerance:
        return []
    return [
        Finding(
            ErrorCategory.PROFANITY_MISMATCH,
            index,
            Severity.WARNING,
            f"profanity level {src_level} in source vs {tgt_level} in target",
        )
    ]


def _numbers_with_units(
    text: str, locale: LocaleNumber, lexicons: LexiconSet
) -> list[tuple[Token, float, UnitRule | None, int]]:
    """(number token, value, imperial unit rule or None, end offset incl. unit)."""
    tokens = tokenize(text)
    out = []
    for i, token in enumerate(tokens):
        if not token.is_number:
            continue
        value = parse_number(token.text, locale)
        if value is None:
            continue
        rule, end = None, token.end
        if i + 1 < len(tokens):
            nxt = tokens[i + 1]
            gap = text[token.end : nxt.start]
            candidate = lexicons.unit_rule(nxt.text)
            if candidate is not None and candidate.system is UnitSystem.IMPERIAL and gap in ("", " ", "-", "\u00a0"):
                rule, end = candidate, nxt.end
        out.append((token, value, rule, end))
    return out


def _corresponds(src_token: Token, value: float, rule: UnitRule | None, target_numbers) -> bool:
    for tgt_token, tgt_value, _, _ in target_numbers:
        if tgt_token.text == src_token.text or src_token.text in number_parts(tgt_token.text):
            return True
        if tgt_value == value:
            return True
        if rule is not None and value > 0:
            converted = value * rule.factor
            if abs(tgt_value - converted) <= UNIT_TOLERANCE * converted:
                return True
    return False


def check_numbers_units(
    pair: AlignedCuePair, source_doc: SubtitleDocument, target_doc: SubtitleDocument, lexicons: LexiconSet
) -> list[Finding]:
    """Imperial units kept in the target, and source numbers with no
    counterpart in the target.

    A target number counts as the counterpart of a source number when it is
    written the same, has the same value under the target locale, or (for a
    number with a unit) is within 10% of the converted value.
    """
    source, target, index = _one_to_one(pair, source_doc, target_doc)
    tgt_plain = target.plain
    src_numbers = _numbers_with_units(source.plain, lexicons.source_locale_number, lexicons)
    tgt_numbers = _numbers_with_units(tgt_plain, lexicons.locale_number, lexicons)
    findings = []
    flagged = set()
    for src_token, value, rule, _ in src_numbers:
        if rule is None:
            continue
        for tgt_token, _, tgt_rule, end in tgt_numbers:
            if tgt_rule is rule and tgt_token.start not in flagged:
                flagged.add(tgt_token.start)
                suggestion = suggest_unit_conversion(value, rule, lexicons.locale_number)
                findings.append(
                    Finding(
                        ErrorCategory.FORMAT_ERROR,
                        index,
                        Severity.ERROR,
                        f"imperial unit kept: {tgt_plain[tgt_token.start:end]!r} "
                        f"(exact {suggestion.exact:g} {rule.target_unit})",
                        span=(tgt_token.start, end),
                        suggestion=suggestion.text,
                    )
                )
    for src_token, value, rule, _ in src_numbers:
        if not _corresponds(src_token, value, rule, tgt_numbers):
            findings.append(
                Finding(
                    ErrorCategory.FORMAT_ERROR,
                    index,
                    Severity.ERROR,
                    f"number {src_token.text!r} has no counterpart in the target",
                )
            )
    return findings


def check_addition_omission(
    pair: AlignedCuePair,
    source_doc: SubtitleDocument,
    target_doc: SubtitleDocument,
    expansion: float = 1.0,
) -> list[Finding]:
    """Length-ratio outliers and dropped entities (numbers, all-caps words).

    ``expansion`` is the expected target/source character ratio for the
    language pair.
    """
    if expansion <= 0:
        raise ValueError("expansion must be positive")
    source, target, index = _one_to_one(pair, source_doc, target_doc)
    src_plain, tgt_plain = source.plain, target.plain
    findings = []
    src_len = len(src_plain.replace("\n", ""))
    if src_len:
        ratio = len(tgt_plain.replace("\n", "")) / (src_len * expansion)
        low, high = LENGTH_RATIO_BOUNDS
        if not low <= ratio <= high:
            findings.append(
                Finding(
                    ErrorCategory.ADDITION_OMISSION,
                    index,
                    Severity.WARNING,
                    f"length ratio {ratio:.2f} outside [{low}, {high}]",
                )
            )
    src_tokens = tokenize(src_plain)
    tgt_tokens = tokenize(tgt_plain)
    dropped = []
    src_nums = [t for t in src_tokens if t.is_number]
    tgt_nums = [t for t in tgt_tokens if t.is_number]
    if len(tgt_nums) < len(src_nums):
        tgt_texts = {t.text for t in tgt_nums}
        dropped.extend(t.text for t in src_nums if t.text not in tgt_texts)
    if any(ch.islower() for ch in src_plain):
        tgt_words = {t.text for t in tgt_tokens}
        dropped.extend(
            t.text
            for t in src_tokens
            if not t.is_number and len(t.text) >= 3 and is_all_caps(t.text) and t.text not in tgt_words
        )
    if dropped:
        findings.append(
            Finding(
                ErrorCategory.ADDITION_OMISSION,
                index,
                Severity.WARNING,
                "possibly dropped: " + ", ".join(dict.fromkeys(dropped)),
            )
        )
    return findings


def register_markers(plain: str, table: dict, wordlist=None) -> set[str]:
    """Which of "formal"/"informal" second-person markers a cue contains."""
    formal = set(table.get("formal", ()))
    informal = {w.casefold() for w in table.get("informal", ())}
    pronouns = {w.casefold() for w in table.get("pronouns_after_imperative", ())}
    exclusions = {w.casefold() for w in table.get("imperative_exclusions", ())}
    suffix = table.get("imperative_suffix")
    infinitive = table.get("imperative_infinitive_suffix", "")
    tokens = tokenize(plain)
    found = set()
    for i, token in enumerate(tokens):
        if token.folded in informal:
            found.add("informal")
        elif token.text in formal and not is_sentence_initial(plain, token):
            found.add("formal")
        elif (
            suffix
            and wordlist is not None
            and token.text[:1].isupper()
            and len(token.text) >= 4
            and token.folded.endswith(suffix)
            and token.folded not in exclusions
            and is_sentence_initial(plain, token)
            and (i + 1 == len(tokens) or tokens[i + 1].folded not in pronouns)
            and token.folded[: -len(suffix)] + infinitive in wordlist
        ):
            # ihr-form imperative such as "Werft" (werfen)
            found.add("informal")
    return found


def check_register(
    doc: SubtitleDocument,
    language: str,
    window: int = DEFAULT_REGISTER_WINDOW,
    lexicons: LexiconSet | None = None,
) -> list[Finding]:
    """Formal and informal address mixed within ``window`` consecutive cues.

    Raises MissingResource when no register table ships for ``language``.
    Each cue reports at most once, citing the nearest earlier cue of the
    opposite register. With a wordlist, informal plural imperatives are
    recognized too.
    """
    table = register_table(language)
    if table is None:
        raise MissingResource(f"register/{language}.json")
    wordlist = lexicons.target_wordlist if lexicons is not None else None
    last_seen: dict[str, int] = {}
    findings = []
    for index, cue in enumerate(doc.cues):
        markers = register_markers(cue.plain, table, wordlist)
        if not markers:
            continue
        if len(markers) == 2:
            findings.append(
                Finding(
                    ErrorCategory.REGISTER_INCONSISTENCY,
                    index,
                    Severity.INFO,
                    f"formal and informal address both in cue {index + 1}",
                )
            )
        else:
            (kind,) = markers
            other = "informal" if kind == "formal" else "formal"
            prev = last_seen.get(other)
            if prev is not None and index - prev < window:
                findings.append(
                    Finding(
                        ErrorCategory.REGISTER_INCONSISTENCY,
                        index,
                        Severity.INFO,
                        f"{kind} address in cue {index + 1} after {other} address in cue {prev + 1}",
                    )
                )
        for kind in markers:
            last_seen[kind] = index
    return findings


def detect_stammering(
    pair: AlignedCuePair, source_doc: SubtitleDocument, target_doc: SubtitleDocument
) -> list[Finding]:
    """Source stammer ("w...w...was") that the target neither reproduces nor annotates."""
    source, target, index = _one_to_one(pair, source_doc, target_doc)
    m = _STAMMER_RE.search(source.plain)
    if m is None:
        return []
    tgt_plain = target.plain
    if _STAMMER_RE.search(tgt_plain) or _STAMMER_NOTE_RE.search(tgt_plain):
        return []
    return [
        Finding(
            ErrorCategory.STAMMERING,
            index,
            Severity.INFO,
            f"source stammer {m.group(0)!r} not carried into the target",
        )
    ]
