"""Cue-level language evidence from stopwords and writing systems."""
from __future__ import annotations

import unicodedata
from functools import lru_cache

from subqa.findings import ErrorCategory, Finding, Severity
from subqa.resources import stopword_languages, stopwords
from subqa.subtitles import SubtitleDocument
from subqa.text import tokenize

MIN_FOREIGN_HITS = 2
MIN_RATIO = 2.0

# Unicode name prefix -> language credited with characters of that script.
SCRIPT_LANGUAGES = {
    "ARABIC": "ar",
    "CJK": "zh",
    "HIRAGANA": "ja",
    "KATAKANA": "ja",
    "HANGUL": "ko",
    "CYRILLIC": "ru",
    "DEVANAGARI": "hi",
    "TAMIL": "ta",
    "HEBREW": "he",
    "GREEK": "el",
    "THAI": "th",
}


def _script_language(ch: str) -> str | None:
    if ch.isascii() or not ch.isalpha():
        return None
    name = unicodedata.name(ch, "")
    return SCRIPT_LANGUAGES.get(name.split(" ", 1)[0])


@lru_cache(maxsize=None)
def _stopword_index(languages: tuple[str, ...]) -> dict[str, tuple[str, ...]]:
    index: dict[str, list[str]] = {}
    for lang in languages:
        for word in stopwords(lang):
            index.setdefault(word, []).append(lang)
    return {word: tuple(langs) for word, langs in index.items()}


def language_evidence(text: str, languages: list[str] | None = None) -> dict[str, int]:
    """Count stopword hits per Latin-script language and letters per
    non-Latin script."""
    index = _stopword_index(tuple(languages or stopword_languages()))
    scores: dict[str, int] = {}
    for token in tokenize(text):
        if token.is_number:
            continue
        for lang in index.get(token.folded, ()):
            scores[lang] = scores.get(lang, 0) + 1
        if token.text.isascii():
            continue
        for ch in token.text:
            lang = _script_language(ch)
            if lang is not None:
                scores[lang] = scores.get(lang, 0) + 1
    # kana makes Han characters Japanese
    if scores.get("ja") and scores.get("zh"):
        scores["ja"] += scores.pop("zh")
    return scores


def detect_mixed_language(
    doc: SubtitleDocument,
    primary_lang: str,
    min_hits: int = MIN_FOREIGN_HITS,
    ratio: float = MIN_RATIO,
) -> list[Finding]:
    """Flag cues whose evidence for another language beats ``primary_lang``
    by the margin: at least ``min_hits`` and ``ratio`` times the primary
    language's evidence."""
    primary = primary_lang.split("-")[0].lower()
    findings = []
    for index, cue in enumerate(doc.cues):
        scores = language_evidence(cue.plain)
        own = scores.pop(primary, 0)
        if not scores:
            continue
        lang, hits = max(sorted(scores.items()), key=lambda item: item[1])
        if hits >= min_hits and hits >= ratio * own:
            findings.append(
                Finding(
                    ErrorCategory.MIXED_LANGUAGE,
                    index,
                    Severity.INFO,
                    f"cue looks like {lang} ({hits} hits) rather than {primary} ({own} hits)",
                )
            )
    return findings
