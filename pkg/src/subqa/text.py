"""Tokenization and number handling shared by the detectors."""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

# Numbers first so "15,000" and "3.5" stay whole; the lookahead rejects
# "2nd" so it falls through to the word branch.
_TOKEN_RE = re.compile(
    r"(?P<number>\d+(?:[.,\u00a0\u202f]\d+)*)(?![^\W_])"
    r"|(?P<word>[^\W_]+(?:['’][^\W_]+)*)"
)
_SENTENCE_END = ".!?…:"


@dataclass(frozen=True)
class Token:
    text: str
    start: int
    end: int
    is_number: bool

    @property
    def folded(self) -> str:
        return self.text.casefold()

    @property
    def has_digit(self) -> bool:
        return any(ch.isdigit() for ch in self.text)


@lru_cache(maxsize=65536)
def tokenize(text: str) -> tuple[Token, ...]:
    """Split on whitespace and punctuation.

    Apostrophe-internal words ("We're") and digit groups with separators
    ("15,000") stay single tokens; hyphenated words split.
    """
    return tuple(
        Token(m.group(0), m.start(), m.end(), m.lastgroup == "number")
        for m in _TOKEN_RE.finditer(text)
    )


def is_sentence_initial(text: str, token: Token) -> bool:
    """True when only punctuation, quotes or dashes separate ``token`` from a
    sentence boundary (start of text or terminal punctuation)."""
    i = token.start - 1
    while i >= 0 and not text[i].isalnum():
        if text[i] in _SENTENCE_END:
            return True
        i -= 1
    return i < 0


def is_all_caps(word: str) -> bool:
    letters = [ch for ch in word if ch.isalpha()]
    return bool(letters) and all(ch.isupper() for ch in letters)


@dataclass(frozen=True)
class LocaleNumber:
    decimal: str = "."
    thousands: str = ","


@lru_cache(maxsize=None)
def _number_patterns(decimal: str, thousands: str):
    d, t = re.escape(decimal), re.escape(thousands)
    grouped = re.compile(rf"^\d{{1,3}}(?:{t}\d{{3}})+(?:{d}\d+)?$")
    plain = re.compile(rf"^\d+(?:{d}\d+)?$")
    return grouped, plain


def parse_number(text: str, locale: LocaleNumber = LocaleNumber()) -> float | None:
    """Numeric value of a number token under ``locale``.

    Falls back to the opposite '.'/',' convention when the token does not fit
    the locale (MT output often keeps source formatting). Returns None when
    nothing fits.
    """
    text = text.strip()
    candidates = [locale]
    if locale.decimal in ".," and locale.thousands in ".,":
        candidates.append(LocaleNumber(locale.thousands, locale.decimal))
    else:
        candidates.append(LocaleNumber(".", ","))
    for loc in candidates:
        grouped, plain = _number_patterns(loc.decimal, loc.thousands)
        if grouped.match(text) or plain.match(text):
            return float(text.replace(loc.thousands, "").replace(loc.decimal, "."))
    return None


def number_parts(text: str) -> list[str]:
    return re.split(r"[.,\u00a0\u202f]", text)


def format_number(value: float, locale: LocaleNumber = LocaleNumber(), decimals: int = 0) -> str:
    """Render ``value`` without thousands grouping, using the locale decimal mark."""
    if decimals <= 0:
        return str(int(round(value)))
    return f"{value:.{decimals}f}".replace(".", locale.decimal)
