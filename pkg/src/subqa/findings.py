"""Finding records shared by every detector."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class ErrorCategory(str, Enum):
    """Defect categories.

    The string values are the wire identifiers used in findings and report
    JSON; they must stay stable across releases.
    """

    # detectable
    REPEATED_PHRASE = "RepeatedPhrase"
    INCORRECT_SPACING = "IncorrectSpacing"
    NON_TEXT_CHARACTER = "NonTextCharacter"
    BLOCK_COUNT_INTEGRITY = "BlockCountIntegrity"
    LINE_TOO_LONG = "LineTooLong"
    TOO_MANY_LINES = "TooManyLines"
    READING_SPEED_EXCEEDED = "ReadingSpeedExceeded"
    COMPOUND_WORD_OOV = "CompoundWordOOV"
    MIXED_LANGUAGE = "MixedLanguage"
    NOT_TRANSLATED = "NotTranslated"
    MISSPELLING = "Misspelling"
    GLOSSARY_VIOLATION = "GlossaryViolation"
    LEXICAL_INCONSISTENCY = "LexicalInconsistency"
    PROFANITY_MISMATCH = "ProfanityMismatch"
    FORMAT_ERROR = "FormatError"
    ADDITION_OMISSION = "AdditionOmission"
    REGISTER_INCONSISTENCY = "RegisterInconsistency"
    STAMMERING = "Stammering"
    # reserved: only ever produced by external annotation
    IDIOM = "Idiom"
    CONTEXTUAL_MEANING = "ContextualMeaning"
    NONSENSICAL = "Nonsensical"
    OVER_TRANSLATION = "OverTranslation"
    WORD_ORDER = "WordOrder"
    AGREEMENT = "Agreement"
    WORD_STRUCTURE = "WordStructure"
    CULTURAL_NUANCE = "CulturalNuance"
    GRAMMAR_INTENT = "GrammarIntent"
    GENRE_ADAPTATION = "GenreAdaptation"
    INVENTED_LANGUAGE = "InventedLanguage"
    PARAPHRASE = "Paraphrase"

    @classmethod
    def parse(cls, name: str) -> ErrorCategory:
        try:
            return cls(name)
        except ValueError:
            raise UnknownCategory(name) from None

    @property
    def reserved(self) -> bool:
        return self in RESERVED_CATEGORIES

    def __str__(self) -> str:
        return self.value


RESERVED_CATEGORIES = frozenset(
    {
        ErrorCategory.IDIOM,
        ErrorCategory.CONTEXTUAL_MEANING,
        ErrorCategory.NONSENSICAL,
        ErrorCategory.OVER_TRANSLATION,
        ErrorCategory.WORD_ORDER,
        ErrorCategory.AGREEMENT,
        ErrorCategory.WORD_STRUCTURE,
        ErrorCategory.CULTURAL_NUANCE,
        ErrorCategory.GRAMMAR_INTENT,
        ErrorCategory.GENRE_ADAPTATION,
        ErrorCategory.INVENTED_LANGUAGE,
        ErrorCategory.PARAPHRASE,
    }
)

CATEGORY_ORDER = {category: i for i, category in enumerate(ErrorCategory)}


class UnknownCategory(ValueError):
    def __init__(self, name: str):
        super().__init__(f"unknown error category: {name!r}")
        self.name = name


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"
    INFO = "info"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Finding:
    """One detected defect.

    ``cue_index`` is the 0-based position of the cue in the checked (target)
    document. ``span`` is a ``(start, end)`` range into that cue's plain
    text, or None for cue-level findings. ``suggestion``, when set, is the
    replacement text for ``span``.
    """

    category: ErrorCategory
    cue_index: int
    severity: Severity
    message: str
    span: tuple[int, int] | None = None
    suggestion: str | None = None
    source_index: int | None = None

    def __post_init__(self) -> None:
        if self.span is not None and not 0 <= self.span[0] <= self.span[1]:
            raise ValueError(f"bad span {self.span}")

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def sort_key(self) -> tuple:
        span = self.span or (-1, -1)
        return (self.cue_index, span, CATEGORY_ORDER[self.category], self.message)

    def to_dict(self) -> dict:
        data: dict = {
            "category": self.category.value,
            "cue_index": self.cue_index,
            "severity": self.severity.value,
            "message": self.message,
            "span": list(self.span) if self.span is not None else None,
            "suggestion": self.suggestion,
        }
        if self.source_index is not None:
            data["source_index"] = self.source_index
        return data

    @classmethod
    def from_dict(cls, data: dict) -> Finding:
        span = data.get("span")
        return cls(
            category=ErrorCategory.parse(data["category"]),
            cue_index=int(data["cue_index"]),
            severity=Severity(data.get("severity", "error")),
            message=data.get("message", ""),
            span=(int(span[0]), int(span[1])) if span is not None else None,
            suggestion=data.get("suggestion"),
            source_index=data.get("source_index"),
        )


def sort_findings(findings) -> list[Finding]:
    return sorted(findings, key=Finding.sort_key)
