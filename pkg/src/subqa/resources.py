"""Guideline profiles and lexicon resources.

Resource directory layout::

    profiles/<lang>.json           guideline profile
    lexicons/<lang>/words.txt      target wordlist, one word per line
    lexicons/<lang>/names.txt      proper-noun allowlist (optional)
    knp/<title>.json | .txt        key names and phrases glossary
    profanity/<lang>.json          {"term": severity 1-3}
    units/<source>-<target>.json   unit rules, merged over the built-in table
"""
from __future__ import annotations

import json
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field, fields
from enum import Enum
from functools import cached_property, lru_cache
from importlib import resources as importlib_resources
from pathlib import Path

from subqa.text import LocaleNumber, tokenize

log = logging.getLogger(__name__)

KEEP_VERBATIM = "keep-verbatim"
DEFAULT_READING_SPEED = 17.0


class SchemaViolation(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


class MissingResource(FileNotFoundError):
    def __init__(self, path):
        super().__init__(f"missing resource: {path}")
        self.path = Path(path)


class DuplicateGlossaryKey(ValueError):
    def __init__(self, key: str, where=None):
        super().__init__(f"duplicate glossary key {key!r}" + (f" in {where}" if where else ""))
        self.key = key


class Spacing(str, Enum):
    ATTACHED = "attached"
    SPACED = "spaced"


class UnitSystem(str, Enum):
    IMPERIAL = "imperial"
    METRIC = "metric"


@dataclass(frozen=True)
class GuidelineProfile:
    """Per-language rendering constraints.

    ``max_reading_speed`` is in characters per second.
    """

    language: str
    max_chars_per_line: int = 42
    max_lines_per_block: int = 2
    max_reading_speed: float = DEFAULT_READING_SPEED
    hyphen_spacing: Spacing = Spacing.ATTACHED
    ellipsis_spacing: Spacing = Spacing.ATTACHED
    ellipsis_forms: frozenset[str] = frozenset({"...", "…"})


_PROFILE_FIELDS = {f.name for f in fields(GuidelineProfile)}


def profile_from_dict(data: dict) -> GuidelineProfile:
    if not isinstance(data, dict):
        raise SchemaViolation("<root>", "profile must be a JSON object")
    for key in data:
        if key not in _PROFILE_FIELDS:
            raise SchemaViolation(key, "unknown key")
    if not isinstance(data.get("language"), str) or not data["language"]:
        raise SchemaViolation("language", "required non-empty string")
    kwargs: dict = {"language": data["language"]}
    for key in ("max_chars_per_line", "max_lines_per_block"):
        if key in data:
            value = data[key]
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise SchemaViolation(key, f"must be a positive integer, got {value!r}")
            kwargs[key] = value
    if "max_reading_speed" in data:
        value = data["max_reading_speed"]
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
            raise SchemaViolation("max_reading_speed", f"must be a positive number, got {value!r}")
        kwargs["max_reading_speed"] = float(value)
    for key in ("hyphen_spacing", "ellipsis_spacing"):
        if key in data:
            try:
                kwargs[key] = Spacing(data[key])
            except ValueError:
                raise SchemaViolation(key, f"must be 'attached' or 'spaced', got {data[key]!r}") from None
    if "ellipsis_forms" in data:
        forms = data["ellipsis_forms"]
        if not isinstance(forms, list) or not forms or not all(isinstance(f, str) and f for f in forms):
            raise SchemaViolation("ellipsis_forms", "must be a non-empty list of strings")
        kwargs["ellipsis_forms"] = frozenset(forms)
    return GuidelineProfile(**kwargs)


def load_profile(path) -> GuidelineProfile:
    """Load a profile from a JSON file; absent optional keys take the class defaults."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise FileNotFoundError(f"profile not found: {path}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaViolation("<root>", f"invalid JSON: {exc}") from None
    return profile_from_dict(data)


def _data_file(*parts: str):
    res = importlib_resources.files("subqa") / "data"
    for part in parts:
        res = res / part
    return res


def builtin_profile_languages() -> list[str]:
    return sorted(p.name[:-5] for p in _data_file("profiles").iterdir() if p.name.endswith(".json"))


def builtin_profile(language: str) -> GuidelineProfile:
    """Shipped profile for ``language`` ("de-AT" falls back to "de").

    Unknown languages get the default profile.
    """
    for code in (language, language.split("-")[0].lower()):
        res = _data_file("profiles", f"{code}.json")
        if res.is_file():
            return profile_from_dict(json.loads(res.read_text(encoding="utf-8")))
    log.debug("no built-in profile for %s, using defaults", language)
    return GuidelineProfile(language=language)


@dataclass(frozen=True)
class UnitRule:
    source_unit: str
    source_aliases: frozenset[str]
    target_unit: str
    factor: float
    system: UnitSystem = UnitSystem.IMPERIAL

    @property
    def names(self) -> frozenset[str]:
        return frozenset(n.casefold() for n in self.source_aliases | {self.source_unit})


def _unit_rules_from_json(data, where: str) -> list[UnitRule]:
    if isinstance(data, dict):
        data = data.get("rules", [])
    if not isinstance(data, list):
        raise SchemaViolation("rules", f"{where}: expected a list of unit rules")
    rules = []
    for i, item in enumerate(data):
        key = f"rules[{i}]"
        try:
            factor = item["factor"]
            if isinstance(factor, bool) or not isinstance(factor, (int, float)):
                raise SchemaViolation(f"{key}.factor", "must be a number")
            rule = UnitRule(
                source_unit=str(item["source_unit"]),
                source_aliases=frozenset(item.get("source_aliases", [])),
                target_unit=str(item["target_unit"]),
                factor=float(factor),
                system=UnitSystem(item.get("system", "imperial")),
            )
        except KeyError as exc:
            raise SchemaViolation(f"{key}.{exc.args[0]}", f"{where}: required") from None
        except ValueError as exc:
            if isinstance(exc, SchemaViolation):
                raise
            raise SchemaViolation(f"{key}.system", f"{where}: {exc}") from None
        if not (math.isfinite(rule.factor) and rule.factor > 0):
            raise SchemaViolation(f"{key}.factor", f"{where}: must be positive and finite")
        rules.append(rule)
    return rules


def _check_unit_rules(rules: list[UnitRule]) -> None:
    owner: dict[str, str] = {}
    for rule in rules:
        for name in rule.names:
            if name in owner and owner[name] != rule.source_unit:
                raise SchemaViolation("source_aliases", f"{name!r} claimed by {owner[name]!r} and {rule.source_unit!r}")
            owner[name] = rule.source_unit


@lru_cache(maxsize=1)
def builtin_units() -> tuple[UnitRule, ...]:
    rules = _unit_rules_from_json(json.loads(_data_file("units.json").read_text(encoding="utf-8")), "units.json")
    _check_unit_rules(rules)
    return tuple(rules)


@lru_cache(maxsize=None)
def default_locale_number(language: str) -> LocaleNumber:
    table = json.loads(_data_file("locales.json").read_text(encoding="utf-8"))
    entry = table.get(language) or table.get(language.split("-")[0].lower())
    return LocaleNumber(**entry) if entry else LocaleNumber()


@dataclass(frozen=True)
class GlossaryEntry:
    """A KNP entry. ``target`` is the mandated rendering, :data:`KEEP_VERBATIM`,
    or None for consistency-only terms; ``variants`` are known alternative
    renderings, used to spot inconsistent usage."""

    term: str
    target: str | None
    variants: tuple[str, ...] = ()

    @property
    def required(self) -> str | None:
        return self.term if self.target == KEEP_VERBATIM else self.target

    @property
    def renderings(self) -> tuple[str, ...]:
        out = [self.required] if self.required else []
        return tuple(out + [v for v in self.variants if v not in out])


@dataclass(frozen=True)
class LexiconSet:
    source_lang: str
    target_lang: str
    target_wordlist: frozenset[str] | None = None
    knp_glossary: dict[str, GlossaryEntry] = field(default_factory=dict)
    profanity: dict[str, dict[str, int]] = field(default_factory=dict)
    units: tuple[UnitRule, ...] = field(default_factory=builtin_units)
    locale_number: LocaleNumber = LocaleNumber()
    source_locale_number: LocaleNumber = LocaleNumber()
    proper_nouns: frozenset[str] = frozenset()

    @classmethod
    def empty(cls, source_lang: str, target_lang: str) -> LexiconSet:
        """No wordlist or glossary; lexicon-dependent detectors become no-ops."""
        return cls(
            source_lang,
            target_lang,
            locale_number=default_locale_number(target_lang),
            source_locale_number=default_locale_number(source_lang),
        )

    def glossary_lookup(self, term: str) -> str | None:
        entry = self.knp_glossary.get(term.casefold())
        return entry.target if entry else None

    @cached_property
    def glossary_vocabulary(self) -> frozenset[str]:
        """Case-folded tokens of every keep-verbatim term and rendering."""
        words = set()
        for entry in self.knp_glossary.values():
            for text in entry.renderings:
                words.update(t.folded for t in tokenize(text))
        return frozenset(words)

    @cached_property
    def glossary_by_first_word(self) -> dict[str, list[GlossaryEntry]]:
        """Entries keyed by the case-folded first token of their source term."""
        index: dict[str, list[GlossaryEntry]] = defaultdict(list)
        for entry in self.knp_glossary.values():
            words = tokenize(entry.term)
            if words:
                index[words[0].folded].append(entry)
        return dict(index)

    @cached_property
    def unit_index(self) -> dict[str, UnitRule]:
        return {name: rule for rule in self.units for name in rule.names}

    def unit_rule(self, word: str) -> UnitRule | None:
        return self.unit_index.get(word.casefold())

    def profanity_for(self, language: str) -> dict[str, int]:
        return self.profanity.get(language, {})

    def knows(self, word: str) -> bool:
        folded = word.casefold()
        return (
            (self.target_wordlist is not None and folded in self.target_wordlist)
            or folded in self.glossary_vocabulary
            or folded in self.proper_nouns
        )

    @cached_property
    def _suggestion_index(self) -> dict[tuple[str, int], list[str]]:
        index: dict[tuple[str, int], list[str]] = defaultdict(list)
        for word in sorted(self.target_wordlist or ()):
            index[(word[:1], len(word))].append(word)
        return index

    def closest_word(self, word: str) -> str | None:
        """Best wordlist candidate sharing the first letter and within two characters of length."""
        import difflib

        folded = word.casefold()
        pool = []
        for length in range(len(folded) - 2, len(folded) + 3):
            pool.extend(self._suggestion_index.get((folded[:1], length), ()))
        match = difflib.get_close_matches(folded, pool, n=1, cutoff=0.75)
        if not match:
            return None
        best = match[0]
        return best[:1].upper() + best[1:] if word[:1].isupper() else best


def read_wordlist(path) -> frozenset[str]:
    words = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.casefold())
    return frozenset(words)


def _reject_duplicates(where):
    def hook(pairs):
        seen = {}
        for key, value in pairs:
            if key in seen:
                raise DuplicateGlossaryKey(key, where)
            seen[key] = value
        return seen

    return hook


def _glossary_entries(path: Path) -> list[GlossaryEntry]:
    entries = []
    if path.suffix == ".txt":
        for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            term, sep, target = line.partition("=")
            if not sep or not term.strip():
                raise SchemaViolation(f"line {line_no}", f"{path}: expected 'term = rendering'")
            entries.append(GlossaryEntry(term.strip(), target.strip() or None))
        return entries
    data = json.loads(path.read_text(encoding="utf-8"), object_pairs_hook=_reject_duplicates(path))
    if not isinstance(data, dict):
        raise SchemaViolation("<root>", f"{path}: glossary must be a JSON object")
    for term, value in data.items():
        if not term.strip():
            raise SchemaViolation("<key>", f"{path}: empty glossary term")
        if isinstance(value, str) or value is None:
            entries.append(GlossaryEntry(term, value))
        elif isinstance(value, dict):
            variants = value.get("variants", [])
            if not isinstance(variants, list) or not all(isinstance(v, str) for v in variants):
                raise SchemaViolation(f"{term}.variants", f"{path}: must be a list of strings")
            entries.append(GlossaryEntry(term, value.get("target"), tuple(variants)))
        else:
            raise SchemaViolation(term, f"{path}: expected a string or an object")
    return entries


def _read_profanity(path: Path) -> dict[str, int]:
    text = path.read_text(encoding="utf-8")
    if not text.strip():
        return {}
    data = json.loads(text)
    if not isinstance(data, dict):
        raise SchemaViolation("<root>", f"{path}: profanity list must be a JSON object")
    table = {}
    for term, severity in data.items():
        if isinstance(severity, bool) or not isinstance(severity, int) or not 1 <= severity <= 3:
            raise SchemaViolation(term, f"{path}: severity must be an integer 1-3")
        table[term.casefold()] = severity
    return table


def load_lexicons(directory, source_lang: str, target_lang: str, title: str | None = None) -> LexiconSet:
    """Load every lexicon resource for a language pair from ``directory``.

    Only the target wordlist is mandatory. With ``title`` the glossary comes
    from ``knp/<title>.json`` (or ``.txt``); otherwise all glossary files are
    merged.
    """
    root = Path(directory)
    words_path = root / "lexicons" / target_lang / "words.txt"
    if not words_path.is_file():
        raise MissingResource(words_path)
    wordlist = read_wordlist(words_path)
    names_path = root / "lexicons" / target_lang / "names.txt"
    names = read_wordlist(names_path) if names_path.is_file() else frozenset()

    knp_dir = root / "knp"
    if title is not None:
        candidates = [knp_dir / f"{title}.json", knp_dir / f"{title}.txt"]
        knp_files = [p for p in candidates if p.is_file()]
        if not knp_files:
            raise MissingResource(candidates[0])
    else:
        knp_files = sorted(p for p in knp_dir.glob("*") if p.suffix in (".json", ".txt")) if knp_dir.is_dir() else []
    glossary: dict[str, GlossaryEntry] = {}
    for path in knp_files:
        for entry in _glossary_entries(path):
            key = entry.term.casefold()
            if key in glossary:
                raise DuplicateGlossaryKey(entry.term, path)
            glossary[key] = entry

    profanity = {}
    for lang in dict.fromkeys((source_lang, target_lang)):
        path = root / "profanity" / f"{lang}.json"
        profanity[lang] = _read_profanity(path) if path.is_file() else {}

    units = list(builtin_units())
    units_path = root / "units" / f"{source_lang}-{target_lang}.json"
    if units_path.is_file():
        extra = _unit_rules_from_json(json.loads(units_path.read_text(encoding="utf-8")), str(units_path))
        replaced = {r.source_unit for r in extra}
        units = [r for r in units if r.source_unit not in replaced] + extra
    _check_unit_rules(units)

    return LexiconSet(
        source_lang=source_lang,
        target_lang=target_lang,
        target_wordlist=wordlist,
        knp_glossary=glossary,
        profanity=profanity,
        units=tuple(units),
        locale_number=default_locale_number(target_lang),
        source_locale_number=default_locale_number(source_lang),
        proper_nouns=names,
    )


def load_profile_for(language: str, resource_dir=None) -> GuidelineProfile:
    """Profile lookup used by the CLI: ``<resource_dir>/profiles/<lang>.json``
    wins over the shipped profile."""
    if resource_dir is not None:
        path = Path(resource_dir) / "profiles" / f"{language}.json"
        if path.is_file():
            return load_profile(path)
    return builtin_profile(language)


@lru_cache(maxsize=None)
def stopwords(language: str) -> frozenset[str]:
    res = _data_file("stopwords", f"{language}.txt")
    if not res.is_file():
        return frozenset()
    return frozenset(
        w.strip().casefold() for w in res.read_text(encoding="utf-8").splitlines() if w.strip() and not w.startswith("#")
    )


@lru_cache(maxsize=1)
def stopword_languages() -> tuple[str, ...]:
    return tuple(sorted(p.name[:-4] for p in _data_file("stopwords").iterdir() if p.name.endswith(".txt")))


@lru_cache(maxsize=None)
def register_table(language: str) -> dict | None:
    res = _data_file("register", f"{language.split('-')[0].lower()}.json")
    if not res.is_file():
        return None
    return json.loads(res.read_text(encoding="utf-8"))
